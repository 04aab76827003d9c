"""Optimal periodic scheduling of sensors sharing one channel for remote state estimation."""

from .bounds import OffDutyBounds, all_bounds, calibrate_bound_mode, pair_bound
from .config import Problem, load_config, load_fixture, parse_config
from .dutycycle import (
    DutyCycleProfile,
    PiecewiseCost,
    construct_from_duty_cycles,
    phi,
    piecewise_cost,
    solve_lower_bound,
)
from .errors import *  # noqa: F401,F403
from .heuristics import HeuristicResult, brute_force_optimal, mef_schedule, rh_schedule
from .mdp import (
    MdpModel,
    MdpSolution,
    build_mdp,
    extract_schedule,
    optimality_residual,
    solve_average_reward,
)
from .model import (
    SystemModel,
    g_map,
    h_map,
    lyapunov_solution,
    never_scheduled_check,
    riccati_residual,
    steady_state_covariance,
    trace_of_power,
)
from .schedule import (
    CostBreakdown,
    GapVector,
    Schedule,
    evaluate_cost,
    gap_vector,
    is_uniformity_improvement,
    majorizes,
    refine_uniformity,
)

__version__ = "0.1.0"
