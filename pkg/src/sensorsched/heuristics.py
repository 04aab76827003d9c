"""Greedy and receding-horizon schedulers plus a brute-force oracle.

Both online schedulers simulate counter vectors from ``(1, 2, ..., n)``
without clamping to any off-duty bound and stop at the first repeated
vector; the actions between the two visits form the periodic schedule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EnumerationOverflow, NoCycleError, WindowOverflow
from .schedule import Schedule, evaluate_cost

MAX_STEPS = 100_000
WINDOW_CAP = 10**8
ENUM_CAP = 10**8
MEF_CRITERIA = ("absence", "increment")


@dataclass(frozen=True)
class HeuristicResult:
    schedule: Schedule
    cost: float
    transient: int  # steps before the cycle was entered


class _Tables:
    """Per-sensor trace tables grown on demand; ``t[i][v]`` is ``Tr h_i^v(P_i)``."""

    def __init__(self, systems, upto=64):
        self.systems = systems
        self._grow(upto)

    def _grow(self, upto):
        self.upto = upto
        with np.errstate(over="ignore", invalid="ignore"):
            self.t = np.array([s.traces(upto) for s in self.systems])

    def ensure(self, upto):
        if upto > self.upto:
            self._grow(max(upto, 2 * self.upto))


def _simulate(systems, choose, max_steps):
    n = len(systems)
    if n < 1:
        raise DomainError("need at least one system")
    v = np.arange(1, n + 1)
    seen = {}
    actions = []
    for k in range(max_steps + 1):
        key = tuple(v.tolist())
        if key in seen:
            start = seen[key]
            sched = Schedule(tuple(actions[start:]))
            return HeuristicResult(sched, evaluate_cost(systems, sched).total, start)
        if k == max_steps:
            break
        seen[key] = k
        a = choose(v)
        actions.append(a + 1)
        v = v + 1
        v[a] = 1
    raise NoCycleError(f"no repeated counter vector within {max_steps} steps")


def mef_schedule(systems, max_steps=MAX_STEPS, criterion="absence"):
    """Greedy scheduler: transmit where it removes the most error covariance.

    ``"absence"`` scores sensor i by ``Tr h_i^{v_i}(P_i) - Tr P_i``, the
    next-step trace saved by transmitting now; this is what a one-step
    receding horizon minimises.  ``"increment"`` scores by the one-step
    growth ``Tr h_i^{v_i}(P_i) - Tr h_i^{v_i - 1}(P_i)`` instead.
    """
    if criterion not in MEF_CRITERIA:
        raise DomainError(f"unknown MEF criterion {criterion!r}")
    tab = _Tables(systems)
    rows = np.arange(len(systems))

    def choose(v):
        tab.ensure(int(v.max()) + 1)
        now = tab.t[rows, v]
        ref = tab.t[:, 0] if criterion == "absence" else tab.t[rows, v - 1]
        return int(np.argmax(now - ref))

    return _simulate(systems, choose, max_steps)


def rh_schedule(systems, window, max_steps=MAX_STEPS, rtol=1e-12):
    """Receding horizon: best ``window``-step action sequence, first action applied.

    Window cost is the summed total trace over the window steps.  Equal
    costs (within ``rtol``) resolve to the lexicographically smallest
    sequence.
    """
    n = len(systems)
    if window < 1:
        raise DomainError("window must be at least 1")
    if n**window > WINDOW_CAP:
        raise WindowOverflow(f"{n}^{window} candidate sequences exceed {WINDOW_CAP}")
    tab = _Tables(systems)
    rows = np.arange(n)
    eye = np.eye(n, dtype=bool)

    def choose(v):
        tab.ensure(int(v.max()) + window)
        # candidates are expanded as parent * n + action, which keeps them
        # in lexicographic order of the action sequence
        V = v[None, :]
        cost = np.zeros(1)
        first = None
        for depth in range(window):
            W = np.where(eye[None, :, :], 1, V[:, None, :] + 1).reshape(-1, n)
            step = tab.t[rows, W - 1].sum(axis=1)
            cost = np.repeat(cost, n) + step
            V = W
            if depth == 0:
                first = np.arange(n)
            else:
                first = np.repeat(first, n)
        best = cost.min()
        k = int(np.flatnonzero(cost <= best + rtol * (1.0 + abs(best)))[0])
        return int(first[k])

    return _simulate(systems, choose, max_steps)


def brute_force_optimal(systems, max_period, require_all=True):
    """Cheapest periodic schedule with period at most ``max_period``.

    Rotations are equivalent, so the first slot is pinned to sensor 1.
    """
    n = len(systems)
    total = sum(n ** (L - 1) for L in range(1, max_period + 1))
    if total > ENUM_CAP:
        raise EnumerationOverflow(f"{total} candidate schedules exceed {ENUM_CAP}")
    tables = []
    for sys in systems:
        with np.errstate(over="ignore", invalid="ignore"):
            tables.append(np.concatenate(([0.0], np.cumsum(sys.traces(max_period)))))
    best_cost, best = np.inf, None
    for L in range(max(1, n if require_all else 1), max_period + 1):
        for tail in itertools.product(range(1, n + 1), repeat=L - 1):
            slots = (1,) + tail
            c = _cost_fast(tables, slots, n)
            if c < best_cost - 1e-12 * (1.0 + abs(best_cost) if np.isfinite(best_cost) else 1.0):
                best_cost, best = c, slots
    if best is None:
        raise DomainError("no schedule in range contains every sensor")
    return Schedule(best), float(best_cost)


def _cost_fast(tables, slots, n):
    L = len(slots)
    total = 0.0
    for i in range(1, n + 1):
        pos = [k for k, s in enumerate(slots) if s == i]
        if not pos:
            return np.inf
        cum = tables[i - 1]
        total += cum[pos[0] + L - pos[-1]]
        for a, b in zip(pos, pos[1:]):
            total += cum[b - a]
    return total / L
