import numpy as np
import pytest

from oracles import random_matrix_systems, random_scalar_systems
from sensorsched import (
    SystemModel,
    brute_force_optimal,
    evaluate_cost,
    load_fixture,
    mef_schedule,
    rh_schedule,
)
from sensorsched.errors import DomainError, EnumerationOverflow, NoCycleError, WindowOverflow


def test_identical_systems_round_robin():
    s = SystemModel(A=[[1.3]], C=[[1.0]], Q=[[1.0]], R=[[1.0]])
    for n in (2, 3, 4):
        res = mef_schedule([s] * n)
        assert res.schedule.period == n
        assert sorted(res.schedule.slots) == list(range(1, n + 1))


@pytest.mark.parametrize("seed", range(50))
def test_unit_window_equals_mef(seed):
    rng = np.random.default_rng(seed)
    systems = random_matrix_systems(rng, 2 + seed % 3)
    assert rh_schedule(systems, 1).schedule == mef_schedule(systems).schedule


def test_fixture_values_we_reproduce():
    systems = load_fixture("small_network").systems
    assert rh_schedule(systems, 5).cost == pytest.approx(144.0, abs=0.05)
    big = load_fixture("large_state_space").systems
    assert mef_schedule(big).cost == pytest.approx(121.4, abs=0.05)


def test_reported_cost_is_schedule_cost():
    systems = load_fixture("large_state_space").systems
    for res in (mef_schedule(systems), rh_schedule(systems, 3)):
        assert res.cost == evaluate_cost(systems, res.schedule).total


def test_increment_criterion_is_available():
    systems = load_fixture("large_state_space").systems
    res = mef_schedule(systems, criterion="increment")
    assert res.cost >= mef_schedule(systems).cost - 1e-9
    with pytest.raises(DomainError):
        mef_schedule(systems, criterion="other")


def test_brute_force_small_cases():
    s = SystemModel(A=[[2.0]], C=[[1.0]], Q=[[1.0]], R=[[1.0]])
    sched, cost = brute_force_optimal([s], 1)
    assert sched.slots == (1,) and cost == pytest.approx(np.trace(s.steady))
    dominant = SystemModel(A=[[3.0]], C=[[1.0]], Q=[[5.0]], R=[[1.0]])
    quiet = SystemModel(A=[[1.05]], C=[[1.0]], Q=[[0.1]], R=[[1.0]])
    sched, cost = brute_force_optimal([dominant, quiet], 6)
    assert cost <= evaluate_cost([dominant, quiet], type(sched)((1, 2))).total
    assert sched.counts(2)[0] > sched.counts(2)[1]


def test_errors():
    s = SystemModel(A=[[2.0]], C=[[1.0]], Q=[[1.0]], R=[[1.0]])
    with pytest.raises(WindowOverflow):
        rh_schedule([s] * 10, 9)
    with pytest.raises(DomainError):
        rh_schedule([s, s], 0)
    with pytest.raises(EnumerationOverflow):
        brute_force_optimal([s] * 4, 15)
    with pytest.raises(NoCycleError):
        mef_schedule(load_fixture("small_network").systems, max_steps=3)


def test_heuristics_never_beat_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(5):
        systems = random_scalar_systems(rng, 2)
        _, best = brute_force_optimal(systems, 10)
        for res in (mef_schedule(systems), rh_schedule(systems, 2)):
            if res.schedule.period <= 10:
                assert best <= res.cost + 1e-9
