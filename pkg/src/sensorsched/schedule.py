"""Periodic schedules, their exact average cost, and uniformity refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AbsentSensorError, DimensionError, DomainError, InfiniteCostError
from .model import lyapunov_solution


@dataclass(frozen=True)
class Schedule:
    """One period of a periodic schedule; ``slots`` hold 1-based sensor ids."""

    slots: tuple

    def __post_init__(self):
        slots = tuple(int(s) for s in self.slots)
        if not slots:
            raise DomainError("a schedule needs at least one slot")
        if min(slots) < 1:
            raise DomainError("sensor indices are 1-based")
        object.__setattr__(self, "slots", slots)

    @classmethod
    def parse(cls, text):
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))
        except ValueError as exc:
            raise DomainError(f"cannot parse schedule {text!r}") from exc

    def __str__(self):
        return ",".join(map(str, self.slots))

    def __len__(self):
        return len(self.slots)

    @property
    def period(self):
        return len(self.slots)

    def counts(self, n):
        return [self.slots.count(i) for i in range(1, n + 1)]

    def rotate(self, k):
        k %= self.period
        return Schedule(self.slots[k:] + self.slots[:k])

    def repeat(self, m):
        return Schedule(self.slots * m)

    def canonical(self):
        """Lexicographically smallest rotation."""
        return min((self.rotate(k) for k in range(self.period)), key=lambda s: s.slots)

    def same_cycle(self, other):
        return self.canonical() == Schedule(other.slots if isinstance(other, Schedule) else other).canonical()

    def relabel(self, mapping):
        return Schedule(tuple(mapping.get(s, s) for s in self.slots))


@dataclass(frozen=True)
class GapVector:
    sensor: int
    gaps: tuple


@dataclass(frozen=True)
class CostBreakdown:
    per_sensor: tuple
    total: float


def _positions(slots, i):
    return [k for k, s in enumerate(slots) if s == i]


def _gaps(slots, i):
    pos = _positions(slots, i)
    if not pos:
        return None
    L = len(slots)
    return [pos[0] + L - pos[-1]] + [b - a for a, b in zip(pos, pos[1:])]


def gap_vector(sched, i):
    """Cyclic off-duty durations of sensor ``i``; the wraparound gap comes first."""
    gaps = _gaps(sched.slots, i)
    if gaps is None:
        raise AbsentSensorError(i)
    return GapVector(i, tuple(gaps))


def _sensor_cost(sys, gaps, period):
    tr = sys.traces(max(gaps))
    cum = np.concatenate(([0.0], np.cumsum(tr)))
    return float(sum(cum[d] for d in gaps)) / period


def evaluate_cost(systems, sched):
    """Exact infinite-horizon average of the summed covariance traces.

    A stable sensor that never transmits contributes the trace of its
    Lyapunov solution; an absent sensor with ``rho(A) >= 1`` has infinite
    cost and raises :class:`InfiniteCostError`.
    """
    n = len(systems)
    if max(sched.slots) > n:
        raise DimensionError(f"schedule names sensor {max(sched.slots)} but only {n} systems exist")
    per = []
    for i, sys in enumerate(systems, start=1):
        gaps = _gaps(sched.slots, i)
        if gaps is None:
            if sys.rho >= 1.0:
                raise InfiniteCostError(i, f"unstable sensor {i} never transmits: infinite cost")
            per.append(float(np.trace(lyapunov_solution(sys))))
        else:
            per.append(_sensor_cost(sys, gaps, sched.period))
    return CostBreakdown(tuple(per), float(sum(per)))


def majorizes(a, b, tol=1e-12):
    """True iff ``b`` is majorized by ``a`` (``b`` is at least as uniform)."""
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} vs {b.size}")
    ca, cb = np.cumsum(a), np.cumsum(b)
    if a.size and abs(ca[-1] - cb[-1]) > tol * (1.0 + abs(ca[-1])):
        return False
    return bool(np.all(cb <= ca + tol * (1.0 + np.abs(ca))))


def is_uniformity_improvement(old_slots, new_slots, n):
    """Whether ``new`` beats ``old`` by the majorization test.

    Needs equal transmission counts, every sensor's new gap vector
    majorized by its old one, and at least one sorted gap vector changed.
    """
    strict = False
    for i in range(1, n + 1):
        g_old, g_new = _gaps(old_slots, i), _gaps(new_slots, i)
        if g_old is None or g_new is None:
            if (g_old is None) != (g_new is None):
                return False
            continue
        if len(g_old) != len(g_new):
            return False
        if not majorizes(g_old, g_new):
            return False
        if sorted(g_old) != sorted(g_new):
            strict = True
    return strict


def refine_uniformity(systems, sched, max_passes=50):
    """Hill-climb over pairwise slot swaps accepted by the majorization test.

    Each accepted swap must strictly lower the cost; a violation means the
    trace sequence of some system is not increasing and raises RuntimeError.
    """
    n = len(systems)
    slots = list(sched.slots)
    cost = evaluate_cost(systems, Schedule(tuple(slots))).total
    L = len(slots)
    for _ in range(max_passes):
        accepted = False
        for p in range(L):
            for q in range(p + 1, L):
                if slots[p] == slots[q]:
                    continue
                cand = list(slots)
                cand[p], cand[q] = cand[q], cand[p]
                if not is_uniformity_improvement(slots, cand, n):
                    continue
                new_cost = evaluate_cost(systems, Schedule(tuple(cand))).total
                if not new_cost < cost:
                    raise RuntimeError(
                        f"majorizing swap did not lower the cost ({cost!r} -> {new_cost!r})"
                    )
                slots, cost, accepted = cand, new_cost, True
        if not accepted:
            break
    return Schedule(tuple(slots))
