"""Duty-cycle relaxation: a lower bound on the optimal cost and, when the
optimal duty cycles allow it, a direct construction of an optimal schedule.

Sensor i transmitting a fraction ``z`` of the time, as evenly as possible,
costs ``phi_i(z)``.  With ``beta = floor(1/z)`` this is

    phi(z) = z * sum_{j<beta} t_j + (1 - beta z) * t_beta,   t_j = Tr h^j(P),

which is linear on each ``[1/(beta+1), 1/beta]`` and convex when ``t`` is
increasing.  Minimising ``sum_i phi_i(f_i)`` over ``sum f = 1`` with
``f_i >= 1/Delta_i`` bounds every schedule's cost from below.
"""

from __future__ import annotations

import itertools
import math
import sys as _sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, EnumerationOverflow, InfeasibleError
from .schedule import Schedule

CONSTRUCTION_CAP = 1000
NODE_CAP = 2_000_000


def _beta(z):
    if isinstance(z, Fraction):
        return z.denominator // z.numerator
    b = int(math.floor(1.0 / z))
    # 1/z can land just below an integer for z = 1/k in floating point
    if (b + 1) * z <= 1.0 + 1e-12:
        b += 1
    return b


def phi(sys, z):
    if not (0 < z <= 1):
        raise DomainError(f"duty cycle must lie in (0, 1], got {z}")
    b = _beta(z)
    t = sys.traces(b)
    zf = float(z)
    rest = float(1 - b * z) if isinstance(z, Fraction) else max(0.0, 1.0 - b * zf)
    return zf * float(t[:b].sum()) + rest * float(t[b])


def _slope(t, b):
    return float(t[:b].sum()) - b * float(t[b])


@dataclass(frozen=True)
class PiecewiseCost:
    sensor: int
    breakpoints: tuple  # increasing z values 1/alpha
    slopes: tuple  # slope on [breakpoints[k], breakpoints[k+1]]


def piecewise_cost(sys, lower, sensor=1):
    """Segments of ``phi`` on ``[lower, 1]``; ``lower`` must be ``1/alpha``."""
    a = int(round(1 / lower))
    t = sys.traces(a)
    bps = tuple(Fraction(1, k) for k in range(a, 0, -1))
    slopes = tuple(_slope(t, k) for k in range(a - 1, 0, -1))
    return PiecewiseCost(sensor, bps, slopes)


@dataclass(frozen=True)
class DutyCycleProfile:
    fractions: tuple  # Fraction per sensor
    lower_bound_value: float

    def off_grid(self):
        """Indices (1-based) whose reciprocal duty cycle is not an integer."""
        return [i for i, f in enumerate(self.fractions, start=1) if f.numerator != 1]


def _segment_up(f):
    # segment entered when f increases: f in [1/(b+1), 1/b)
    q = 1 / f
    b = q.numerator // q.denominator
    return b - 1 if q.denominator == 1 else b


def solve_lower_bound(systems, bounds):
    """Greedy steepest-segment filling from ``f_i = 1/Delta_i``."""
    delta = [int(d) for d in getattr(bounds, "per_sensor", bounds)]
    n = len(systems)
    if len(delta) != n:
        raise DomainError(f"{len(delta)} bounds for {n} systems")
    f = [Fraction(1, d) for d in delta]
    budget = 1 - sum(f)
    if budget < 0:
        raise InfeasibleError("sum of 1/Delta exceeds one; no duty cycles fit")
    tables = [s.traces(d) for s, d in zip(systems, delta)]
    while budget > 0:
        best, best_c = None, None
        for i in range(n):
            b = _segment_up(f[i])
            if b < 1:
                continue
            c = _slope(tables[i], b)
            if best is None or c < best_c:
                best, best_c = i, c
        if best is None:
            raise InfeasibleError("duty cycles cannot absorb the remaining budget")
        step = min(Fraction(1, _segment_up(f[best])) - f[best], budget)
        f[best] += step
        budget -= step
    value = sum(phi(s, fi) for s, fi in zip(systems, f))
    return DutyCycleProfile(tuple(f), float(value))


def _as_fractions(fractions, cap):
    out = []
    for x in fractions:
        if isinstance(x, Fraction):
            fr = x
        elif isinstance(x, int):
            fr = Fraction(x)
        else:
            x = float(x)
            if not math.isfinite(x):
                raise DomainError(f"duty cycle {x} is not finite")
            fr = Fraction(x).limit_denominator(cap)
            if abs(float(fr) - x) > 1e-12:
                raise DomainError(f"duty cycle {x} has no denominator within {cap}")
        if not (0 < fr <= 1):
            raise DomainError(f"duty cycle {fr} outside (0, 1]")
        out.append(fr)
    if sum(out) != 1:
        raise DomainError(f"duty cycles sum to {sum(out)}, not 1")
    return out


def construct_from_duty_cycles(profile, cap=CONSTRUCTION_CAP, node_cap=NODE_CAP):
    """Schedule realising the duty cycles with near-uniform gaps, or ``None``.

    Sensor i gets ``k_i = f_i L`` slots in a period ``L`` equal to the least
    common denominator, and every cyclic gap must be ``floor(L/k_i)`` or
    ``ceil(L/k_i)``.
    """
    fr = _as_fractions(getattr(profile, "fractions", profile), cap)
    L = math.lcm(*(x.denominator for x in fr))
    if L > cap:
        raise DomainError(f"period {L} exceeds the construction cap {cap}")
    n = len(fr)
    k = [int(x * L) for x in fr]
    lo = [L // c for c in k]
    hi = [-(-L // c) for c in k]

    slots = [0] * L
    first = [-1] * n
    last = [-1] * n
    left = list(k)
    lead = max(range(n), key=lambda i: (fr[i], -i))
    slots[0] = lead
    first[lead] = last[lead] = 0
    left[lead] -= 1
    nodes = 0

    def ok_placed(i, p):
        g = p - last[i]
        if not lo[i] <= g <= hi[i]:
            return False
        if left[i] == 1:
            wrap = first[i] + L - p
            return lo[i] <= wrap <= hi[i]
        return True

    def viable(p):
        # every sensor with pending slots can still meet its gap and wrap limits
        for i in range(n):
            if left[i] == 0:
                continue
            if first[i] < 0:
                # the wrap gap spans the first slot, so it starts before hi
                if k[i] > 1 and p > hi[i] - 1:
                    return False
                continue
            if p - last[i] > hi[i]:
                return False
            if last[i] + left[i] * hi[i] < first[i] + L - hi[i]:
                return False
            if last[i] + left[i] * lo[i] > first[i] + L - lo[i]:
                return False
        return True

    def search(p):
        nonlocal nodes
        if p == L:
            return True
        nodes += 1
        if nodes > node_cap:
            raise EnumerationOverflow(f"construction search exceeded {node_cap} nodes")
        if not viable(p):
            return False
        cand = []
        for i in range(n):
            if left[i] == 0:
                continue
            if first[i] < 0:
                cand.append((hi[i] - 1, i))
            elif ok_placed(i, p):
                cand.append((last[i] + hi[i], i))
        for _, i in sorted(cand):
            prev_first, prev_last = first[i], last[i]
            if first[i] < 0:
                first[i] = p
            slots[p] = i
            last[i] = p
            left[i] -= 1
            if search(p + 1):
                return True
            left[i] += 1
            first[i], last[i] = prev_first, prev_last
        return False

    old = _sys.getrecursionlimit()
    _sys.setrecursionlimit(max(old, 4 * L + 100))
    try:
        found = search(1)
    finally:
        _sys.setrecursionlimit(old)
    if not found:
        return None
    return Schedule(tuple(s + 1 for s in slots))


def reciprocal_grid_allocations(delta):
    """All allocations with every fraction but one equal to ``1/alpha``.

    Yields tuples of Fractions summing to one with ``f_i >= 1/Delta_i``.
    Used as an exhaustive oracle for small instances.
    """
    n = len(delta)
    grids = [[Fraction(1, a) for a in range(1, d + 1)] for d in delta]
    for free in range(n):
        others = [g for j, g in enumerate(grids) if j != free]
        for combo in itertools.product(*others):
            rest = 1 - sum(combo)
            if Fraction(1, delta[free]) <= rest <= 1:
                out = list(combo)
                out.insert(free, rest)
                yield tuple(out)


def convexity_violations(sys, lower, tol=1e-9):
    """Count of consecutive segment pairs whose slopes decrease."""
    pc = piecewise_cost(sys, lower)
    s = np.asarray(pc.slopes)
    return int(np.sum(np.diff(s) < -tol * (1.0 + np.abs(s[:-1]))))
