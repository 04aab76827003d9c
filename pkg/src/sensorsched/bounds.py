"""Upper bounds on the off-duty duration of each sensor in an optimal schedule.

For sensors ``j != i`` the pairwise bound is the largest ``l1+l2+l3+1`` with
``l1 >= 1`` and ``l2, l3 in 1..3n-4`` such that

    Tr sum_{l<l3} h_i^l(h_i^{l1+l2}(P_i) - P_i)  <=  Tr sum_{l<l3} h_j^l(h_j^{l2}(P_j) - P_j)

floored at ``3n-2``.  How ``h^l`` acts on a covariance *difference* is
ambiguous, so two modes exist: ``"literal"`` applies the affine map
(``+Q`` at every step), ``"linear"`` only its linear part ``A^l X A^lT``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import BoundSearchOverflow, DomainError, UnstableAssumptionViolated

log = logging.getLogger(__name__)

BOUND_MODES = ("literal", "linear")
SCAN_CAP = 100_000


@dataclass(frozen=True)
class OffDutyBounds:
    per_pair: dict
    per_sensor: tuple
    mode: str
    monotone: bool = True

    def __getitem__(self, i):
        return self.per_sensor[i - 1]


def _lag_weights(sys, depth):
    # G[l3] = sum_{l<l3} (A^l)^T A^l, so Tr[A^l X A^lT] summed is <X, G[l3]>.
    # c[l3] = sum_{l<l3} Tr h^l(0), the affine offset of the literal mode.
    d = sys.dim
    G = np.zeros((depth + 1, d, d))
    c = np.zeros(depth + 1)
    Ap = np.eye(d)
    Z = np.zeros((d, d))
    for l3 in range(1, depth + 1):
        G[l3] = G[l3 - 1] + Ap.T @ Ap
        c[l3] = c[l3 - 1] + np.trace(Z)
        Ap = sys.A @ Ap
        Z = sys.A @ Z @ sys.A.T + sys.Q
    return G, c


def _lagged_sums(sys, K, depth, mode):
    """Table ``M[p, l3] = Tr sum_{l<l3} h^l(h^p(P) - P)`` for ``p <= K``."""
    G, c = _lag_weights(sys, depth)
    with np.errstate(over="ignore", invalid="ignore"):
        D = sys.powers(K) - sys.steady
        M = np.einsum("pab,lab->pl", D, G)
    if mode == "literal":
        M = M + c
    return M


def _check_mode(mode):
    if mode not in BOUND_MODES:
        raise DomainError(f"unknown bound mode {mode!r}; expected one of {BOUND_MODES}")


def _pair(systems, j, i, mode, cap):
    n = len(systems)
    si, sj = systems[i - 1], systems[j - 1]
    if si.rho <= 1.0:
        raise UnstableAssumptionViolated(
            f"system {i}: off-duty bound needs rho(A) > 1, got {si.rho:.6g}"
        )
    floor = 3 * n - 2
    depth = 3 * n - 4
    if depth < 1:
        return floor, True
    rhs = _lagged_sums(sj, depth, depth, mode)  # rhs[l2, l3]
    K = 256
    while True:
        K = min(K, cap + depth + 1)
        M = _lagged_sums(si, K, depth, mode)
        best = floor
        monotone = True
        missing = False
        p = np.arange(K + 1)
        l2s = np.arange(1, depth + 1)
        for l3 in range(1, depth + 1):
            col = M[:, l3]
            # first l1 >= 1 at which the inequality fails; NaN/inf count as failing
            fails = ~(col[None, :] <= rhs[l2s, l3][:, None]) & (p[None, :] > l2s[:, None])
            found = fails.any(axis=1)
            if not found.all():
                missing = True
                break
            first = fails.argmax(axis=1)
            l1_max = first - l2s - 1
            for l2, l1 in zip(l2s, l1_max):
                if l1 >= 1:
                    best = max(best, int(l1 + l2 + l3 + 1))
                    seg = col[l2 + 1 : l2 + l1 + 1]
                    if np.any(np.diff(seg) < -1e-12 * (1.0 + np.abs(seg[:-1]))):
                        monotone = False
        if not missing:
            return best, monotone
        if K >= cap + depth + 1:
            raise BoundSearchOverflow(
                f"bound scan for pair ({j},{i}) exceeded {cap} steps"
            )
        K *= 2


def pair_bound(systems, j, i, mode="literal", cap=SCAN_CAP):
    """Pairwise bound for sensor ``i`` against sensor ``j`` (both 1-based)."""
    _check_mode(mode)
    if i == j:
        raise DomainError("pair bound needs two distinct sensors")
    return _pair(systems, j, i, mode, cap)[0]


def all_bounds(systems, mode="literal", cap=SCAN_CAP):
    _check_mode(mode)
    n = len(systems)
    if n < 2:
        raise DomainError("off-duty bounds need at least two sensors")
    per_pair = {}
    monotone = True
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            val, mono = _pair(systems, j, i, mode, cap)
            per_pair[(j, i)] = val
            monotone = monotone and mono
    per_sensor = tuple(
        max(v for (j, i2), v in per_pair.items() if i2 == i) for i in range(1, n + 1)
    )
    if not monotone:
        log.warning("lagged-sum sequence was not monotone during the bound scan")
    return OffDutyBounds(per_pair, per_sensor, mode, monotone)


def calibrate_bound_mode(cases, cap=SCAN_CAP):
    """Modes whose bounds reproduce every ``(systems, expected)`` case exactly."""
    matching = []
    for mode in BOUND_MODES:
        if all(all_bounds(systems, mode, cap).per_sensor == tuple(expected) for systems, expected in cases):
            matching.append(mode)
    return matching
