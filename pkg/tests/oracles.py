"""Reference computations that share no code path with the package."""

import itertools

import numpy as np
import scipy.linalg as sla

from sensorsched import SystemModel


def dare_steady(A, C, Q, R, transposed=False):
    # scipy solves the control-form DARE; the filter-form prior covariance is
    # obtained with the dual pair (A^T, C^T)
    a = np.asarray(A, float)
    a_ric = a if transposed else a.T
    X = sla.solve_discrete_are(a_ric, np.asarray(C, float).T, Q, R)
    C = np.asarray(C, float)
    return X - X @ C.T @ np.linalg.solve(C @ X @ C.T + R, C @ X)


def joseph_steady(A, C, Q, R, iters=20000):
    """Joseph-form Kalman recursion run to convergence."""
    A, C, Q, R = (np.asarray(m, float) for m in (A, C, Q, R))
    P = np.eye(A.shape[0])
    I = np.eye(A.shape[0])
    for _ in range(iters):
        X = A @ P @ A.T + Q
        K = X @ C.T @ np.linalg.inv(C @ X @ C.T + R)
        P = (I - K @ C) @ X @ (I - K @ C).T + K @ R @ K.T
    return P


def simulated_cost(systems, slots, periods=3):
    """Average trace over one period after a warm-up, by direct covariance propagation."""
    P = [s.steady.copy() for s in systems]
    L = len(slots)
    total = 0.0
    for k in range(periods * L):
        for i, s in enumerate(systems):
            P[i] = s.steady.copy() if slots[k % L] == i + 1 else s.A @ P[i] @ s.A.T + s.Q
        if k >= (periods - 1) * L:
            total += sum(np.trace(p) for p in P)
    return total / L


def karp_min_mean_cycle(succ, cost):
    """Minimum mean cycle of a strongly connected graph with node costs.

    Edge ``u -> v`` carries ``cost[v]``.
    """
    S = len(cost)
    edges = [(u, v) for u in range(S) for v in succ[u] if v >= 0]
    INF = np.inf
    D = np.full((S + 1, S), INF)
    D[0, 0] = 0.0
    us = np.array([e[0] for e in edges])
    vs = np.array([e[1] for e in edges])
    w = np.asarray(cost)[vs]
    for k in range(1, S + 1):
        cand = D[k - 1, us] + w
        np.minimum.at(D[k], vs, cand)
    best = INF
    for v in range(S):
        if not np.isfinite(D[S, v]):
            continue
        worst = -INF
        for k in range(S):
            if np.isfinite(D[k, v]):
                worst = max(worst, (D[S, v] - D[k, v]) / (S - k))
        best = min(best, worst)
    return best


def naive_pair_bound(si, sj, n, literal=True, cap=100000):
    """Bound scan by repeated matrix propagation, no precomputed tables."""

    def hpow(s, X, l, affine):
        for _ in range(l):
            X = s.A @ X @ s.A.T + (s.Q if affine else 0.0)
        return X

    def lagged(s, p, l3):
        D = hpow(s, s.steady, p, True) - s.steady
        return sum(np.trace(hpow(s, D, l, literal)) for l in range(l3))

    best = 3 * n - 2
    for l2 in range(1, 3 * n - 3):
        for l3 in range(1, 3 * n - 3):
            rhs = lagged(sj, l2, l3)
            l1 = 0
            while lagged(si, l1 + 1 + l2, l3) <= rhs:
                l1 += 1
                assert l1 < cap
            if l1 >= 1:
                best = max(best, l1 + l2 + l3 + 1)
    return best


def grid_lower_bound(systems, delta):
    """Exhaustive minimum of the duty-cycle objective over reciprocal grids."""
    from fractions import Fraction

    def phi(s, z):
        b = z.denominator // z.numerator
        t = s.traces(b)
        return float(z) * float(np.sum(t[:b])) + float(1 - b * z) * float(t[b])

    n = len(systems)
    grids = [[Fraction(1, a) for a in range(1, d + 1)] for d in delta]
    best = np.inf
    for free in range(n):
        others = [g for j, g in enumerate(grids) if j != free]
        for combo in itertools.product(*others):
            rest = 1 - sum(combo)
            if Fraction(1, delta[free]) <= rest <= 1:
                f = list(combo)
                f.insert(free, rest)
                best = min(best, sum(phi(s, z) for s, z in zip(systems, f)))
    return best


def random_scalar_systems(rng, n, lo=1.1, hi=1.8):
    return [
        SystemModel(A=[[a]], C=[[1.0]], Q=[[q]], R=[[r]], id=i + 1)
        for i, (a, q, r) in enumerate(
            zip(rng.uniform(lo, hi, n), rng.uniform(0.2, 2.0, n), rng.uniform(0.2, 2.0, n))
        )
    ]


def random_matrix_systems(rng, n, riccati="standard"):
    out = []
    for i in range(n):
        while True:
            A = rng.uniform(-1.5, 1.5, (2, 2))
            rho = np.max(np.abs(np.linalg.eigvals(A)))
            if 1.05 < rho < 1.7:
                break
        C = rng.uniform(-1, 1, (1, 2))
        Q = np.diag(rng.uniform(0.1, 2.0, 2))
        R = np.array([[rng.uniform(0.2, 2.0)]])
        try:
            out.append(SystemModel(A=A, C=C, Q=Q, R=R, id=i + 1, riccati=riccati))
        except Exception:
            return random_matrix_systems(rng, n, riccati)
    return out
