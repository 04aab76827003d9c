"""Plant/sensor models and the covariance maps of the remote estimator.

A sensor runs a steady-state Kalman filter on its own plant.  When it
transmits, the remote covariance resets to the filter's steady covariance
``P``; otherwise it is propagated by the prediction map ``h``.  Everything
downstream (costs, bounds, MDP rewards, duty-cycle curves) only needs the
trace sequence ``Tr[h^l(P)]``, which each :class:`SystemModel` memoizes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError, RiccatiError, UnstableSystemError

RICCATI_CONVENTIONS = ("standard", "transposed")

SYM_TOL = 1e-9
EIG_TOL = -1e-9
RANK_TOL = 1e-8


def _as_matrix(x, name):
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if m.ndim != 2:
        raise DimensionError(f"{name} must be a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ConfigError(f"{name} has non-finite entries")
    return m


def _symmetrize(x):
    return 0.5 * (x + x.T)


def _check_psd(m, name, definite=False):
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got {m.shape[0]}x{m.shape[1]}")
    scale = 1.0 + np.abs(m).max()
    if np.abs(m - m.T).max() > SYM_TOL * scale:
        raise ConfigError(f"{name} must be symmetric")
    eig = np.linalg.eigvalsh(_symmetrize(m))
    if definite and eig.min() <= 0.0:
        raise ConfigError(f"{name} must be positive definite")
    if eig.min() < EIG_TOL * scale:
        raise ConfigError(f"{name} must be positive semidefinite")


def _psd_sqrt(m):
    w, v = np.linalg.eigh(_symmetrize(m))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def _rank(m):
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def is_controllable(a, b):
    n = a.shape[0]
    blocks, cur = [], b
    for _ in range(n):
        blocks.append(cur)
        cur = a @ cur
    return _rank(np.hstack(blocks)) == n


def is_observable(a, c):
    return is_controllable(a.T, c.T)


def spectral_radius(a):
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def _riccati_step(a, c, q, r, p):
    x = _symmetrize(a @ p @ a.T + q)
    s = c @ x @ c.T + r
    return _symmetrize(x - x @ c.T @ np.linalg.solve(s, c @ x))


@dataclass(frozen=True, eq=False)
class SystemModel:
    """One plant/sensor pair ``x+ = A x + w``, ``y = C x + v``.

    ``riccati`` selects how the steady covariance is obtained.  ``"standard"``
    is the Kalman filter of ``(A, C)``.  ``"transposed"`` runs the same
    fixed-point iteration with ``A`` replaced by ``A.T``; the published
    example tables are reproduced only under this convention.  The
    prediction map ``h`` always uses ``A`` itself.
    """

    A: np.ndarray
    C: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    id: int = 1
    riccati: str = "standard"
    riccati_tol: float = 1e-12
    riccati_max_iter: int = 1_000_000
    check_assumptions: bool = True
    steady: np.ndarray = field(init=False, repr=False)
    rho: float = field(init=False)

    def __post_init__(self):
        name = f"system {self.id}"
        A = _as_matrix(self.A, f"{name}: A")
        C = _as_matrix(self.C, f"{name}: C")
        Q = _as_matrix(self.Q, f"{name}: Q")
        R = _as_matrix(self.R, f"{name}: R")
        n = A.shape[0]
        if A.shape[1] != n:
            raise DimensionError(f"{name}: A must be square, got {A.shape[0]}x{A.shape[1]}")
        if C.shape[1] != n:
            raise DimensionError(f"{name}: C has {C.shape[1]} columns, expected {n}")
        if Q.shape != (n, n):
            raise DimensionError(f"{name}: Q must be {n}x{n}, got {Q.shape[0]}x{Q.shape[1]}")
        m = C.shape[0]
        if R.shape != (m, m):
            raise DimensionError(f"{name}: R must be {m}x{m}, got {R.shape[0]}x{R.shape[1]}")
        _check_psd(Q, f"{name}: Q")
        _check_psd(R, f"{name}: R", definite=True)
        if self.riccati not in RICCATI_CONVENTIONS:
            raise ConfigError(f"{name}: unknown riccati convention {self.riccati!r}")

        for attr, val in (("A", A), ("C", C), ("Q", _symmetrize(Q)), ("R", _symmetrize(R))):
            val.setflags(write=False)
            object.__setattr__(self, attr, val)

        a_ric = A.T if self.riccati == "transposed" else A
        if self.check_assumptions:
            if not is_controllable(a_ric, _psd_sqrt(Q)):
                raise ConfigError(f"{name}: (A, sqrt(Q)) must be controllable")
            if not is_observable(a_ric, C):
                raise ConfigError(f"{name}: (A, C) must be observable")

        object.__setattr__(self, "rho", spectral_radius(A))
        object.__setattr__(self, "_lock", threading.Lock())
        object.__setattr__(self, "_powers", None)
        object.__setattr__(self, "_traces", None)
        steady = steady_state_covariance(self)
        steady.setflags(write=False)
        object.__setattr__(self, "steady", steady)

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def riccati_matrix(self):
        return self.A.T if self.riccati == "transposed" else self.A

    def _extend(self, upto):
        # caller holds the lock
        if self._powers is None:
            object.__setattr__(self, "_powers", [self.steady])
            object.__setattr__(self, "_traces", [float(np.trace(self.steady))])
        powers, traces = self._powers, self._traces
        with np.errstate(over="ignore", invalid="ignore"):
            while len(powers) <= upto:
                nxt = self.A @ powers[-1] @ self.A.T + self.Q
                powers.append(_symmetrize(nxt))
                traces.append(float(np.trace(nxt)))

    def power(self, ell):
        """``h^ell(P)`` as a matrix (memoized)."""
        with self._lock:
            self._extend(ell)
            return self._powers[ell]

    def powers(self, upto):
        """Stacked ``[h^0(P), ..., h^upto(P)]`` with shape ``(upto+1, d, d)``."""
        with self._lock:
            self._extend(upto)
            return np.array(self._powers[: upto + 1])

    def traces(self, upto):
        """Array ``[Tr h^0(P), ..., Tr h^upto(P)]`` (memoized)."""
        with self._lock:
            self._extend(upto)
            return np.array(self._traces[: upto + 1])


def _check_dim(sys, X):
    X = np.asarray(X, dtype=float)
    if X.shape != (sys.dim, sys.dim):
        raise DimensionError(f"expected a {sys.dim}x{sys.dim} matrix, got shape {X.shape}")
    return X


def h_map(sys, X):
    X = _check_dim(sys, X)
    return _symmetrize(sys.A @ X @ sys.A.T + sys.Q)


def g_map(sys, X):
    X = _check_dim(sys, X)
    S = sys.C @ X @ sys.C.T + sys.R
    return _symmetrize(X - X @ sys.C.T @ np.linalg.solve(S, sys.C @ X))


def steady_state_covariance(sys):
    """Fixed point of the Riccati map, iterated from ``P0 = Q``."""
    a = sys.riccati_matrix
    p = np.array(sys.Q, dtype=float)
    for _ in range(sys.riccati_max_iter):
        nxt = _riccati_step(a, sys.C, sys.Q, sys.R, p)
        if not np.all(np.isfinite(nxt)):
            break
        if np.linalg.norm(nxt - p) <= sys.riccati_tol * (1.0 + np.linalg.norm(p)):
            return nxt
        p = nxt
    raise RiccatiError(f"system {sys.id}: Riccati iteration did not converge")


def riccati_residual(sys):
    a = sys.riccati_matrix
    P = sys.steady
    return float(np.linalg.norm(P - _riccati_step(a, sys.C, sys.Q, sys.R, P)))


def trace_of_power(sys, ell):
    if ell < 0:
        raise ValueError("power must be nonnegative")
    return float(sys.traces(ell)[ell])


def lyapunov_solution(sys, tol=1e-12, max_terms=10_000_000):
    """Solution of ``X = A X A^T + Q`` by summing ``A^k Q A^kT``."""
    if sys.rho >= 1.0:
        raise UnstableSystemError(f"system {sys.id}: spectral radius {sys.rho:.6g} >= 1")
    term = np.array(sys.Q, dtype=float)
    total = term.copy()
    for _ in range(max_terms):
        term = sys.A @ term @ sys.A.T
        total += term
        if np.linalg.norm(term) < tol:
            return _symmetrize(total)
    raise UnstableSystemError(f"system {sys.id}: Lyapunov series did not converge")


def never_scheduled_check(systems, i, ell_max):
    """True if sensor ``i`` (1-based) loses to every other sensor at all lags.

    Checks ``Tr[h_j^l(h_j(P_j) - P_j)] >= Tr[X_i - P_i]`` for every
    ``j != i`` and ``l = 0..ell_max``, where ``X_i`` is the Lyapunov
    solution of the stable system ``i``.
    """
    si = systems[i - 1]
    rhs = float(np.trace(lyapunov_solution(si) - si.steady))
    for j, sj in enumerate(systems, start=1):
        if j == i:
            continue
        x = h_map(sj, sj.steady) - sj.steady
        for _ in range(ell_max + 1):
            if np.trace(x) < rhs:
                return False
            x = h_map(sj, x)
    return True
