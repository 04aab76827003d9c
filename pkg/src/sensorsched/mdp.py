"""Average-reward MDP over the counter vectors and its exact solution.

A state is the vector of slots elapsed since each sensor last transmitted
(the sensor that just transmitted reads 1).  Transitions are deterministic,
so a stationary policy is a functional graph and its gain is the mean
reward of the cycle it falls into.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelError, NoConvergence, StateSpaceOverflow
from .schedule import Schedule

STATE_CAP = 5_000_000
MAX_ITER = 10_000


@dataclass(frozen=True)
class MdpModel:
    states: tuple  # counter tuples
    succ: np.ndarray  # (S, n) successor index, -1 where the action is not allowed
    reward: np.ndarray  # (S,)
    bounds: tuple
    start: int = 0

    @property
    def n_states(self):
        return len(self.states)

    def allowable(self, s):
        return [a + 1 for a in np.flatnonzero(self.succ[s] >= 0)]


@dataclass(frozen=True)
class MdpSolution:
    gain: float
    bias: np.ndarray
    policy: np.ndarray  # 0-based action per state
    cycle: tuple  # state indices around the recurrent cycle from the start state
    schedule: Schedule
    iterations: int

    @property
    def cost(self):
        return -self.gain


def _step(v, a):
    return tuple(1 if k == a else x + 1 for k, x in enumerate(v))


def build_mdp(systems, bounds, cap=STATE_CAP):
    """Enumerate states reachable from ``(1, 2, ..., n)`` under the bounds.

    States left without any allowable action are pruned (repeatedly, since
    pruning can strand their predecessors); they can never lie on an
    infinite trajectory.
    """
    n = len(systems)
    if n < 2:
        raise DomainError("the scheduling MDP needs at least two sensors")
    delta = tuple(int(b) for b in getattr(bounds, "per_sensor", bounds))
    if len(delta) != n:
        raise DomainError(f"{len(delta)} bounds for {n} systems")

    start = tuple(range(1, n + 1))
    if any(v > d for v, d in zip(start, delta)):
        raise DomainError("start state violates the off-duty bounds")
    index = {start: 0}
    states = [start]
    edges = []
    stack = [start]
    while stack:
        v = stack.pop()
        row = []
        for a in range(n):
            w = _step(v, a)
            if any(x > d for x, d in zip(w, delta)):
                row.append(None)
                continue
            if w not in index:
                if len(states) >= cap:
                    raise StateSpaceOverflow(f"more than {cap} MDP states")
                index[w] = len(states)
                states.append(w)
                stack.append(w)
            row.append(w)
        edges.append((v, row))

    S = len(states)
    succ = np.full((S, n), -1, dtype=np.int64)
    for v, row in edges:
        s = index[v]
        for a, w in enumerate(row):
            if w is not None:
                succ[s, a] = index[w]

    alive = _prune_dead_ends(succ)
    if not alive[0]:
        raise ModelError("no infinite schedule satisfies the off-duty bounds")
    keep = np.flatnonzero(alive)
    remap = np.full(S, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    sub = succ[keep]
    sub = np.where(sub >= 0, remap[np.maximum(sub, 0)], -1)
    kept_states = tuple(states[k] for k in keep)

    tables = [sys.traces(d) for sys, d in zip(systems, delta)]
    reward = np.array([-sum(t[x - 1] for t, x in zip(tables, v)) for v in kept_states])
    return MdpModel(kept_states, sub, reward, delta, start=0)


def _prune_dead_ends(succ):
    S = succ.shape[0]
    alive = np.ones(S, dtype=bool)
    preds = [[] for _ in range(S)]
    out = np.zeros(S, dtype=np.int64)
    for s in range(S):
        for t in succ[s]:
            if t >= 0:
                preds[t].append(s)
                out[s] += 1
    queue = deque(np.flatnonzero(out == 0).tolist())
    while queue:
        s = queue.popleft()
        if not alive[s]:
            continue
        alive[s] = False
        for p in preds[s]:
            out[p] -= 1
            if out[p] == 0 and alive[p]:
                queue.append(p)
    return alive


def _reach(adj, root, S):
    seen = np.zeros(S, dtype=bool)
    seen[root] = True
    stack = [root]
    while stack:
        s = stack.pop()
        for t in adj[s]:
            if not seen[t]:
                seen[t] = True
                stack.append(t)
    return seen


def is_communicating(model):
    S = model.n_states
    fwd = [[t for t in row if t >= 0] for row in model.succ.tolist()]
    bwd = [[] for _ in range(S)]
    for s, row in enumerate(fwd):
        for t in row:
            bwd[t].append(s)
    return bool(_reach(fwd, model.start, S).all() and _reach(bwd, model.start, S).all())


def _evaluate(nxt, r):
    """Gain and bias of the functional graph ``s -> nxt[s]``."""
    S = nxt.size
    gain = np.empty(S)
    bias = np.empty(S)
    state = np.zeros(S, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    for s0 in range(S):
        if state[s0]:
            continue
        path = []
        s = s0
        while state[s] == 0:
            state[s] = 1
            path.append(s)
            s = nxt[s]
        if state[s] == 1:
            k = path.index(s)
            cyc = path[k:]
            g = float(np.mean(r[cyc]))
            h = np.empty(len(cyc))
            h[0] = 0.0
            for m in range(1, len(cyc)):
                h[m] = h[m - 1] - r[cyc[m - 1]] + g
            h -= h.mean()
            gain[cyc] = g
            bias[cyc] = h
            state[cyc] = 2
            path = path[:k]
        for u in reversed(path):
            v = nxt[u]
            gain[u] = gain[v]
            bias[u] = r[u] - gain[v] + bias[v]
            state[u] = 2
    return gain, bias


def _lowest_within(vals, target, tol):
    return int(np.flatnonzero(vals >= target - tol)[0])


def solve_average_reward(model, max_iter=MAX_ITER):
    """Howard policy iteration specialised to deterministic transitions."""
    if not is_communicating(model):
        raise ModelError("MDP state graph is not strongly connected")
    succ, r = model.succ, model.reward
    S, n = succ.shape
    tol = 1e-12 * (1.0 + float(np.abs(r).max()))
    policy = np.array([int(np.flatnonzero(row >= 0)[0]) for row in succ])
    rows = np.arange(S)
    for it in range(1, max_iter + 1):
        nxt = succ[rows, policy]
        gain, bias = _evaluate(nxt, r)
        valid = succ >= 0
        g_next = np.where(valid, gain[np.maximum(succ, 0)], -np.inf)
        h_next = np.where(valid, bias[np.maximum(succ, 0)], -np.inf)
        new = policy.copy()
        changed = False
        for s in range(S):
            g_best = g_next[s].max()
            if g_best > gain[s] + tol:
                new[s] = _lowest_within(g_next[s], g_best, tol)
                changed = True
                continue
            cand = np.where(g_next[s] >= gain[s] - tol, h_next[s], -np.inf)
            h_best = cand.max()
            if h_best > h_next[s, policy[s]] + tol:
                new[s] = _lowest_within(cand, h_best, tol)
                changed = True
        if not changed:
            return _finish(model, policy, gain, bias, it)
        policy = new
    raise NoConvergence(f"policy iteration did not converge in {max_iter} iterations")


def _cycle_from(succ, policy, s):
    seen = {}
    order = []
    while s not in seen:
        seen[s] = len(order)
        order.append(s)
        s = int(succ[s, policy[s]])
    return order[seen[s]:]


def _finish(model, policy, gain, bias, iterations):
    cyc = _cycle_from(model.succ, policy, model.start)
    slots = tuple(int(policy[s]) + 1 for s in cyc)
    g = float(gain[model.start])
    if np.ptp(gain) > 1e-9 * (1.0 + abs(g)):
        raise ModelError("optimal gain differs between states")
    return MdpSolution(g, bias, policy, tuple(cyc), Schedule(slots), iterations)


def extract_schedule(solution, model=None, state=None):
    """Action sequence around the cycle reached from ``state`` (default: start)."""
    if model is None or state is None:
        return solution.schedule
    cyc = _cycle_from(model.succ, solution.policy, state)
    return Schedule(tuple(int(solution.policy[s]) + 1 for s in cyc))


def optimality_residual(model, solution):
    """``max |r + max_a h(succ) - g - h|`` over all states."""
    succ = model.succ
    h_next = np.where(succ >= 0, solution.bias[np.maximum(succ, 0)], -np.inf)
    lhs = model.reward + h_next.max(axis=1) - solution.gain
    return float(np.abs(lhs - solution.bias).max())
