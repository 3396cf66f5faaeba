"""Exact solvers for small tabular mixed-observability models.

``solve_history_vi`` computes the value of the best history-dependent
policy by finite-horizon backward induction over the reachable set of
(x, belief-over-y) nodes.  ``best_hilmo_value`` computes the value of the
best two-level policy formed by a history-dependent goal selector on top
of a memoryless goal-reaching bottom policy.  For deterministic models at
k=1 the two agree, which is the numerically checkable core of the
hierarchy-optimality argument.

Value convention: a reward is collected on arrival and discounted by the
arrival time, V = E[sum_{t>=1} gamma^t R(s_t)].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, DomainError, ResourceLimitError
from .momdp import StatePair, TabularMobMomdp, sample_index, sample_initial, step_tabular

_BELIEF_DECIMALS = 12
_PRUNE = 1e-15


def depth_for(gamma: float, tol: float = 1e-6) -> int:
    """Smallest horizon D with gamma^D < tol."""
    if gamma <= 0.0:
        return 1
    return max(1, int(np.ceil(np.log(tol) / np.log(gamma))))


def _belief_key(x: int, b: np.ndarray) -> bytes:
    return int(x).to_bytes(4, "little") + np.round(b, _BELIEF_DECIMALS).tobytes()


class _NodeSet:
    """Reachable (x, belief) nodes with stable integer ids."""

    def __init__(self, max_nodes: int):
        self.max_nodes = max_nodes
        self.xs: list[int] = []
        self.beliefs: list[np.ndarray] = []
        self._index: dict[bytes, int] = {}

    def intern(self, x: int, b: np.ndarray) -> int:
        key = _belief_key(x, b)
        idx = self._index.get(key)
        if idx is None:
            if len(self.xs) >= self.max_nodes:
                raise ResourceLimitError(
                    f"belief-node enumeration exceeded the guard of {self.max_nodes}")
            idx = len(self.xs)
            self._index[key] = idx
            self.xs.append(int(x))
            self.beliefs.append(np.asarray(b, dtype=np.float64))
        return idx

    def lookup(self, x: int, b: np.ndarray) -> int:
        return self._index[_belief_key(x, b)]

    def __len__(self) -> int:
        return len(self.xs)


def _posterior(model: TabularMobMomdp, x: int, b: np.ndarray, x2: int):
    """Predictive y' distribution after moving x -> x2, and the per-z
    posteriors: returns (q, [(z, p_z, b_z), ...])."""
    q = b @ model.ty[x, :, x2, :]
    branches = []
    for z in range(model.nz):
        pz = float(q @ model.obs[x2, :, z])
        if pz > _PRUNE:
            branches.append((z, pz, (q * model.obs[x2, :, z]) / pz))
    return q, branches


def _initial_nodes(model: TabularMobMomdp, nodes: _NodeSet):
    """Distribution over nodes after the very first observation."""
    out = []
    px = model.initial.sum(axis=1)
    for x in range(model.nx):
        if px[x] <= _PRUNE:
            continue
        b = model.initial[x] / px[x]
        for z in range(model.nz):
            pz = float(b @ model.obs[x, :, z])
            if pz <= _PRUNE:
                continue
            post = (b * model.obs[x, :, z]) / pz
            out.append((float(px[x] * pz), nodes.intern(x, post), x, z))
    return out


class _ChoiceVI:
    """Finite-horizon VI over nodes with grouped choices.

    Choices for one node are contiguous; each has an immediate expected
    reward and a sparse successor distribution over nodes.
    """

    def __init__(self, ptr: np.ndarray, imm: np.ndarray, trans: sp.csr_matrix, gamma: float):
        self.ptr = ptr
        self.imm = imm
        self.trans = trans
        self.gamma = gamma
        self.n_nodes = len(ptr) - 1
        self.n_choices = len(imm)

    def solve(self, depth: int):
        """Returns (values with full depth remaining, per-sweep argmax table).

        args_by_remaining[s-1][node] is the winning global choice index
        when s steps remain.
        """
        starts = self.ptr[:-1]
        sizes = np.diff(self.ptr)
        order = np.arange(self.n_choices)
        v = np.zeros(self.n_nodes)
        args = np.zeros((depth, self.n_nodes), dtype=np.int32)
        for s in range(1, depth + 1):
            q = self.gamma * (self.imm + self.trans @ v)
            vmax = np.maximum.reduceat(q, starts)
            winner_mask = q >= np.repeat(vmax, sizes)
            args[s - 1] = np.minimum.reduceat(
                np.where(winner_mask, order, self.n_choices), starts)
            v = vmax
        return v, args


@dataclass
class HistoryPolicy:
    """Optimal (time-dependent) policy over action-observation histories.

    Answers any reachable truncated history up to the solve depth; the
    session API tracks the belief node online for rollouts.
    """

    model: TabularMobMomdp
    depth: int
    gamma: float
    _nodes: _NodeSet
    _args: np.ndarray              # (depth, n_nodes) global choice ids
    _choice_action: np.ndarray     # choice id -> action id
    values: np.ndarray = field(default=None)

    def begin(self, x0: int, z0: int) -> tuple[int, int]:
        px = self.model.initial[x0].sum()
        if px <= _PRUNE:
            raise DomainError(f"x0={x0} has zero initial probability")
        b = self.model.initial[x0] / px
        pz = float(b @ self.model.obs[x0, :, z0])
        if pz <= _PRUNE:
            raise DomainError(f"observation z0={z0} impossible at x0={x0}")
        post = (b * self.model.obs[x0, :, z0]) / pz
        return (self._nodes.lookup(x0, post), 0)

    def act(self, state: tuple[int, int]) -> int:
        node, t = state
        remaining = self.depth - t
        if remaining <= 0:
            return 0
        return int(self._choice_action[self._args[remaining - 1][node]])

    def observe(self, state: tuple[int, int], x2: int, z2: int) -> tuple[int, int]:
        node, t = state
        x = self._nodes.xs[node]
        b = self._nodes.beliefs[node]
        q = b @ self.model.ty[x, :, x2, :]
        pz = float(q @ self.model.obs[x2, :, z2])
        if pz <= _PRUNE:
            raise DomainError("observation inconsistent with the model")
        post = (q * self.model.obs[x2, :, z2]) / pz
        return (self._nodes.lookup(x2, post), t + 1)

    def action_for(self, history) -> int:
        """history = [(x0, z0), a0, (x1, z1), a1, ..., (xt, zt)]."""
        state = self.begin(*history[0])
        for item in history[1:]:
            if isinstance(item, tuple):
                state = self.observe(state, *item)
        return self.act(state)

    def n_nodes(self) -> int:
        return len(self._nodes)


def _enumerate_history_nodes(model: TabularMobMomdp, max_nodes: int):
    """Forward closure of reachable belief nodes plus per-(node, action)
    immediate rewards and successor lists."""
    nodes = _NodeSet(max_nodes)
    init = _initial_nodes(model, nodes)
    imm_rows: list[list[float]] = []
    succ_rows: list[list[list[tuple[float, int]]]] = []
    frontier = list(range(len(nodes)))
    while frontier:
        new_frontier = []
        for idx in frontier:
            x = nodes.xs[idx]
            b = nodes.beliefs[idx]
            per_action_imm = []
            per_action_succ = []
            for a in range(model.na):
                imm = 0.0
                succ: list[tuple[float, int]] = []
                for x2 in range(model.nx):
                    p_move = float(model.tx[x, a, x2])
                    if p_move <= _PRUNE:
                        continue
                    q, branches = _posterior(model, x, b, x2)
                    imm += p_move * float(q @ model.rewards[x2])
                    for _z, pz, post in branches:
                        before = len(nodes)
                        j = nodes.intern(x2, post)
                        if len(nodes) > before:
                            new_frontier.append(j)
                        succ.append((p_move * pz, j))
                per_action_imm.append(imm)
                per_action_succ.append(succ)
            while len(imm_rows) <= idx:
                imm_rows.append(None)
                succ_rows.append(None)
            imm_rows[idx] = per_action_imm
            succ_rows[idx] = per_action_succ
        frontier = new_frontier
    return nodes, init, imm_rows, succ_rows


def _build_vi(model, nodes, imm_rows, succ_rows, gamma):
    n = len(nodes)
    ptr = [0]
    imm = []
    choice_action = []
    rows, cols, vals = [], [], []
    for idx in range(n):
        for a in range(model.na):
            c = len(imm)
            imm.append(imm_rows[idx][a])
            choice_action.append(a)
            for w, j in succ_rows[idx][a]:
                rows.append(c)
                cols.append(j)
                vals.append(w)
        ptr.append(len(imm))
    trans = sp.csr_matrix((vals, (rows, cols)), shape=(len(imm), n))
    vi = _ChoiceVI(np.asarray(ptr), np.asarray(imm), trans, gamma)
    return vi, np.asarray(choice_action, dtype=np.int64)


def solve_history_vi(model: TabularMobMomdp, depth: int, gamma: float,
                     max_nodes: int = 1_000_000) -> tuple[float, HistoryPolicy]:
    """Exact value of the best history-dependent policy over ``depth`` steps."""
    nodes, init, imm_rows, succ_rows = _enumerate_history_nodes(model, max_nodes)
    vi, choice_action = _build_vi(model, nodes, imm_rows, succ_rows, gamma)
    values, args = vi.solve(depth)
    value = float(sum(p * values[i] for p, i, _x, _z in init))
    policy = HistoryPolicy(model=model, depth=depth, gamma=gamma, _nodes=nodes,
                           _args=args, _choice_action=choice_action, values=values)
    return value, policy


# ---------------------------------------------------------------------------
# Bottom-level goal reacher and the best two-level policy
# ---------------------------------------------------------------------------

def reach_policy(model: TabularMobMomdp, gamma: float, tol: float = 1e-13,
                 max_iter: int = 100_000) -> np.ndarray:
    """Goal-reaching bottom policy: bottom[x, g] maximizes the discounted
    sum of -1[x' != g] step rewards (a stochastic shortest path reacher).

    Ties break toward the lowest action index.
    """
    nx, na = model.nx, model.na
    bottom = np.zeros((nx, nx), dtype=np.int64)
    for g in range(nx):
        cost = -np.ones(nx)
        cost[g] = 0.0
        v = np.zeros(nx)
        for _ in range(max_iter):
            q = np.einsum("xaX,X->xa", model.tx, cost + gamma * v)
            v_new = q.max(axis=1)
            v_new[g] = 0.0
            if np.max(np.abs(v_new - v)) < tol:
                v = v_new
                break
            v = v_new
        q = np.einsum("xaX,X->xa", model.tx, cost + gamma * v)
        bottom[:, g] = np.argmax(q, axis=1)
    return bottom


@dataclass
class HilmoTabularPolicy:
    """History-dependent goal selector over a memoryless goal reacher."""

    top: HistoryPolicy          # over the goal-induced model; actions are x indices
    bottom: np.ndarray          # (nx, nx) action table indexed by (x, goal)
    k: int = 1


def induced_goal_model(model: TabularMobMomdp, bottom: np.ndarray) -> TabularMobMomdp:
    """Top-level model whose action g executes one bottom step toward g."""
    nx = model.nx
    tx_top = np.empty((nx, nx, nx))
    for g in range(nx):
        tx_top[:, g, :] = model.tx[np.arange(nx), bottom[:, g], :]
    return TabularMobMomdp(tx=tx_top, ty=model.ty, obs=model.obs,
                           rewards=model.rewards, gamma=model.gamma,
                           initial=model.initial)


def best_hilmo_value(model: TabularMobMomdp, depth: int, gamma: float, k: int = 1,
                     max_nodes: int = 1_000_000) -> tuple[float, HilmoTabularPolicy]:
    """Value of the best goal-over-reacher policy, in primitive-time discounting.

    The bottom policy is the reach-maximizing table from ``reach_policy``.
    For k=1 the top re-decides every primitive step and the value is the
    exact optimum over history-dependent goal selectors; for k>1 the top
    commits to each goal for up to k primitive steps (early release on
    arrival) and the same enumeration applies to the committed process.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    bottom = reach_policy(model, gamma)
    if k == 1:
        top_model = induced_goal_model(model, bottom)
        value, top_policy = solve_history_vi(top_model, depth, gamma, max_nodes=max_nodes)
        return value, HilmoTabularPolicy(top=top_policy, bottom=bottom, k=1)
    value = _committed_value(model, bottom, depth, gamma, k, max_nodes)
    top_model = induced_goal_model(model, bottom)
    _, top_policy = solve_history_vi(top_model, depth, gamma, max_nodes=max_nodes)
    return value, HilmoTabularPolicy(top=top_policy, bottom=bottom, k=k)


def _committed_value(model, bottom, depth, gamma, k, max_nodes):
    """VI over (x, belief, committed goal, steps left in the commitment)."""
    nodes = _NodeSet(max_nodes)
    # extended id = node id * (k phases) + phase; phase 0 = free to choose
    phases: dict[tuple[int, int, int], int] = {}
    ext_nodes: list[tuple[int, int, int]] = []  # (node, goal, remaining)

    def ext(node: int, goal: int, remaining: int) -> int:
        key = (node, goal, remaining)
        idx = phases.get(key)
        if idx is None:
            if len(ext_nodes) >= max_nodes:
                raise ResourceLimitError("committed-policy enumeration guard exceeded")
            idx = len(ext_nodes)
            phases[key] = idx
            ext_nodes.append(key)
        return idx

    init = _initial_nodes(model, nodes)
    init_ext = [(p, ext(i, -1, 0)) for p, i, _x, _z in init]

    imm_list: list[float] = []
    succ_list: list[list[tuple[float, int]]] = []
    ptr = [0]
    done = 0
    while done < len(ext_nodes):
        node, goal, remaining = ext_nodes[done]
        x = nodes.xs[node]
        b = nodes.beliefs[node]
        goals = range(model.nx) if remaining == 0 else [goal]
        for g in goals:
            a = int(bottom[x, g])
            rem = k if remaining == 0 else remaining
            imm = 0.0
            succ = []
            for x2 in range(model.nx):
                p_move = float(model.tx[x, a, x2])
                if p_move <= _PRUNE:
                    continue
                q, branches = _posterior(model, x, b, x2)
                imm += p_move * float(q @ model.rewards[x2])
                release = (x2 == g) or (rem == 1)
                for _z, pz, post in branches:
                    j = nodes.intern(x2, post)
                    tgt = ext(j, -1, 0) if release else ext(j, g, rem - 1)
                    succ.append((p_move * pz, tgt))
            imm_list.append(imm)
            succ_list.append(succ)
        ptr.append(len(imm_list))
        done += 1

    rows, cols, vals = [], [], []
    for c, succ in enumerate(succ_list):
        for w, j in succ:
            rows.append(c)
            cols.append(j)
            vals.append(w)
    trans = sp.csr_matrix((vals, (rows, cols)), shape=(len(imm_list), len(ext_nodes)))
    vi = _ChoiceVI(np.asarray(ptr), np.asarray(imm_list), trans, gamma)
    values, _args = vi.solve(depth)
    return float(sum(p * values[i] for p, i in init_ext))


# ---------------------------------------------------------------------------
# Multi-time model of a bottom rollout
# ---------------------------------------------------------------------------

def multi_time_model(model: TabularMobMomdp, bottom: np.ndarray, goal: int, k: int,
                     include_timeout: bool = True) -> np.ndarray:
    """Exact termination-state table T(s, goal, s') for a k-step rollout.

    The bottom runs its reacher toward ``goal`` and terminates on arrival;
    with ``include_timeout`` the state at step k is recorded for rollouts
    that never arrive (rows then sum to 1), otherwise that mass is dropped.
    Rows/columns use flattened indices s = x * ny + y.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    nx, ny = model.nx, model.ny
    pol_step = np.empty((nx, ny, nx, ny))
    for x in range(nx):
        a = int(bottom[x, goal])
        pol_step[x] = model.tx[x, a][None, :, None] * model.ty[x]
    ns = nx * ny
    table = np.zeros((ns, ns))
    for x0 in range(nx):
        for y0 in range(ny):
            active = np.zeros((nx, ny))
            active[x0, y0] = 1.0
            out = np.zeros((nx, ny))
            for m in range(1, k + 1):
                nxt = np.tensordot(active, pol_step, axes=([0, 1], [0, 1]))
                out[goal, :] += nxt[goal, :]
                nxt[goal, :] = 0.0
                if m == k and include_timeout:
                    out += nxt
                    nxt = np.zeros_like(nxt)
                active = nxt
            table[x0 * ny + y0] = out.ravel()
    return table


def simulate_rollout_frequencies(model: TabularMobMomdp, bottom: np.ndarray, goal: int,
                                 k: int, start: tuple[int, int], n: int,
                                 rng: np.random.Generator) -> np.ndarray:
    """Monte Carlo end-state frequencies matching ``multi_time_model`` rows."""
    nx, ny = model.nx, model.ny
    cum_tx = np.cumsum(model.tx, axis=-1)
    cum_ty = np.cumsum(model.ty, axis=-1)
    xs = np.full(n, start[0], dtype=np.int64)
    ys = np.full(n, start[1], dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    for _m in range(k):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        acts = bottom[xs[idx], goal]
        u1 = rng.random(idx.size)
        rows = cum_tx[xs[idx], acts]
        x2 = (rows < u1[:, None]).sum(axis=1)
        u2 = rng.random(idx.size)
        rows_y = cum_ty[xs[idx], ys[idx], x2]
        y2 = (rows_y < u2[:, None]).sum(axis=1)
        xs[idx] = x2
        ys[idx] = y2
        alive[idx] = x2 != goal
    counts = np.bincount(xs * ny + ys, minlength=nx * ny)
    return counts / float(n)


# ---------------------------------------------------------------------------
# Monte Carlo rollout values for cross-checking solver outputs
# ---------------------------------------------------------------------------

def rollout_history_policy(model: TabularMobMomdp, policy: HistoryPolicy,
                           rng: np.random.Generator, horizon: int | None = None) -> float:
    """One discounted-return sample following a HistoryPolicy."""
    horizon = policy.depth if horizon is None else horizon
    stop_mask = model.absorbing_zero_states()
    state, obs = sample_initial(model, rng)
    ps = policy.begin(int(obs.x), int(obs.z))
    ret, disc = 0.0, 1.0
    for _t in range(horizon):
        if stop_mask[int(state.x)]:
            break
        a = policy.act(ps)
        state, obs, r = step_tabular(model, state, a, rng)
        disc *= policy.gamma
        ret += disc * r
        ps = policy.observe(ps, int(obs.x), int(obs.z))
    return ret


def rollout_hilmo_policy(model: TabularMobMomdp, policy: HilmoTabularPolicy,
                         rng: np.random.Generator, gamma: float,
                         horizon: int | None = None) -> float:
    """One discounted-return sample following a two-level tabular policy (k=1)."""
    if policy.k != 1:
        raise DomainError("rollout check supports k=1 policies")
    horizon = policy.top.depth if horizon is None else horizon
    stop_mask = model.absorbing_zero_states()
    state, obs = sample_initial(model, rng)
    ps = policy.top.begin(int(obs.x), int(obs.z))
    ret, disc = 0.0, 1.0
    for _t in range(horizon):
        if stop_mask[int(state.x)]:
            break
        goal = policy.top.act(ps)
        a = int(policy.bottom[int(state.x), goal])
        state, obs, r = step_tabular(model, state, a, rng)
        disc *= gamma
        ret += disc * r
        ps = policy.top.observe(ps, int(obs.x), int(obs.z))
    return ret
