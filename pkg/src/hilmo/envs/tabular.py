"""Tabular fixtures for the exact solvers, plus a trainable corridor wrapper.

The corridor is a 1D T-maze: a hidden goal side (left/right) is revealed
only at a designated oracle cell, the correct exit pays +1 and the wrong
one -1.  The fork fixture is a single decision state with three actions
whose transitions are stochastic at a configurable level; it reproduces
the regime where a goal-reaching bottom criterion is indifferent between
actions (high stochasticity) or discriminates them (low stochasticity).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..momdp import TabularMobMomdp

# Corridor x-state layout: [exit_left, cell_0 .. cell_{n-1}, exit_right, absorb]
LEFT, STAY, RIGHT = 0, 1, 2
Z_NULL = 2  # corridor observation when outside the oracle cell


def corridor_states(n: int) -> dict:
    return {
        "exit_left": 0,
        "first_cell": 1,
        "last_cell": n,
        "exit_right": n + 1,
        "absorb": n + 2,
        "nx": n + 3,
    }


def make_tabular_corridor(n: int, oracle_cell: int | None = None,
                          start_cell: int | None = None,
                          gamma: float = 0.99) -> TabularMobMomdp:
    """Corridor of n cells with hidden goal side and one revealing cell.

    ``oracle_cell`` and ``start_cell`` are cell offsets in [0, n); both
    default to the center.  y=0 means the left exit pays +1, y=1 the right.
    """
    if n < 3:
        raise DomainError("corridor needs at least 3 cells")
    lay = corridor_states(n)
    nx, na, ny, nz = lay["nx"], 3, 2, 3
    if oracle_cell is None:
        oracle_cell = (n - 1) // 2
    if start_cell is None:
        start_cell = (n - 1) // 2
    if not (0 <= oracle_cell < n and 0 <= start_cell < n):
        raise DomainError("oracle/start cells must lie inside the corridor")

    tx = np.zeros((nx, na, nx))
    for cell in range(n):
        x = lay["first_cell"] + cell
        tx[x, LEFT, x - 1] = 1.0
        tx[x, STAY, x] = 1.0
        tx[x, RIGHT, x + 1] = 1.0
    for x in (lay["exit_left"], lay["exit_right"], lay["absorb"]):
        tx[x, :, lay["absorb"]] = 1.0

    # y never changes within an episode
    ty = np.zeros((nx, ny, nx, ny))
    for y in range(ny):
        ty[:, y, :, y] = 1.0

    obs = np.zeros((nx, ny, nz))
    obs[:, :, Z_NULL] = 1.0
    ox = lay["first_cell"] + oracle_cell
    obs[ox, :, Z_NULL] = 0.0
    obs[ox, 0, 0] = 1.0
    obs[ox, 1, 1] = 1.0

    rewards = np.zeros((nx, ny))
    rewards[lay["exit_left"], 0] = 1.0
    rewards[lay["exit_left"], 1] = -1.0
    rewards[lay["exit_right"], 1] = 1.0
    rewards[lay["exit_right"], 0] = -1.0

    initial = np.zeros((nx, ny))
    initial[lay["first_cell"] + start_cell, :] = 0.5

    return TabularMobMomdp(tx=tx, ty=ty, obs=obs, rewards=rewards,
                           gamma=gamma, initial=initial)


def make_stochastic_fork(variant: str) -> TabularMobMomdp:
    """One decision state, three actions, probabilities 0.5/0.5 or 0.95/0.05.

    States: [start, s1, s2, s3] with rewards (0, +1, +1, -1); action i
    lands on s_{i+1} with probability p and on the cyclically next target
    with 1-p.  Successors are absorbing.
    """
    if variant not in ("high", "low"):
        raise DomainError("variant must be 'high' or 'low'")
    p = 0.5 if variant == "high" else 0.95
    nx, na, ny, nz = 4, 3, 1, 1
    tx = np.zeros((nx, na, nx))
    # a1: s1/s2, a2: s2/s3, a3: s3/s1
    tx[0, 0, 1], tx[0, 0, 2] = p, 1.0 - p
    tx[0, 1, 2], tx[0, 1, 3] = p, 1.0 - p
    tx[0, 2, 3], tx[0, 2, 1] = p, 1.0 - p
    for x in (1, 2, 3):
        tx[x, :, x] = 1.0
    ty = np.ones((nx, ny, nx, ny))
    obs = np.ones((nx, ny, nz))
    rewards = np.array([[0.0], [1.0], [1.0], [-1.0]])
    initial = np.zeros((nx, ny))
    initial[0, 0] = 1.0
    return TabularMobMomdp(tx=tx, ty=ty, obs=obs, rewards=rewards,
                           gamma=0.99, initial=initial)


class TabularCorridorEnv:
    """Continuous-action wrapper around the corridor model.

    Observation: (x_position, side_signal) with x scaled to [-1, 1] and
    side_signal in {-1, 0, +1} (nonzero only at the oracle cell).  The 1D
    action is thresholded into left / stay / right.  Terminal on reaching
    an exit; capped at ``horizon`` steps by the caller's bookkeeping.
    """

    name = "corridor"

    def __init__(self, n: int = 5, horizon: int = 40, oracle_cell: int | None = None,
                 start_cell: int | None = None):
        self.model = make_tabular_corridor(n, oracle_cell=oracle_cell, start_cell=start_cell)
        self.n = n
        self.lay = corridor_states(n)
        self.horizon = horizon
        self.action_dim = 1
        self.obs_dim = 2
        self.x_dim = 1
        self.goal_dim = 1
        self.goal_mask = np.array([0])
        self.goal_low = np.array([-1.0])
        self.goal_high = np.array([1.0])
        self._x = 0
        self._y = 0
        self._t = 0

    def _pos(self, x: int) -> float:
        # exits and cells spread evenly over [-1, 1]; absorb parked at exit pos
        if x == self.lay["absorb"]:
            x = self.lay["exit_right"]
        return -1.0 + 2.0 * x / (self.n + 1)

    def _obs(self) -> np.ndarray:
        lay = self.lay
        signal = 0.0
        cell = self._x - lay["first_cell"]
        if 0 <= cell < self.n and self.model.obs[self._x, self._y, Z_NULL] == 0.0:
            signal = -1.0 if self._y == 0 else 1.0
        return np.array([self._pos(self._x), signal])

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(2)
        flat = int(np.searchsorted(np.cumsum(self.model.initial.ravel()), u[0], side="right"))
        flat = min(flat, self.model.nx * self.model.ny - 1)
        self._x, self._y = divmod(flat, self.model.ny)
        self._t = 0
        return self._obs()

    def step(self, action: np.ndarray, rng: np.random.Generator):
        a = float(np.asarray(action).ravel()[0])
        move = LEFT if a < -1.0 / 3.0 else (RIGHT if a > 1.0 / 3.0 else STAY)
        self._x = int(np.argmax(self.model.tx[self._x, move]))
        self._t += 1
        reward = float(self.model.rewards[self._x, self._y])
        done = self._x in (self.lay["exit_left"], self.lay["exit_right"]) or self._t >= self.horizon
        return self._obs(), reward, done, {}
