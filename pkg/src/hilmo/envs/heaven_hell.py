"""Point-mass T-maze with a side-revealing zone.

Heaven sits at the left or right end of the top bar; the side is hidden
except inside a disc on the way up.  Reaching heaven pays +1, hell -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEFT, RIGHT = 0, 1


@dataclass
class HeavenHellState:
    agent_pos: np.ndarray  # (2,)
    heaven_side: int       # LEFT | RIGHT

    def in_oracle_zone(self, center: np.ndarray, radius: float) -> bool:
        return float(np.linalg.norm(self.agent_pos - center)) < radius


class HeavenHellEnv:
    name = "heaven-hell"
    default_k = 10
    default_epsilon = 0.1

    corridor_half_width = 0.15
    corridor_top = 1.0
    bar_half_length = 0.75
    bar_half_width = 0.15

    def __init__(self, horizon: int = 200, speed: float = 0.05,
                 zone_center=(0.0, 0.25), zone_radius: float = 0.2,
                 goal_radius: float = 0.12, arm_x: float = 0.6,
                 success_reward: float = 1.0, failure_penalty: float = -1.0):
        self.horizon = horizon
        self.speed = speed
        self.zone_center = np.asarray(zone_center, dtype=np.float64)
        self.zone_radius = zone_radius
        self.goal_radius = goal_radius
        self.arm_x = arm_x
        self.success_reward = success_reward
        self.failure_penalty = failure_penalty
        self.action_dim = 2
        self.obs_dim = 3
        self.x_dim = 2
        self.goal_dim = 2
        self.goal_mask = np.array([0, 1])
        self.goal_low = np.array([-0.75, 0.0])
        self.goal_high = np.array([0.75, 1.15])
        self.state: HeavenHellState | None = None
        self._t = 0

    def _inside(self, p: np.ndarray) -> bool:
        in_corridor = abs(p[0]) <= self.corridor_half_width and 0.0 <= p[1] <= self.corridor_top
        in_bar = (abs(p[0]) <= self.bar_half_length
                  and self.corridor_top - self.bar_half_width <= p[1] <= self.corridor_top + self.bar_half_width)
        return in_corridor or in_bar

    def _obs(self) -> np.ndarray:
        st = self.state
        side = 0.0
        if st.in_oracle_zone(self.zone_center, self.zone_radius):
            side = -1.0 if st.heaven_side == LEFT else 1.0
        return np.array([st.agent_pos[0], st.agent_pos[1], side])

    def heaven_pos(self) -> np.ndarray:
        sign = -1.0 if self.state.heaven_side == LEFT else 1.0
        return np.array([sign * self.arm_x, self.corridor_top])

    def hell_pos(self) -> np.ndarray:
        sign = 1.0 if self.state.heaven_side == LEFT else -1.0
        return np.array([sign * self.arm_x, self.corridor_top])

    def reset(self, rng: np.random.Generator, heaven_side: int | None = None) -> np.ndarray:
        u = rng.random(3)
        side = int(u[2] < 0.5) if heaven_side is None else int(heaven_side)
        self.state = HeavenHellState(
            agent_pos=np.array([-0.05 + 0.1 * u[0], 0.1 * u[1]]),
            heaven_side=side,
        )
        self._t = 0
        return self._obs()

    def step(self, action: np.ndarray, rng: np.random.Generator):
        a = np.asarray(action, dtype=np.float64).ravel()[:2]
        norm = float(np.linalg.norm(a))
        if norm > 1.0:
            a = a / norm
        st = self.state
        delta = self.speed * a
        cand = st.agent_pos + delta
        if self._inside(cand):
            st.agent_pos = cand
        elif self._inside(np.array([cand[0], st.agent_pos[1]])):
            st.agent_pos = np.array([cand[0], st.agent_pos[1]])
        elif self._inside(np.array([st.agent_pos[0], cand[1]])):
            st.agent_pos = np.array([st.agent_pos[0], cand[1]])
        self._t += 1
        reward, done = 0.0, False
        if float(np.linalg.norm(st.agent_pos - self.heaven_pos())) < self.goal_radius:
            reward, done = self.success_reward, True
        elif float(np.linalg.norm(st.agent_pos - self.hell_pos())) < self.goal_radius:
            reward, done = self.failure_penalty, True
        if self._t >= self.horizon:
            done = True
        return self._obs(), reward, done, {}
