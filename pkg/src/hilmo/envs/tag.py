"""Pursuit of a fleeing opponent with limited visibility.

The opponent's position enters the observation only inside the
visibility radius; otherwise it is replaced by a sentinel outside the
arena so a hidden opponent never aliases a real position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SENTINEL = -2.0


@dataclass
class TagState:
    agent_pos: np.ndarray
    opponent_pos: np.ndarray
    visibility_radius: float
    tag_radius: float


class TagEnv:
    name = "tag"
    default_k = 10
    default_epsilon = 0.1

    def __init__(self, horizon: int = 200, speed: float = 0.05,
                 opponent_step: float = 0.05, move_prob: float = 0.75,
                 visibility_radius: float = 0.4, tag_radius: float = 0.15,
                 success_reward: float = 1.0):
        self.horizon = horizon
        self.speed = speed
        self.opponent_step = opponent_step
        self.move_prob = move_prob
        self.visibility_radius = visibility_radius
        self.tag_radius = tag_radius
        self.success_reward = success_reward
        self.action_dim = 2
        self.obs_dim = 4
        self.x_dim = 2
        self.goal_dim = 2
        self.goal_mask = np.array([0, 1])
        self.goal_low = np.array([-1.0, -1.0])
        self.goal_high = np.array([1.0, 1.0])
        self.state: TagState | None = None
        self._t = 0

    def _obs(self) -> np.ndarray:
        st = self.state
        dist = float(np.linalg.norm(st.opponent_pos - st.agent_pos))
        if dist < st.visibility_radius:
            opp = st.opponent_pos
        else:
            opp = np.array([SENTINEL, SENTINEL])
        return np.array([st.agent_pos[0], st.agent_pos[1], opp[0], opp[1]])

    def reset(self, rng: np.random.Generator,
              opponent_pos: np.ndarray | None = None) -> np.ndarray:
        u = rng.random(4)
        opp = (np.array([0.2 + 0.6 * u[2], 0.2 + 0.6 * u[3]])
               if opponent_pos is None else np.asarray(opponent_pos, dtype=np.float64))
        self.state = TagState(
            agent_pos=np.array([-0.8 + 0.6 * u[0], -0.8 + 0.6 * u[1]]),
            opponent_pos=opp,
            visibility_radius=self.visibility_radius,
            tag_radius=self.tag_radius,
        )
        self._t = 0
        return self._obs()

    def step(self, action: np.ndarray, rng: np.random.Generator):
        a = np.asarray(action, dtype=np.float64).ravel()[:2]
        norm = float(np.linalg.norm(a))
        if norm > 1.0:
            a = a / norm
        st = self.state
        st.agent_pos = np.clip(st.agent_pos + self.speed * a, -1.0, 1.0)
        # one uniform per step regardless of the outcome keeps streams aligned
        u = float(rng.random())
        if u < self.move_prob:
            away = st.opponent_pos - st.agent_pos
            d = float(np.linalg.norm(away))
            if d > 1e-12:
                st.opponent_pos = np.clip(
                    st.opponent_pos + self.opponent_step * away / d, -1.0, 1.0)
        self._t += 1
        reward, done = 0.0, False
        if float(np.linalg.norm(st.opponent_pos - st.agent_pos)) < st.tag_radius:
            reward, done = self.success_reward, True
        if self._t >= self.horizon:
            done = True
        return self._obs(), reward, done, {}
