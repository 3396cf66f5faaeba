"""1D box-size comparison task.

A velocity-controlled finger slides on a track holding two boxes of
hidden sizes.  Gliding over a box deflects the finger by a
size-dependent angle; the agent sees only (position, angle) and must
reach the right end when the sizes match and the left end otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SMALL, BIG = 0, 1
ANGLE_SMALL = 0.3
ANGLE_BIG = 0.6


@dataclass
class TwoBoxesState:
    finger_pos: float
    finger_vel: float
    box1_pos: float
    box2_pos: float
    box1_size: int  # SMALL | BIG
    box2_size: int
    box_half_width: float

    @property
    def target_side(self) -> str:
        return "right" if self.box1_size == self.box2_size else "left"


class TwoBoxesEnv:
    name = "two-boxes"
    default_k = 12
    default_epsilon = 0.06

    def __init__(self, horizon: int = 100, dt: float = 0.05,
                 box_half_width: float = 0.16, end_zone: float = 0.97,
                 success_reward: float = 1.0, failure_penalty: float = -1.0):
        self.horizon = horizon
        self.dt = dt
        self.box_half_width = box_half_width
        self.end_zone = end_zone
        self.success_reward = success_reward
        self.failure_penalty = failure_penalty
        self.action_dim = 1
        self.obs_dim = 2
        self.x_dim = 1
        self.goal_dim = 1
        self.goal_mask = np.array([0])
        self.goal_low = np.array([-1.0])
        self.goal_high = np.array([1.0])
        self.state: TwoBoxesState | None = None
        self._t = 0

    def _angle(self, pos: float) -> float:
        st = self.state
        if abs(pos - st.box1_pos) < st.box_half_width:
            return ANGLE_BIG if st.box1_size == BIG else ANGLE_SMALL
        if abs(pos - st.box2_pos) < st.box_half_width:
            return ANGLE_BIG if st.box2_size == BIG else ANGLE_SMALL
        return 0.0

    def _obs(self) -> np.ndarray:
        return np.array([self.state.finger_pos, self._angle(self.state.finger_pos)])

    def reset(self, rng: np.random.Generator, box_sizes: tuple[int, int] | None = None) -> np.ndarray:
        u = rng.random(5)
        sizes = (int(u[2] < 0.5), int(u[3] < 0.5)) if box_sizes is None else box_sizes
        self.state = TwoBoxesState(
            finger_pos=float(-0.1 + 0.2 * u[4]),
            finger_vel=0.0,
            box1_pos=float(-0.6 + 0.25 * u[0]),
            box2_pos=float(0.35 + 0.25 * u[1]),
            box1_size=sizes[0],
            box2_size=sizes[1],
            box_half_width=self.box_half_width,
        )
        self._t = 0
        return self._obs()

    def step(self, action: np.ndarray, rng: np.random.Generator):
        a = float(np.clip(np.asarray(action, dtype=np.float64).ravel()[0], -1.0, 1.0))
        st = self.state
        st.finger_vel = a
        st.finger_pos = float(np.clip(st.finger_pos + self.dt * a, -1.0, 1.0))
        self._t += 1
        reward, done = 0.0, False
        if st.finger_pos >= self.end_zone:
            reward = self.success_reward if st.target_side == "right" else self.failure_penalty
            done = True
        elif st.finger_pos <= -self.end_zone:
            reward = self.success_reward if st.target_side == "left" else self.failure_penalty
            done = True
        if self._t >= self.horizon:
            done = True
        return self._obs(), reward, done, {}
