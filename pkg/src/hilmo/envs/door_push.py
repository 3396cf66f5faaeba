"""Kinematic 3-joint arm pushing a one-way door.

The door sits on a vertical plane and only swings when the end effector
moves through the contact band in the (hidden) openable direction;
motion the other way leaves the angle untouched, so the correct
direction can only be inferred from whether the angle responds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FRONT_TO_BACK, BACK_TO_FRONT = 1, -1
LINK_LENGTHS = (0.5, 0.4, 0.3)


@dataclass
class DoorPushState:
    joint_pos: np.ndarray   # (3,)
    joint_vel: np.ndarray   # (3,)
    door_angle: float
    push_direction: int     # FRONT_TO_BACK | BACK_TO_FRONT


def forward_kinematics(joints: np.ndarray) -> np.ndarray:
    phi = np.cumsum(joints)
    x = float(np.sum(LINK_LENGTHS * np.cos(phi)))
    y = float(np.sum(LINK_LENGTHS * np.sin(phi)))
    return np.array([x, y])


class DoorPushEnv:
    name = "door-push"
    default_k = 10
    default_epsilon = 0.2

    def __init__(self, horizon: int = 200, dt: float = 0.05,
                 door_x: float = 0.8, door_half_span: float = 0.35,
                 contact_band: float = 0.05, stiffness: float = 1.0,
                 open_threshold: float = 0.9, joint_limit: float = 1.5,
                 success_reward: float = 1.0):
        self.horizon = horizon
        self.dt = dt
        self.door_x = door_x
        self.door_half_span = door_half_span
        self.contact_band = contact_band
        self.stiffness = stiffness
        self.open_threshold = open_threshold
        self.joint_limit = joint_limit
        self.success_reward = success_reward
        self.action_dim = 3
        self.obs_dim = 7
        self.x_dim = 6
        self.goal_dim = 3
        self.goal_mask = np.array([0, 1, 2])
        self.goal_low = -joint_limit * np.ones(3)
        self.goal_high = joint_limit * np.ones(3)
        self.state: DoorPushState | None = None
        self._t = 0

    def _obs(self) -> np.ndarray:
        st = self.state
        return np.concatenate([st.joint_pos, st.joint_vel, [st.door_angle]])

    def reset(self, rng: np.random.Generator, push_direction: int | None = None) -> np.ndarray:
        u = rng.random(4)
        direction = (FRONT_TO_BACK if u[3] < 0.5 else BACK_TO_FRONT) \
            if push_direction is None else int(push_direction)
        self.state = DoorPushState(
            joint_pos=-0.3 + 0.6 * u[:3],
            joint_vel=np.zeros(3),
            door_angle=0.0,
            push_direction=direction,
        )
        self._t = 0
        return self._obs()

    def _in_contact(self, ee: np.ndarray) -> bool:
        return (abs(ee[0] - self.door_x) < self.contact_band
                and abs(ee[1]) < self.door_half_span)

    def step(self, action: np.ndarray, rng: np.random.Generator):
        a = np.clip(np.asarray(action, dtype=np.float64).ravel()[:3], -1.0, 1.0)
        st = self.state
        ee_before = forward_kinematics(st.joint_pos)
        st.joint_vel = a
        st.joint_pos = np.clip(st.joint_pos + self.dt * a,
                               -self.joint_limit, self.joint_limit)
        ee_after = forward_kinematics(st.joint_pos)
        if self._in_contact(ee_before) or self._in_contact(ee_after):
            dx = float(ee_after[0] - ee_before[0]) * st.push_direction
            if dx > 0.0:
                st.door_angle += self.stiffness * dx
        self._t += 1
        reward, done = 0.0, False
        if st.door_angle > self.open_threshold:
            reward, done = self.success_reward, True
        if self._t >= self.horizon:
            done = True
        return self._obs(), reward, done, {}
