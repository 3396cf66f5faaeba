"""Desk-scale environments: tabular fixtures and continuous analogs.

Every environment exposes the same duck-typed surface:

    reset(rng) -> obs
    step(action, rng) -> (obs, reward, done, info)
    action_dim, obs_dim, x_dim, goal_dim, goal_mask, goal_low, goal_high, horizon

The first ``x_dim`` observation entries are the fully observable state
component; goals live on the ``goal_mask`` sub-vector of x.
"""

from .door_push import DoorPushEnv
from .heaven_hell import HeavenHellEnv
from .tabular import TabularCorridorEnv, make_stochastic_fork, make_tabular_corridor
from .tag import TagEnv
from .two_boxes import TwoBoxesEnv

_REGISTRY = {
    "two-boxes": TwoBoxesEnv,
    "heaven-hell": HeavenHellEnv,
    "tag": TagEnv,
    "door-push": DoorPushEnv,
    "corridor": TabularCorridorEnv,
}


def make_env(name: str, **kwargs):
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown environment {name!r}; known: {sorted(_REGISTRY)}") from None
    return cls(**kwargs)


def extract_x(env, obs):
    """Fully observable component of an observation."""
    return obs[: env.x_dim]


__all__ = [
    "DoorPushEnv", "HeavenHellEnv", "TabularCorridorEnv", "TagEnv", "TwoBoxesEnv",
    "make_env", "extract_x", "make_stochastic_fork", "make_tabular_corridor",
]
