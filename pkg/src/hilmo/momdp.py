"""Mixed-observability MDP core types, tabular models, and the factorization validator.

A motion-based mixed-observability model factors its dynamics as

    p(x', y' | x, y, a) = p(x' | x, a) * p(y' | x, y, x')

with observations p(z | x', y') and rewards R(x', y') independent of the
action.  The table shapes enforce the factorization structurally; the
validator checks a full joint transition table against it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .errors import DimensionError, DomainError, ModelFormatError

PROB_TOL = 1e-12
FACTORIZATION_TOL = 1e-9


@dataclass(frozen=True)
class StatePair:
    """Environment state split into fully observable x and hidden y."""

    x: object
    y: object


@dataclass(frozen=True)
class Observation:
    """Emission (x, z): x mirrors the state's x, z is the residual signal."""

    x: object
    z: object


@dataclass(frozen=True)
class ContinuousEnvConfig:
    """Shared constants for the continuous desk-scale environments."""

    action_dim: int
    observation_dim: int
    x_dim: int
    horizon: int
    success_reward: float = 1.0
    failure_penalty: float = -1.0
    seed: int = 0

    def __post_init__(self):
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")
        if min(self.action_dim, self.observation_dim, self.x_dim) <= 0:
            raise DomainError("dimensions must be positive")


def _check_rows(name: str, table: np.ndarray, axis: int = -1) -> None:
    if np.any(table < 0):
        raise ModelFormatError(f"{name} has negative entries")
    sums = table.sum(axis=axis)
    if not np.all(np.abs(sums - 1.0) <= PROB_TOL):
        raise ModelFormatError(f"{name} rows are not normalized (max |sum-1| = "
                               f"{np.max(np.abs(sums - 1.0)):.3e})")


@dataclass
class TabularMobMomdp:
    """Finite factored model (X, Y, A, T^X, T^Y, O, R, gamma).

    Table shapes:
        tx:      (nx, na, nx)      p(x' | x, a)
        ty:      (nx, ny, nx, ny)  p(y' | x, y, x')
        obs:     (nx, ny, nz)      p(z | x, y)
        rewards: (nx, ny)          R(x, y), collected at the reached state
        initial: (nx, ny)          joint start distribution
    """

    tx: np.ndarray
    ty: np.ndarray
    obs: np.ndarray
    rewards: np.ndarray
    gamma: float
    initial: np.ndarray
    x_labels: tuple = field(default=())

    def __post_init__(self):
        self.tx = np.ascontiguousarray(self.tx, dtype=np.float64)
        self.ty = np.ascontiguousarray(self.ty, dtype=np.float64)
        self.obs = np.ascontiguousarray(self.obs, dtype=np.float64)
        self.rewards = np.ascontiguousarray(self.rewards, dtype=np.float64)
        self.initial = np.ascontiguousarray(self.initial, dtype=np.float64)
        nx, na, nx2 = self.tx.shape
        if nx != nx2:
            raise DimensionError("tx must have shape (nx, na, nx)")
        if self.ty.shape != (nx, self.ny, nx, self.ny):
            raise DimensionError("ty must have shape (nx, ny, nx, ny)")
        if self.obs.shape[:2] != (nx, self.ny) or self.obs.ndim != 3:
            raise DimensionError("obs must have shape (nx, ny, nz)")
        if self.rewards.shape != (nx, self.ny):
            raise DimensionError("rewards must have shape (nx, ny)")
        if self.initial.shape != (nx, self.ny):
            raise DimensionError("initial must have shape (nx, ny)")
        if not (0.0 <= self.gamma < 1.0):
            raise DomainError("gamma must lie in [0, 1)")
        _check_rows("tx", self.tx)
        _check_rows("ty", self.ty)
        _check_rows("obs", self.obs)
        total = self.initial.sum()
        if np.any(self.initial < 0) or abs(total - 1.0) > PROB_TOL:
            raise ModelFormatError("initial distribution is not normalized")

    @property
    def nx(self) -> int:
        return self.tx.shape[0]

    @property
    def na(self) -> int:
        return self.tx.shape[1]

    @property
    def ny(self) -> int:
        return self.rewards.shape[1] if self.rewards.ndim == 2 else self.ty.shape[1]

    @property
    def nz(self) -> int:
        return self.obs.shape[2]

    def joint_transition(self) -> np.ndarray:
        """Dense joint table p(s' | s, a) with s = x * ny + y."""
        joint = np.einsum("xaX,xyXY->xyaXY", self.tx, self.ty)
        ns = self.nx * self.ny
        return joint.reshape(ns, self.na, ns)

    def absorbing_zero_states(self) -> np.ndarray:
        """Boolean mask over x of states that self-loop under every action
        and carry zero reward for every y; rollouts may stop there."""
        self_loop = np.all(self.tx[np.arange(self.nx)[:, None],
                                   np.arange(self.na)[None, :],
                                   np.arange(self.nx)[:, None]] == 1.0, axis=1)
        zero_r = np.all(self.rewards == 0.0, axis=1)
        return self_loop & zero_r


@dataclass
class FactorizationReport:
    """Result of validate_factorization; truthy iff the joint factorizes."""

    ok: bool
    max_abs_error: float
    worst: tuple  # ((x, y), a, (x2, y2)) with the largest violation

    def __bool__(self) -> bool:
        return self.ok


def validate_factorization(joint: np.ndarray, model: TabularMobMomdp,
                           tol: float = FACTORIZATION_TOL) -> FactorizationReport:
    """Check |joint(s,a,s') - Tx(x,a,x') Ty(x,y,x',y')| <= tol everywhere.

    The joint uses flattened state indices s = x * ny + y.
    """
    ns = model.nx * model.ny
    joint = np.asarray(joint, dtype=np.float64)
    if joint.shape != (ns, model.na, ns):
        raise DimensionError(f"joint table must have shape ({ns}, {model.na}, {ns}), "
                             f"got {joint.shape}")
    product = model.joint_transition()
    err = np.abs(joint - product)
    flat = int(np.argmax(err))
    s, a, s2 = np.unravel_index(flat, err.shape)
    worst = ((int(s) // model.ny, int(s) % model.ny), int(a),
             (int(s2) // model.ny, int(s2) % model.ny))
    max_err = float(err[s, a, s2])
    return FactorizationReport(ok=max_err <= tol, max_abs_error=max_err, worst=worst)


def sample_index(row: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from a probability row given one uniform sample."""
    idx = int(np.searchsorted(np.cumsum(row), u, side="right"))
    return min(idx, len(row) - 1)


def step_tabular(model: TabularMobMomdp, state: StatePair, action: int,
                 rng: np.random.Generator) -> tuple[StatePair, Observation, float]:
    """Sample one transition: x' ~ Tx, y' ~ Ty, z ~ Obs(x', y').

    Consumes exactly three uniforms so parallel streams stay aligned.
    Returns the reached state, its observation, and R(x', y').
    """
    x, y = int(state.x), int(state.y)
    if not (0 <= x < model.nx and 0 <= y < model.ny):
        raise DomainError(f"state ({x}, {y}) out of range")
    if not (0 <= action < model.na):
        raise DomainError(f"action {action} out of range")
    u = rng.random(3)
    x2 = sample_index(model.tx[x, action], u[0])
    y2 = sample_index(model.ty[x, y, x2], u[1])
    z = sample_index(model.obs[x2, y2], u[2])
    reward = float(model.rewards[x2, y2])
    return StatePair(x2, y2), Observation(x2, z), reward


def sample_initial(model: TabularMobMomdp, rng: np.random.Generator) -> tuple[StatePair, Observation]:
    """Draw a start state and its first observation (three uniforms)."""
    u = rng.random(3)
    flat = sample_index(model.initial.ravel(), u[0])
    x, y = divmod(flat, model.ny)
    # u[1] reserved so reset and step consume equal amounts from the stream
    z = sample_index(model.obs[x, y], u[2])
    return StatePair(x, y), Observation(x, z)


# ---------------------------------------------------------------------------
# Plain-text serialization
# ---------------------------------------------------------------------------

_MAGIC = "MOBMOMDP"


def _write_block(fh: TextIO, label: str, rows: np.ndarray) -> None:
    fh.write(label + "\n")
    for row in rows:
        fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def save_model(model: TabularMobMomdp, path) -> None:
    """Write the labeled plain-text table format."""
    with open(path, "w") as fh:
        fh.write(f"{_MAGIC} {model.nx} {model.ny} {model.na} {model.nz} {model.gamma:.17g}\n")
        _write_block(fh, "TX", model.tx.reshape(model.nx * model.na, model.nx))
        _write_block(fh, "TY", model.ty.reshape(model.nx * model.ny * model.nx, model.ny))
        _write_block(fh, "OBS", model.obs.reshape(model.nx * model.ny, model.nz))
        _write_block(fh, "R", model.rewards)
        _write_block(fh, "INIT", model.initial)


def _read_block(lines: list[str], pos: int, label: str, nrows: int, ncols: int) -> tuple[np.ndarray, int]:
    if pos >= len(lines) or lines[pos].strip() != label:
        raise ModelFormatError(f"expected block label {label!r}")
    pos += 1
    if pos + nrows > len(lines):
        raise ModelFormatError(f"block {label} is truncated")
    try:
        data = np.array([[float(v) for v in lines[pos + i].split()] for i in range(nrows)])
    except ValueError as exc:
        raise ModelFormatError(f"block {label}: {exc}") from exc
    if data.shape != (nrows, ncols):
        raise ModelFormatError(f"block {label} must be {nrows}x{ncols}, got {data.shape}")
    return data, pos + nrows


def load_model(path) -> TabularMobMomdp:
    """Load the plain-text format; rejects non-normalized rows."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    if not lines:
        raise ModelFormatError("empty model file")
    head = lines[0].split()
    if len(head) != 6 or head[0] != _MAGIC:
        raise ModelFormatError("bad header; expected 'MOBMOMDP nx ny na nz gamma'")
    nx, ny, na, nz = (int(v) for v in head[1:5])
    gamma = float(head[5])
    pos = 1
    tx, pos = _read_block(lines, pos, "TX", nx * na, nx)
    ty, pos = _read_block(lines, pos, "TY", nx * ny * nx, ny)
    obs, pos = _read_block(lines, pos, "OBS", nx * ny, nz)
    rewards, pos = _read_block(lines, pos, "R", nx, ny)
    initial, pos = _read_block(lines, pos, "INIT", nx, ny)
    return TabularMobMomdp(
        tx=tx.reshape(nx, na, nx),
        ty=ty.reshape(nx, ny, nx, ny),
        obs=obs.reshape(nx, ny, nz),
        rewards=rewards,
        gamma=gamma,
        initial=initial,
    )
