"""Particle swarm minimizer.

Velocity update per particle i and dimension j:

    v[i,j] <- omega * v[i,j] + c1 * r1[i,j] * (pbest[i,j] - x[i,j])
                             + c2 * r2[i,j] * (gbest[j]    - x[i,j])

followed by the position update x[i,j] <- x[i,j] + v[i,j]. r1 and r2 are
fresh uniform [0,1] draws per dimension, per particle, per iteration, all
taken from one seeded stream so runs are bit-reproducible. Updates are
synchronous: every velocity in an iteration sees the iteration-start gbest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass
class PsoConfig:
    """Swarm hyperparameters and the search box.

    ``bounds`` is a sequence of (low, high) pairs, one per dimension.
    ``vmax`` optionally caps |velocity| per component (scalar or per-dim).
    """

    bounds: Sequence[tuple[float, float]]
    swarm_size: int = 30
    max_iterations: int = 100
    omega: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    vmax: float | Sequence[float] | None = None
    seed: int = 0

    def __post_init__(self):
        self.bounds = np.atleast_2d(np.asarray(self.bounds, dtype=np.float64))
        if self.bounds.ndim != 2 or self.bounds.shape[1] != 2:
            raise ValueError("bounds must be a sequence of (low, high) pairs")
        if not np.all(self.bounds[:, 0] < self.bounds[:, 1]):
            raise ValueError("every bound must satisfy low < high")
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("omega", "c1", "c2"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.vmax is not None:
            self.vmax = np.broadcast_to(
                np.asarray(self.vmax, dtype=np.float64), (self.dim,)
            ).copy()
            if np.any(self.vmax < 0):
                raise ValueError("vmax must be >= 0")

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_value: float
    history: list[float]
    # populated only when optimize(..., record=True): per-iteration
    # (r1, r2) draw matrices plus the initial swarm, enough to replay the
    # whole trajectory through step_velocity/step_position.
    draws: list[tuple[np.ndarray, np.ndarray]] | None = None
    initial_positions: np.ndarray | None = None
    initial_velocities: np.ndarray | None = None
    gbest_positions: list[np.ndarray] | None = None


def step_velocity(velocity, position, pbest, gbest, cfg: PsoConfig, r1, r2) -> np.ndarray:
    """One velocity update; accepts per-particle vectors or whole-swarm
    matrices (componentwise). Clamped to +/-vmax when configured."""
    velocity = np.asarray(velocity, dtype=np.float64)
    position = np.asarray(position, dtype=np.float64)
    pbest = np.asarray(pbest, dtype=np.float64)
    gbest = np.asarray(gbest, dtype=np.float64)
    if position.shape[-1] != cfg.dim or velocity.shape != position.shape:
        raise ValueError("velocity/position dimensionality mismatch")
    new = (
        cfg.omega * velocity
        + cfg.c1 * np.asarray(r1) * (pbest - position)
        + cfg.c2 * np.asarray(r2) * (gbest - position)
    )
    if cfg.vmax is not None:
        new = np.clip(new, -cfg.vmax, cfg.vmax)
    return new


def step_position(position, velocity, bounds) -> tuple[np.ndarray, np.ndarray]:
    """Position update x + v, clamped into bounds.

    Returns (new_position, new_velocity); velocity components that hit a
    bound are zeroed so particles do not pile up against the walls.
    """
    position = np.asarray(position, dtype=np.float64)
    velocity = np.asarray(velocity, dtype=np.float64)
    bounds = np.atleast_2d(np.asarray(bounds, dtype=np.float64))
    if position.shape[-1] != bounds.shape[0] or velocity.shape != position.shape:
        raise ValueError("position/velocity dimensionality mismatch")
    moved = position + velocity
    clamped = np.clip(moved, bounds[:, 0], bounds[:, 1])
    new_velocity = np.where(clamped == moved, velocity, 0.0)
    return clamped, new_velocity


class ObjectiveError(RuntimeError):
    """Raised when the objective returns a non-finite value."""


def _evaluate(objective, positions, iteration) -> np.ndarray:
    values = np.empty(positions.shape[0])
    for i in range(positions.shape[0]):
        v = float(objective(positions[i]))
        if not np.isfinite(v):
            raise ObjectiveError(
                f"objective returned non-finite value {v!r} "
                f"at iteration {iteration}, particle {i}"
            )
        values[i] = v
    return values


def optimize(
    objective: Callable[[np.ndarray], float],
    cfg: PsoConfig,
    initial_positions: np.ndarray | None = None,
    record: bool = False,
) -> PsoResult:
    """Minimize ``objective`` over the bounded domain.

    Initial positions are uniform within bounds and initial velocities
    uniform within +/-(high-low)/2, all from the seeded stream;
    ``initial_positions`` (shape (m, dim), m <= swarm_size) overrides the
    first m random starts. pbest/gbest update only on strict improvement,
    so the returned per-iteration gbest history is non-increasing.
    """
    rng = np.random.default_rng(cfg.seed)
    low, high = cfg.bounds[:, 0], cfg.bounds[:, 1]
    n, d = cfg.swarm_size, cfg.dim

    positions = rng.uniform(low, high, size=(n, d))
    half_span = (high - low) / 2.0
    velocities = rng.uniform(-half_span, half_span, size=(n, d))
    if initial_positions is not None:
        seeds = np.atleast_2d(np.asarray(initial_positions, dtype=np.float64))
        if seeds.shape[0] > n or seeds.shape[1] != d:
            raise ValueError("initial_positions must be (m <= swarm_size, dim)")
        positions[: seeds.shape[0]] = np.clip(seeds, low, high)

    result = PsoResult(best_position=np.empty(d), best_value=np.inf, history=[])
    if record:
        result.draws = []
        result.initial_positions = positions.copy()
        result.initial_velocities = velocities.copy()
        result.gbest_positions = []

    pbest = positions.copy()
    pbest_values = _evaluate(objective, positions, iteration=0)
    g = int(np.argmin(pbest_values))
    gbest = pbest[g].copy()
    gbest_value = float(pbest_values[g])

    for it in range(1, cfg.max_iterations + 1):
        r1 = rng.uniform(size=(n, d))
        r2 = rng.uniform(size=(n, d))
        if record:
            result.draws.append((r1, r2))
        velocities = step_velocity(velocities, positions, pbest, gbest, cfg, r1, r2)
        positions, velocities = step_position(positions, velocities, cfg.bounds)

        values = _evaluate(objective, positions, iteration=it)
        improved = values < pbest_values
        pbest[improved] = positions[improved]
        pbest_values[improved] = values[improved]
        g = int(np.argmin(pbest_values))
        if pbest_values[g] < gbest_value:
            gbest = pbest[g].copy()
            gbest_value = float(pbest_values[g])

        result.history.append(gbest_value)
        if record:
            result.gbest_positions.append(gbest.copy())

    result.best_position = gbest
    result.best_value = gbest_value
    return result


def history_to_csv(history: Sequence[float], path) -> None:
    """Convergence history as ``iteration,gbest_value`` rows."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("iteration,gbest_value\n")
        for i, v in enumerate(history):
            f.write(f"{i},{v!r}\n")
