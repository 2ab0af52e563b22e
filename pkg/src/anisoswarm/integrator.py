"""Adaptive explicit Euler integration with speed cap, directional noise and
steady-state detection in the centroid frame.

Random streams
--------------
Every random draw comes from ``numpy.random.SeedSequence(seed, spawn_key=key)``:

* key ``(0, i)`` -> initial position of agent ``i`` (and its redraws),
* key ``(1,)``   -> per-step directional noise.

Because agent ``i`` has its own stream and only depends on agents ``0..i-1``
for redraws, two runs with the same seed but different ``N`` share their first
``min(N, N')`` initial points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .model import (
    Configuration,
    DegenerateConfigurationError,
    DEGENERACY_TOL,
    ModelParams,
    NeighborSets,
    _select,
    _velocity_from_masks,
    pairwise_distances,
    pairwise_offsets,
    rotate,
    update_headings,
)

INIT_MIN_SEPARATION = 1e-6
INIT_MAX_ATTEMPTS = 10**6

INITIAL_STREAM = 0
NOISE_STREAM = 1


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def noise_rng(seed: int) -> np.random.Generator:
    return stream(seed, NOISE_STREAM)


@dataclass
class StepResult:
    config: Configuration
    dt_used: float
    max_speed: float
    max_relative_drift: float


@dataclass(frozen=True)
class TerminationReason:
    kind: Literal["steady_state", "max_iterations"]
    iterations: int
    final_time: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "iterations": self.iterations, "final_time": self.final_time}


@dataclass
class Snapshot:
    """Centroid-relative positions at one stored step, plus the lab-frame centroid."""

    iteration: int
    time: float
    centroid: np.ndarray
    positions: np.ndarray
    headings: np.ndarray

    @classmethod
    def of(cls, config: Configuration, iteration: int) -> "Snapshot":
        c = config.centroid()
        return cls(iteration, config.time, c, config.positions - c, config.headings.copy())

    def configuration(self) -> Configuration:
        return Configuration(self.positions, self.headings, time=self.time)


@dataclass
class RunRecord:
    params: ModelParams
    seed: int
    snapshots: list[Snapshot]
    termination: TerminationReason
    final: Configuration
    final_metrics: Optional[object] = None  # metrics.MetricsReport
    drift_history: list[float] = field(default_factory=list)


def random_initial(params: ModelParams, rng_seed: Optional[int] = None) -> Configuration:
    """Uniform positions on ``[0, L]^2``, headings +x, zero velocities."""
    seed = params.seed if rng_seed is None else rng_seed
    pos = np.empty((params.N, 2))
    attempts = 0
    for i in range(params.N):
        gen = stream(seed, INITIAL_STREAM, i)
        while True:
            attempts += 1
            if attempts > INIT_MAX_ATTEMPTS:
                raise RuntimeError("could not place agents without near-coincidences")
            p = gen.uniform(0.0, params.L, size=2)
            if i == 0 or np.min(np.hypot(*(pos[:i] - p).T)) >= INIT_MIN_SEPARATION:
                break
        pos[i] = p
    return Configuration(pos)


def step(
    config: Configuration,
    params: ModelParams,
    rng: Optional[np.random.Generator],
    neighbors: Optional[NeighborSets] = None,
) -> StepResult:
    """One adaptive Euler step.

    ``neighbors`` overrides the default selection; this lets callers realize a
    specific choice at switching configurations.
    """
    if neighbors is None:
        nb, off = _select(config, params)
    else:
        nb, off = neighbors, pairwise_offsets(config.positions)
    att, rep = nb.masks()
    v = _velocity_from_masks(off, att, rep, params.xi)

    speed = np.hypot(v[:, 0], v[:, 1])
    over = speed > params.v_max
    if np.any(over):
        v[over] *= (params.v_max / speed[over])[:, None]

    if params.alpha_noise > 0:
        if rng is None:
            raise ValueError("alpha_noise > 0 requires an rng")
        phi = np.radians(rng.uniform(-params.alpha_noise, params.alpha_noise, size=config.N))
        v = rotate(v, phi)

    speed = np.hypot(v[:, 0], v[:, 1])
    max_speed = float(speed.max())
    dt = params.dt_max if max_speed == 0 else min(params.dt_max, params.displacement_cap / max_speed)

    new_pos = config.positions + dt * v
    if pairwise_distances(new_pos).min() <= DEGENERACY_TOL:
        raise DegenerateConfigurationError("step produced coincident agents; reduce disp_cap")

    # d/dt (x_i - centroid) is v_i - mean(v) exactly for an Euler step
    rel = v - v.mean(axis=0)
    drift = float(np.hypot(rel[:, 0], rel[:, 1]).max())

    if params.heading_mode == "velocity":
        headings = update_headings(config.headings, v)
    else:
        headings = config.headings
    new = Configuration._trusted(new_pos, headings, v, config.time + dt)
    return StepResult(new, dt, max_speed, drift)


def run(
    initial: Configuration,
    params: ModelParams,
    snapshot_stride: int = 100,
    rng: Optional[np.random.Generator] = None,
    compute_metrics: bool = True,
) -> RunRecord:
    """Iterate :func:`step` until the comoving frame is steady or ``max_iters``.

    Steady means ``max_relative_drift < eps_steady`` on ``steady_window``
    consecutive steps. Snapshots are stored every ``snapshot_stride`` steps,
    always including the initial and the final state.
    """
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be >= 1")
    if initial.N != params.N:
        raise ValueError(f"initial configuration has {initial.N} agents, params.N is {params.N}")
    rng = noise_rng(params.seed) if rng is None else rng
    config = initial
    snapshots = [Snapshot.of(config, 0)]
    drifts = []
    streak = 0
    it = 0
    kind = "max_iterations"
    while it < params.max_iters:
        res = step(config, params, rng)
        config = res.config
        it += 1
        drifts.append(res.max_relative_drift)
        streak = streak + 1 if res.max_relative_drift < params.eps_steady else 0
        if it % snapshot_stride == 0:
            snapshots.append(Snapshot.of(config, it))
        if streak >= params.steady_window:
            kind = "steady_state"
            break
    if snapshots[-1].iteration != it:
        snapshots.append(Snapshot.of(config, it))

    record = RunRecord(
        params=params,
        seed=params.seed,
        snapshots=snapshots,
        termination=TerminationReason(kind, it, config.time),
        final=config,
        drift_history=drifts,
    )
    if compute_metrics:
        from .metrics import compute_report

        record.final_metrics = compute_report(snapshots[-1].configuration(), params)
    return record


def simulate(params: ModelParams, snapshot_stride: int = 100) -> RunRecord:
    """Random initial condition plus :func:`run`, both driven by ``params.seed``."""
    return run(random_initial(params), params, snapshot_stride=snapshot_stride)
