"""Domain types, sensitivity zones, topological neighbor selection and the
nondimensional attraction/repulsion velocity field.

Units: lengths in body lengths (BL), time in TU = 1/F_a. With F_a normalized
to one the only force parameter left is the comfortable distance
``xi = sqrt(F_r / F_a)`` and the velocity of agent ``i`` reads

    v_i = sum_{j in attract_i} (x_j - x_i) - xi**2 * sum_{j in repel_i} (x_j - x_i) / |x_j - x_i|**2
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

# Positions closer than this are treated as coincident (degenerate).
DEGENERACY_TOL = 1e-12
# Lab-frame speed below which an agent keeps its previous heading.
HEADING_SPEED_TOL = 1e-6
# Slack on the closed cone boundary, absorbs atan2 round-off at exactly alpha/2.
ZONE_ANGLE_TOL = 1e-9
HEADING_MODES = ("fixed", "velocity")


class DegenerateConfigurationError(ValueError):
    """Two agents occupy (numerically) the same position."""


class ConfigError(ValueError):
    """Invalid model or experiment parameters."""


@dataclass(frozen=True)
class AgentState:
    position: np.ndarray
    heading: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        for name in ("position", "heading", "velocity"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(2))
        if abs(np.hypot(*self.heading) - 1.0) > 1e-9:
            raise ValueError(f"heading must be a unit vector, got {self.heading}")


@dataclass
class Configuration:
    """Positions, headings and last applied velocities of all agents.

    Arrays have shape ``(N, 2)``. The object is treated as immutable by every
    function in the package; the integrator always builds a new one.
    """

    positions: np.ndarray
    headings: np.ndarray = None
    velocities: np.ndarray = None
    time: float = 0.0

    def __post_init__(self):
        self.positions = np.array(self.positions, dtype=float).reshape(-1, 2)
        n = len(self.positions)
        if n < 1:
            raise ConfigError("a configuration needs at least one agent")
        if self.headings is None:
            self.headings = np.tile([1.0, 0.0], (n, 1))
        else:
            self.headings = np.array(self.headings, dtype=float).reshape(n, 2)
            norms = np.hypot(self.headings[:, 0], self.headings[:, 1])
            if np.any(np.abs(norms - 1.0) > 1e-9):
                raise ValueError("headings must be unit vectors")
        if self.velocities is None:
            self.velocities = np.zeros((n, 2))
        else:
            self.velocities = np.array(self.velocities, dtype=float).reshape(n, 2)
        self.time = float(self.time)

    @classmethod
    def _trusted(cls, positions, headings, velocities, time) -> "Configuration":
        # integrator hot path: arrays already have the right shape and norms
        self = cls.__new__(cls)
        self.positions, self.headings, self.velocities, self.time = positions, headings, velocities, float(time)
        return self

    @property
    def N(self) -> int:
        return len(self.positions)

    @property
    def agents(self) -> list[AgentState]:
        return [AgentState(p, h, v) for p, h, v in zip(self.positions, self.headings, self.velocities)]

    @classmethod
    def from_agents(cls, agents: Sequence[AgentState], time: float = 0.0) -> "Configuration":
        return cls(
            np.array([a.position for a in agents]),
            np.array([a.heading for a in agents]),
            np.array([a.velocity for a in agents]),
            time,
        )

    def centroid(self) -> np.ndarray:
        return self.positions.mean(axis=0)

    def min_pairwise_distance(self) -> float:
        if self.N < 2:
            return np.inf
        return float(pairwise_distances(self.positions).min())

    def is_degenerate(self) -> bool:
        return self.min_pairwise_distance() <= DEGENERACY_TOL


@dataclass(frozen=True)
class ModelParams:
    """Model parameters plus solver and termination settings.

    Symbol names follow the usual notation of the model: ``xi`` is the
    comfortable distance, ``alpha_a``/``alpha_r`` the full widths (degrees) of
    the attraction and repulsion cones, ``R_sr`` the short-range repulsion
    radius and ``L`` the edge of the initial square.
    """

    N: int = 30
    n: int = 1
    xi: float = 10.0
    alpha_a: float = 360.0
    alpha_r: float = 360.0
    R_sr: float = 1.0
    v_max: float = 10.0
    L: float = 15.0
    alpha_noise: float = 0.0
    eps_angle: float = 3.0
    # "fixed": every agent keeps its initial direction of motion (the group's
    # travel direction in the comoving frame); "velocity": heading follows the
    # agent's own velocity whenever it moves faster than HEADING_SPEED_TOL.
    heading_mode: str = "fixed"
    # solver
    dt_max: float = 0.05
    disp_cap: Optional[float] = None  # None -> 0.2 * min(xi, R_sr)
    eps_steady: float = 1e-3
    steady_window: int = 10
    max_iters: int = 200_000
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        problems = []
        if self.N < 2:
            problems.append(f"N must be >= 2 (got {self.N})")
        if not 1 <= self.n <= max(self.N - 1, 1):
            problems.append(f"n must satisfy 1 <= n <= N-1 (got n={self.n}, N={self.N})")
        for name in ("xi", "R_sr", "v_max", "L", "dt_max", "eps_angle"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0 (got {getattr(self, name)})")
        for name in ("alpha_a", "alpha_r"):
            if not 0 < getattr(self, name) <= 360:
                problems.append(f"{name} must lie in (0, 360] (got {getattr(self, name)})")
        if not 0 <= self.alpha_noise <= 360:
            problems.append(f"alpha_noise must lie in [0, 360] (got {self.alpha_noise})")
        if self.heading_mode not in HEADING_MODES:
            problems.append(f"heading_mode must be one of {HEADING_MODES} (got {self.heading_mode!r})")
        if self.disp_cap is not None and not self.disp_cap > 0:
            problems.append(f"disp_cap must be > 0 (got {self.disp_cap})")
        if self.eps_steady < 0 or self.steady_window < 1 or self.max_iters < 0:
            problems.append("need eps_steady >= 0, steady_window >= 1, max_iters >= 0")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def displacement_cap(self) -> float:
        if self.disp_cap is not None:
            return float(self.disp_cap)
        return 0.2 * min(self.xi, self.R_sr)

    @property
    def isotropic(self) -> bool:
        return self.alpha_a == 360 and self.alpha_r == 360

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))


class NeighborSets:
    """Per-agent attraction and repulsion neighbors, ordered by distance.

    Built either from explicit index lists or, internally, from boolean
    adjacency matrices ``A[i, j]`` / ``R[i, j]`` plus the per-agent distance
    ordering; whichever side is missing is derived on demand.
    """

    def __init__(self, attract: Sequence[Sequence[int]], repel: Sequence[Sequence[int]]):
        if len(attract) != len(repel):
            raise ValueError("attract and repel must cover the same agents")
        self._attract = [np.asarray(a, dtype=int).reshape(-1) for a in attract]
        self._repel = [np.asarray(r, dtype=int).reshape(-1) for r in repel]
        self._masks = None
        self._order = None

    @classmethod
    def _from_masks(cls, att: np.ndarray, rep: np.ndarray, order: np.ndarray) -> "NeighborSets":
        self = cls.__new__(cls)
        self._attract = self._repel = None
        self._masks = (att, rep)
        self._order = order
        return self

    def _lists(self, mask: np.ndarray) -> list[np.ndarray]:
        sorted_mask = np.take_along_axis(mask, self._order, axis=1)
        return [row[keep] for row, keep in zip(self._order, sorted_mask)]

    @property
    def attract(self) -> list[np.ndarray]:
        if self._attract is None:
            self._attract = self._lists(self._masks[0])
        return self._attract

    @property
    def repel(self) -> list[np.ndarray]:
        if self._repel is None:
            self._repel = self._lists(self._masks[1])
        return self._repel

    def __len__(self) -> int:
        return len(self.attract) if self._masks is None else len(self._masks[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, NeighborSets):
            return NotImplemented
        same = lambda a, b: len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))
        return same(self.attract, other.attract) and same(self.repel, other.repel)

    def __repr__(self) -> str:
        return f"NeighborSets(attract={[a.tolist() for a in self.attract]}, repel={[r.tolist() for r in self.repel]})"

    def masks(self) -> tuple[np.ndarray, np.ndarray]:
        """Boolean adjacency matrices ``A[i, j]`` / ``R[i, j]``."""
        if self._masks is None:
            n = len(self._attract)
            att = np.zeros((n, n), dtype=bool)
            rep = np.zeros((n, n), dtype=bool)
            for i, (a, r) in enumerate(zip(self._attract, self._repel)):
                att[i, a] = True
                rep[i, r] = True
            self._masks = (att, rep)
        return self._masks


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------


def pairwise_offsets(positions: np.ndarray) -> np.ndarray:
    """``off[i, j] = x_j - x_i``."""
    return positions[None, :, :] - positions[:, None, :]


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """Distance matrix with ``inf`` on the diagonal."""
    off = pairwise_offsets(positions)
    dist = np.hypot(off[..., 0], off[..., 1])
    np.fill_diagonal(dist, np.inf)
    return dist


def signed_bearing(heading: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Signed angle in degrees from ``heading`` to ``offset``, in (-180, 180].

    Broadcasts over leading axes; positive means counter-clockwise.
    """
    heading = np.asarray(heading, dtype=float)
    offset = np.asarray(offset, dtype=float)
    cross = heading[..., 0] * offset[..., 1] - heading[..., 1] * offset[..., 0]
    dot = heading[..., 0] * offset[..., 0] + heading[..., 1] * offset[..., 1]
    ang = np.degrees(np.arctan2(cross, dot))
    return np.where(ang <= -180.0, ang + 360.0, ang)


def rotate(vectors: np.ndarray, angles_rad) -> np.ndarray:
    c, s = np.cos(angles_rad), np.sin(angles_rad)
    x, y = vectors[..., 0], vectors[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)


def _check_offset(focal: AgentState, other_position) -> np.ndarray:
    offset = np.asarray(other_position, dtype=float) - focal.position
    if np.hypot(*offset) <= DEGENERACY_TOL:
        raise DegenerateConfigurationError("other agent coincides with the focal agent")
    return offset


def _in_cone(bearing_abs, alpha):
    return bearing_abs <= alpha / 2.0 + ZONE_ANGLE_TOL


# ---------------------------------------------------------------------------
# zones and neighbors
# ---------------------------------------------------------------------------


def in_attraction_zone(focal: AgentState, other_position, alpha_a: float) -> bool:
    """Frontal cone of full width ``alpha_a`` degrees, boundary included."""
    offset = _check_offset(focal, other_position)
    if alpha_a >= 360:
        return True
    return bool(_in_cone(abs(signed_bearing(focal.heading, offset)), alpha_a))


def in_repulsion_zone(focal: AgentState, other_position, alpha_r: float, R_sr: float) -> bool:
    """Union of the disk of radius ``R_sr`` and the frontal cone of width ``alpha_r``."""
    offset = _check_offset(focal, other_position)
    if np.hypot(*offset) <= R_sr or alpha_r >= 360:
        return True
    return bool(_in_cone(abs(signed_bearing(focal.heading, offset)), alpha_r))


def zone_masks(config: Configuration, params: ModelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(dist, attract_zone, repel_zone)`` matrices for all ordered pairs."""
    dist, att, rep, _ = _zones(config, params)
    return dist, att, rep


def _zones(config: Configuration, params: ModelParams):
    pos = config.positions
    off = pairwise_offsets(pos)
    dist = np.hypot(off[..., 0], off[..., 1])
    np.fill_diagonal(dist, np.inf)
    if len(pos) > 1 and dist.min() <= DEGENERACY_TOL:
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        raise DegenerateConfigurationError(f"agents {i} and {j} coincide (distance {dist[i, j]:.3g})")
    not_self = ~np.eye(len(pos), dtype=bool)
    need_angles = params.alpha_a < 360 or params.alpha_r < 360
    if need_angles:
        bearing = np.abs(signed_bearing(config.headings[:, None, :], off))
    if params.alpha_a >= 360:
        att = not_self.copy()
    else:
        att = _in_cone(bearing, params.alpha_a) & not_self
    if params.alpha_r >= 360:
        rep = not_self.copy()
    else:
        rep = ((dist <= params.R_sr) | _in_cone(bearing, params.alpha_r)) & not_self
    return dist, att, rep, off


def _nearest_in_zone(order: np.ndarray, zone: np.ndarray, n: int) -> np.ndarray:
    z = np.take_along_axis(zone, order, axis=1)
    keep = z & (np.cumsum(z, axis=1) <= n)
    mask = np.zeros_like(zone)
    np.put_along_axis(mask, order, keep, axis=1)
    return mask


def _select(config: Configuration, params: ModelParams, priority=None):
    dist, att, rep, off = _zones(config, params)
    if priority is None:
        order = np.argsort(dist, axis=1, kind="stable")
    else:
        pr = np.broadcast_to(np.asarray(priority), dist.shape)
        order = np.lexsort((pr, dist), axis=1)
    nb = NeighborSets._from_masks(
        _nearest_in_zone(order, att, params.n), _nearest_in_zone(order, rep, params.n), order
    )
    return nb, off


def select_neighbors(
    config: Configuration, params: ModelParams, priority: Optional[Sequence[int]] = None
) -> NeighborSets:
    """Topological neighbors: the ``n`` closest agents inside each zone.

    Exact distance ties are broken by ascending agent index, or by ascending
    ``priority[j]`` when a priority vector is given.
    """
    return _select(config, params, priority)[0]


def velocity_field(config: Configuration, neighbors: NeighborSets, params: ModelParams) -> np.ndarray:
    """Raw velocities (no speed cap, no noise), shape ``(N, 2)``."""
    att, rep = neighbors.masks()
    return _velocity_from_masks(pairwise_offsets(config.positions), att, rep, params.xi)


def _velocity_from_masks(off: np.ndarray, att: np.ndarray, rep: np.ndarray, xi: float) -> np.ndarray:
    d2 = off[..., 0] ** 2 + off[..., 1] ** 2
    if np.any((att | rep) & (d2 <= DEGENERACY_TOL**2)):
        raise DegenerateConfigurationError("interacting agents coincide")
    inv = np.divide(1.0, d2, out=np.zeros_like(d2), where=rep)
    w = att - xi**2 * inv
    return np.einsum("ij,ijk->ik", w, off)


def update_headings(headings: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    """Heading follows the velocity direction when the agent moves, else it is kept."""
    speed = np.hypot(velocities[:, 0], velocities[:, 1])
    moving = speed > HEADING_SPEED_TOL
    out = headings.copy()
    out[moving] = velocities[moving] / speed[moving, None]
    return out
