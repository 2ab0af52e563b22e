"""Structural checks for the single-nearest-neighbor, isotropic regime.

With ``n = 1`` and both zones isotropic each agent interacts only with its
closest mate(s) ``B_i = argmin_{j != i} |x_i - x_j|``. Configurations where
some ``B_i`` has more than one element are switching configurations; the flow
is discontinuous there. A sufficient condition for a (Filippov) equilibrium is
that every closest mate of every agent sits at distance exactly ``xi``, which
also bounds ``|B_i|`` by six.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Configuration, ModelParams, NeighborSets, pairwise_distances

EPS_TIE = 1e-9
MAX_CLOSEST = 6


@dataclass
class ClosestSet:
    members: list[np.ndarray]
    distances: np.ndarray  # per-agent minimum distance

    @property
    def cardinality(self) -> np.ndarray:
        return np.array([len(m) for m in self.members])


@dataclass
class EquilibriumVerdict:
    is_filippov_equilibrium: bool
    per_agent_distances: list[float]
    per_agent_cardinality: list[int]
    max_cardinality: int
    in_scope: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "is_filippov_equilibrium": self.is_filippov_equilibrium,
            "per_agent_distances": self.per_agent_distances,
            "per_agent_cardinality": self.per_agent_cardinality,
            "max_cardinality": self.max_cardinality,
            "in_scope": self.in_scope,
            "note": self.note,
        }


def closest_sets(config: Configuration, eps_tie: float = EPS_TIE) -> ClosestSet:
    """Indices within ``eps_tie`` of each agent's nearest-neighbor distance."""
    if config.N < 2:
        raise ValueError("closest sets need at least two agents")
    if eps_tie < 0:
        raise ValueError("eps_tie must be >= 0")
    dist = pairwise_distances(config.positions)
    dmin = dist.min(axis=1)
    members = [np.flatnonzero(row <= m + eps_tie) for row, m in zip(dist, dmin)]
    return ClosestSet(members, dmin)


def is_switching_configuration(config: Configuration, eps_tie: float = EPS_TIE) -> bool:
    """True if some agent has two or more (near-)equidistant closest mates.

    This witnesses only nearest-neighbor ties; ties between farther
    neighbors also belong to the switching set but do not change the
    ``n = 1`` flow.
    """
    return bool(np.any(closest_sets(config, eps_tie).cardinality > 1))


def hex_lattice(rings: int, spacing: float, heading=(1.0, 0.0)) -> Configuration:
    """Centered hexagonal patch with ``1 + 3 * rings * (rings + 1)`` sites.

    The center agent is index 0; the others follow ring by ring.
    """
    if rings < 0:
        raise ValueError("rings must be >= 0")
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    axial = [(q, r) for q in range(-rings, rings + 1) for r in range(-rings, rings + 1) if abs(q + r) <= rings]
    axial.sort(key=lambda qr: (max(abs(qr[0]), abs(qr[1]), abs(qr[0] + qr[1])), qr[1], qr[0]))
    q, r = np.array(axial, dtype=float).T
    pos = spacing * np.column_stack([q + 0.5 * r, (np.sqrt(3.0) / 2.0) * r])
    h = np.asarray(heading, dtype=float)
    return Configuration(pos, np.tile(h / np.hypot(*h), (len(pos), 1)))


def verify_equilibrium(
    config: Configuration,
    xi: float,
    eps_dist: float = 1e-9,
    eps_tie: float = EPS_TIE,
    params: Optional[ModelParams] = None,
) -> EquilibriumVerdict:
    """Check the sufficient equilibrium condition for the ``n = 1`` isotropic model.

    When ``params`` is given and describes another regime the verdict is still
    computed but flagged ``in_scope=False``.
    """
    cs = closest_sets(config, eps_tie)
    dist = pairwise_distances(config.positions)
    ok_dist = all(np.all(np.abs(dist[i, m] - xi) <= eps_dist) for i, m in enumerate(cs.members))
    card = cs.cardinality
    ok = bool(ok_dist and card.max() <= MAX_CLOSEST)
    in_scope = params is None or (params.n == 1 and params.isotropic)
    note = "" if in_scope else "outside the scope of this check: requires n=1 and isotropic zones"
    return EquilibriumVerdict(
        is_filippov_equilibrium=ok,
        per_agent_distances=cs.distances.tolist(),
        per_agent_cardinality=card.tolist(),
        max_cardinality=int(card.max()),
        in_scope=in_scope,
        note=note,
    )


def selection_from_closest(closest: ClosestSet, choice: int = 0) -> NeighborSets:
    """One neighbor per agent picked from its closest set, cycling by ``choice``.

    ``choice = k`` picks ``B_i[k mod |B_i|]``, so ``k = 0..max|B_i|-1`` sweeps
    every member of every closest set at least once. Attraction and repulsion
    sets coincide, as in the isotropic ``n = 1`` model.
    """
    picks = [[m[choice % len(m)]] for m in closest.members]
    return NeighborSets(picks, picks)


def n1_isotropic_params(N: int, xi: float, **kw) -> ModelParams:
    return ModelParams(N=N, n=1, xi=xi, alpha_a=360.0, alpha_r=360.0, alpha_noise=0.0, **kw)
