"""Group-structure observables: nearest-neighbor distance, oriented elongation,
nearest-neighbor bearing distribution, alignment index, pattern label."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .model import Configuration, ModelParams, pairwise_distances, signed_bearing

HEADING_MEAN_TOL = 1e-9


@dataclass
class MetricsReport:
    nnd_mean: float
    nnd_variance: float
    elongation: float
    angle_histogram: dict  # {"edges": [...], "counts": [...]}
    ai_values: dict[float, float]

    def to_record(self) -> dict:
        """Flat key/value view used by the CSV/JSON writers."""
        rec = {
            "nnd_mean": self.nnd_mean,
            "nnd_variance": self.nnd_variance,
            "elongation": self.elongation,
        }
        for theta, val in sorted(self.ai_values.items()):
            rec[f"ai_{theta:g}"] = val
        return rec

    def to_dict(self) -> dict:
        return {
            "nnd_mean": self.nnd_mean,
            "nnd_variance": self.nnd_variance,
            "elongation": _finite_or_str(self.elongation),
            "angle_histogram": self.angle_histogram,
            "ai_values": {f"{k:g}": v for k, v in sorted(self.ai_values.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            d["nnd_mean"],
            d["nnd_variance"],
            float(d["elongation"]),
            d["angle_histogram"],
            {float(k): v for k, v in d["ai_values"].items()},
        )


def _finite_or_str(x: float):
    return x if np.isfinite(x) else str(x)


def _require_pair(config: Configuration):
    if config.N < 2:
        raise ValueError("metrics need at least two agents")


def nearest_neighbors(config: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """Index and distance of each agent's nearest neighbor (ties -> lowest index)."""
    _require_pair(config)
    dist = pairwise_distances(config.positions)
    idx = np.argmin(dist, axis=1)
    return idx, dist[np.arange(config.N), idx]


def nnd(config: Configuration) -> tuple[float, float]:
    """Mean and population variance of nearest-neighbor distances."""
    _, d = nearest_neighbors(config)
    return float(d.mean()), float(d.var())


def motion_direction(config: Configuration) -> np.ndarray:
    u = config.headings.mean(axis=0)
    norm = np.hypot(*u)
    if norm < HEADING_MEAN_TOL:
        return np.array([1.0, 0.0])
    return u / norm


def elongation(config: Configuration) -> float:
    """Transverse over longitudinal extent of the bounding box aligned with the
    mean heading. Zero longitudinal extent gives ``inf``."""
    _require_pair(config)
    u = motion_direction(config)
    perp = np.array([-u[1], u[0]])
    along = config.positions @ u
    across = config.positions @ perp
    length = along.max() - along.min()
    width = across.max() - across.min()
    if length <= 0:
        return np.inf
    return float(width / length)


def nn_bearings(config: Configuration) -> np.ndarray:
    """Signed bearing (degrees, (-180, 180]) of each agent's nearest neighbor
    relative to its own heading."""
    idx, _ = nearest_neighbors(config)
    off = config.positions[idx] - config.positions
    return signed_bearing(config.headings, off)


def histogram_edges(bin_width: float) -> np.ndarray:
    nbins = int(round(360.0 / bin_width))
    if not np.isclose(nbins * bin_width, 360.0):
        raise ValueError("bin_width must divide 360")
    return np.linspace(-180.0, 180.0, nbins + 1)


def bin_bearings(bearings: np.ndarray, bin_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Counts over right-closed bins ``(e_k, e_{k+1}]`` covering (-180, 180]."""
    edges = histogram_edges(bin_width)
    k = np.searchsorted(edges, bearings, side="left") - 1
    k = np.clip(k, 0, len(edges) - 2)
    counts = np.bincount(k, minlength=len(edges) - 1)
    return edges, counts


def nn_angle_histogram(config: Configuration, bin_width: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    return bin_bearings(nn_bearings(config), bin_width)


def alignment_index_from_bearings(bearings: np.ndarray, theta: float, eps_angle: float) -> float:
    if eps_angle <= 0:
        raise ValueError("eps_angle must be > 0")
    hits = np.abs(np.abs(bearings) - theta) <= eps_angle
    return 100.0 * float(hits.sum()) / len(bearings)


def alignment_index(config: Configuration, theta: float, eps_angle: float = 3.0) -> float:
    """Percentage of agents whose nearest neighbor sits at unsigned bearing
    ``theta`` within ``eps_angle`` degrees."""
    return alignment_index_from_bearings(nn_bearings(config), theta, eps_angle)


def compute_report(
    config: Configuration,
    params: ModelParams,
    probes: Optional[Iterable[float]] = None,
    bin_width: float = 10.0,
) -> MetricsReport:
    """All metrics of one configuration. Default AI probes are 30 and alpha_r/2."""
    probes = sorted({30.0, params.alpha_r / 2.0} if probes is None else set(map(float, probes)))
    mean, var = nnd(config)
    bearings = nn_bearings(config)
    edges, counts = bin_bearings(bearings, bin_width)
    return MetricsReport(
        nnd_mean=mean,
        nnd_variance=var,
        elongation=elongation(config),
        angle_histogram={"edges": edges.tolist(), "counts": counts.tolist()},
        ai_values={p: alignment_index_from_bearings(bearings, p, params.eps_angle) for p in probes},
    )


@dataclass(frozen=True)
class PatternThresholds:
    line_max_elongation: float = 0.3
    vee_min_ai: float = 25.0
    cluster_elongation: tuple[float, float] = (0.5, 2.0)


def classify_pattern(
    report: MetricsReport, params: ModelParams, thresholds: PatternThresholds = PatternThresholds()
) -> str:
    """Coarse label in {"cluster", "line", "vee", "other"}."""
    probe = params.alpha_r / 2.0
    if probe in report.ai_values:
        ai = report.ai_values[probe]
    else:
        raise KeyError(f"report has no AI value at alpha_r/2 = {probe}")
    if report.elongation < thresholds.line_max_elongation:
        return "line"
    if ai > thresholds.vee_min_ai:
        return "vee"
    lo, hi = thresholds.cluster_elongation
    if lo <= report.elongation <= hi:
        return "cluster"
    return "other"
