"""Parameter sweeps with replicates.

Replicate ``r`` of sweep cell ``c`` runs with

    seed = (seed_base + H(c, r)) mod 2**64

where ``H`` is the first 8 bytes (little endian) of BLAKE2b over the ASCII
string ``"c:r"``. The mix is stable across processes and Python versions.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import io
from .integrator import RunRecord, simulate
from .model import ConfigError, ModelParams

log = logging.getLogger(__name__)

SUMMARY_FORMAT = "anisoswarm.summary/1"
STATS = ("mean", "var", "min", "max")
NOT_SWEEPABLE = {"seed"}


def replicate_seed(seed_base: int, cell: int, replicate: int) -> int:
    digest = hashlib.blake2b(f"{cell}:{replicate}".encode("ascii"), digest_size=8).digest()
    return (int(seed_base) + int.from_bytes(digest, "little")) % 2**64


@dataclass
class ExperimentSpec:
    base: ModelParams
    sweep: list[tuple[str, list]] = field(default_factory=list)
    replicates: int = 100
    seed_base: int = 0
    snapshot_stride: int = 100
    output_dir: Optional[Path] = None
    jobs: int = 1

    def validate(self) -> None:
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.snapshot_stride < 1:
            raise ConfigError("snapshot_stride must be >= 1")
        allowed = set(ModelParams.field_names()) - NOT_SWEEPABLE
        names = [name for name, _ in self.sweep]
        for name in names:
            if name not in allowed:
                raise ConfigError(f"cannot sweep {name!r}: not a model parameter")
        if len(set(names)) != len(names):
            raise ConfigError("a parameter appears twice in the sweep")
        for name, values in self.sweep:
            if len(values) == 0:
                raise ConfigError(f"sweep over {name!r} has no values")
        # building every cell validates every combination before any run starts
        self.cells()

    def cells(self) -> list[ModelParams]:
        names = [name for name, _ in self.sweep]
        combos = itertools.product(*[values for _, values in self.sweep])
        return [self.base.replace(**dict(zip(names, combo))) for combo in combos]

    def cell_labels(self) -> list[dict]:
        names = [name for name, _ in self.sweep]
        return [dict(zip(names, combo)) for combo in itertools.product(*[v for _, v in self.sweep])]

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "sweep": [[name, list(values)] for name, values in self.sweep],
            "replicates": self.replicates,
            "seed_base": self.seed_base,
            "snapshot_stride": self.snapshot_stride,
        }


def run_id(cell: int, replicate: int) -> str:
    return f"c{cell:03d}_r{replicate:03d}"


def _one(args) -> tuple[int, int, RunRecord]:
    cell, rep, params, stride = args
    return cell, rep, simulate(params, snapshot_stride=stride)


def run_cells(spec: ExperimentSpec) -> list[tuple[int, int, RunRecord]]:
    """Execute every (cell, replicate); result order is independent of ``jobs``."""
    spec.validate()
    tasks = []
    for c, params in enumerate(spec.cells()):
        for r in range(spec.replicates):
            tasks.append((c, r, params.replace(seed=replicate_seed(spec.seed_base, c, r)), spec.snapshot_stride))
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            results = list(pool.map(_one, tasks))
    else:
        results = [_one(t) for t in tasks]
    results.sort(key=lambda x: (x[0], x[1]))
    return results


def _stats(values: Sequence[float]) -> dict:
    a = np.asarray(values, dtype=float)
    finite = a[np.isfinite(a)]
    if len(finite) == 0:
        return {s: None for s in STATS}
    return {
        "mean": float(finite.mean()),
        "var": float(finite.var()),
        "min": float(finite.min()),
        "max": float(finite.max()),
    }


def summarize(spec: ExperimentSpec, metric_rows: Sequence[tuple[int, dict, str]]) -> list[dict]:
    """Per-cell statistics across replicates.

    ``metric_rows`` holds ``(cell, flat metrics record, termination kind)``.
    ``nnd_variance_*`` summarises the spread across individuals within each
    run; the ``*_min`` / ``*_max`` columns give the range across runs.
    Non-finite values (e.g. infinite elongation) are left out of the
    statistics and counted in ``n_nonfinite_<metric>``.
    """
    labels = spec.cell_labels()
    out = []
    for c, label in enumerate(labels):
        rows = [(m, k) for cc, m, k in metric_rows if cc == c]
        entry: dict[str, Any] = {"cell": c, **{f"param_{k}": v for k, v in label.items()}}
        entry["runs"] = len(rows)
        entry["steady_runs"] = sum(1 for _, k in rows if k == "steady_state")
        keys = sorted({key for m, _ in rows for key in m})
        for key in keys:
            vals = [float(m[key]) for m, _ in rows]
            for stat, val in _stats(vals).items():
                entry[f"{key}_{stat}"] = val
            bad = sum(1 for v in vals if not np.isfinite(v))
            if bad:
                entry[f"n_nonfinite_{key}"] = bad
        out.append(entry)
    return out


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """Run the sweep, write per-run records plus ``summary.json`` / ``summary.tsv``
    under ``spec.output_dir`` (if set) and return the summary rows."""
    results = run_cells(spec)
    rows = [(c, rec.final_metrics.to_record(), rec.termination.kind) for c, _, rec in results]
    summary = summarize(spec, rows)
    if spec.output_dir is not None:
        out = Path(spec.output_dir)
        (out / "runs").mkdir(parents=True, exist_ok=True)
        for c, r, rec in results:
            io.write_record(rec, out / "runs" / f"{run_id(c, r)}.json", run_id(c, r))
        write_summary(spec, summary, out)
        log.info("wrote %d run records and summary to %s", len(results), out)
    return summary


def write_summary(spec: ExperimentSpec, summary: list[dict], out: Path) -> None:
    io.dump_json(
        {
            "format": SUMMARY_FORMAT,
            "spec": spec.to_dict(),
            "cells": [{k: io._num(v) if isinstance(v, float) else v for k, v in row.items()} for row in summary],
            "metadata": io.timestamp_metadata(),
        },
        out / "summary.json",
    )
    header = sorted({k for row in summary for k in row}, key=lambda k: (k != "cell", not k.startswith("param_"), k))
    io.write_tsv(out / "summary.tsv", header, ([row.get(k, "") for k in header] for row in summary))


def summary_from_records(spec: ExperimentSpec, out: Path) -> list[dict]:
    """Recompute the summary from the persisted per-run records."""
    rows = []
    ncells = len(spec.cells())
    for c in range(ncells):
        for r in range(spec.replicates):
            rec = io.read_record(Path(out) / "runs" / f"{run_id(c, r)}.json")
            rows.append((c, rec.final_metrics.to_record(), rec.termination.kind))
    return summarize(spec, rows)


def spec_from_summary(out: Path) -> ExperimentSpec:
    d = io.load_json(Path(out) / "summary.json")["spec"]
    return ExperimentSpec(
        base=ModelParams(**d["base"]),
        sweep=[(name, values) for name, values in d["sweep"]],
        replicates=d["replicates"],
        seed_base=d["seed_base"],
        snapshot_stride=d["snapshot_stride"],
        output_dir=Path(out),
    )
