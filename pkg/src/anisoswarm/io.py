"""File formats: key-value config files, snapshot CSV, run-record and
metrics JSON, tab-delimited plot tables."""

from __future__ import annotations

import configparser
import csv
import datetime as _dt
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .integrator import RunRecord, Snapshot, TerminationReason
from .metrics import MetricsReport, compute_report
from .model import ConfigError, Configuration, ModelParams

RECORD_FORMAT = "anisoswarm.run/1"
SNAPSHOT_FIELDS = ["run_id", "t", "agent_id", "x", "y", "heading_x", "heading_y"]
CENTROID_FIELDS = ["run_id", "t", "centroid_x", "centroid_y"]

MODEL_KEYS = ("N", "n", "xi", "alpha_a", "alpha_r", "R_sr", "v_max", "L", "alpha_noise", "eps_angle", "heading_mode")
SOLVER_KEYS = ("dt_max", "disp_cap", "eps_steady", "steady_window", "max_iters")
INT_KEYS = {"N", "n", "steady_window", "max_iters", "seed"}


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def parse_value(key: str, text: str) -> Any:
    text = text.strip()
    if key == "heading_mode":
        return text
    if key == "disp_cap" and text.lower() in ("", "none", "auto"):
        return None
    if key in INT_KEYS:
        return parse_int(key, text)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {text!r}") from None


def parse_int(key: str, text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {text!r}") from None
    if not value.is_integer():
        raise ConfigError(f"{key} must be an integer, got {text!r}")
    return int(text) if text.strip().lstrip("-").isdigit() else int(value)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # N and n are different keys
    return cp


def read_config(path) -> dict:
    """Read a config file into ``{"params": {...}, "run": {...}, "sweep": [...]}``.

    Sections: ``[model]`` and ``[solver]`` hold ModelParams keys, ``[run]``
    holds ``seed``, ``preset``, ``snapshot_stride``, ``replicates``,
    ``output_dir``, ``jobs``; ``[sweep]`` maps a parameter to a comma list.
    """
    cp = _parser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    allowed = set(ModelParams.field_names())
    params: dict = {}
    for section in ("model", "solver"):
        if cp.has_section(section):
            for key, val in cp.items(section):
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                params[key] = parse_value(key, val)
    run: dict = {}
    if cp.has_section("run"):
        for key, val in cp.items("run"):
            if key in ("preset", "output_dir"):
                run[key] = val.strip()
            elif key in ("seed", "snapshot_stride", "replicates", "jobs"):
                run[key] = parse_int(key, val)
            else:
                raise ConfigError(f"unknown key {key!r} in [run]")
    sweep = []
    if cp.has_section("sweep"):
        for key, val in cp.items("sweep"):
            sweep.append((key, [parse_value(key, v) for v in val.split(",") if v.strip()]))
    unknown = set(cp.sections()) - {"model", "solver", "run", "sweep"}
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    return {"params": params, "run": run, "sweep": sweep}


def write_config(params: ModelParams, path, run: Optional[dict] = None, sweep=()) -> None:
    cp = _parser()
    d = params.to_dict()
    cp["model"] = {k: str(d[k]) for k in MODEL_KEYS}
    cp["solver"] = {k: ("auto" if d[k] is None else str(d[k])) for k in SOLVER_KEYS}
    cp["run"] = {"seed": str(params.seed), **{k: str(v) for k, v in (run or {}).items()}}
    if sweep:
        cp["sweep"] = {k: ", ".join(map(str, vs)) for k, vs in sweep}
    with open(path, "w") as fh:
        cp.write(fh)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def timestamp_metadata() -> dict:
    return {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# run records
# ---------------------------------------------------------------------------


def snapshot_metrics(record: RunRecord) -> list[dict]:
    """Metric time series over the stored snapshots."""
    rows = []
    for snap in record.snapshots:
        rep = compute_report(snap.configuration(), record.params)
        rows.append({"iteration": snap.iteration, "t": snap.time, **{k: _num(v) for k, v in rep.to_record().items()}})
    return rows


def record_to_dict(record: RunRecord, run_id: str, with_timestamp: bool = True) -> dict:
    out = {
        "format": RECORD_FORMAT,
        "run_id": run_id,
        "params": record.params.to_dict(),
        "seed": int(record.seed),
        "termination": record.termination.to_dict(),
        "final_metrics": record.final_metrics.to_dict() if record.final_metrics else None,
        "snapshots": [
            {
                "iteration": s.iteration,
                "t": s.time,
                "centroid": s.centroid.tolist(),
                "positions": s.positions.tolist(),
                "headings": s.headings.tolist(),
            }
            for s in record.snapshots
        ],
        "timeseries": snapshot_metrics(record),
    }
    if with_timestamp:
        out["metadata"] = timestamp_metadata()
    return out


def record_from_dict(d: dict) -> RunRecord:
    if d.get("format") != RECORD_FORMAT:
        raise ValueError(f"not a run record (format={d.get('format')!r})")
    params = ModelParams(**d["params"])
    snaps = [
        Snapshot(
            s["iteration"],
            s["t"],
            np.array(s["centroid"], dtype=float),
            np.array(s["positions"], dtype=float).reshape(-1, 2),
            np.array(s["headings"], dtype=float).reshape(-1, 2),
        )
        for s in d["snapshots"]
    ]
    if not snaps:
        raise ValueError("run record has no snapshots")
    last = snaps[-1]
    final = Configuration(last.positions + last.centroid, last.headings, time=last.time)
    fm = d.get("final_metrics")
    return RunRecord(
        params=params,
        seed=d["seed"],
        snapshots=snaps,
        termination=TerminationReason(**d["termination"]),
        final=final,
        final_metrics=MetricsReport.from_dict(fm) if fm else None,
    )


def write_record(record: RunRecord, path, run_id: str) -> None:
    dump_json(record_to_dict(record, run_id), path)


def read_record(path) -> RunRecord:
    try:
        d = load_json(path)
    except OSError as exc:
        raise ValueError(f"cannot read run record {path}: {exc}") from exc
    try:
        return record_from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"corrupt run record {path}: missing or bad field {exc}") from exc


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _f(x) -> str:
    """Shortest round-trip text for a (numpy) float."""
    return repr(float(x))


def write_snapshots_csv(snapshots: Iterable[Snapshot], path, run_id: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SNAPSHOT_FIELDS)
        for s in snapshots:
            for i, (p, h) in enumerate(zip(s.positions, s.headings)):
                w.writerow([run_id, _f(s.time), i, _f(p[0]), _f(p[1]), _f(h[0]), _f(h[1])])


def write_centroid_csv(snapshots: Iterable[Snapshot], path, run_id: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CENTROID_FIELDS)
        for s in snapshots:
            w.writerow([run_id, _f(s.time), _f(s.centroid[0]), _f(s.centroid[1])])


def write_configuration_csv(config: Configuration, path, run_id: str = "lattice") -> None:
    c = config.centroid()
    snap = Snapshot(0, config.time, c, config.positions - c, config.headings)
    write_snapshots_csv([snap], path, run_id)


def read_snapshots_csv(path) -> list[Configuration]:
    """All configurations stored in a snapshot CSV, in file order of time."""
    frames: dict[float, list] = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(SNAPSHOT_FIELDS) - set(reader.fieldnames):
                raise ValueError(f"{path}: expected columns {SNAPSHOT_FIELDS}")
            for row in reader:
                frames.setdefault(float(row["t"]), []).append(
                    (int(row["agent_id"]), float(row["x"]), float(row["y"]), float(row["heading_x"]), float(row["heading_y"]))
                )
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if not frames:
        raise ValueError(f"{path} holds no snapshots")
    out = []
    for t, rows in frames.items():
        rows.sort()
        arr = np.array([r[1:] for r in rows])
        out.append(Configuration(arr[:, :2], arr[:, 2:], time=t))
    return out


def load_terminal_configuration(path) -> tuple[Configuration, Optional[ModelParams]]:
    """Terminal configuration from a run-record JSON or a snapshot CSV."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        rec = read_record(path)
        return rec.snapshots[-1].configuration(), rec.params
    return read_snapshots_csv(path)[-1], None


def write_tsv(path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_f(x) if isinstance(x, float) else x for x in row])
