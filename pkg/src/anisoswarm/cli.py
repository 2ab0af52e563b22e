"""Command line entry point: ``anisoswarm <subcommand> ...``.

Subcommands: simulate, batch, metrics, equilibrium-check, lattice, plotdata.
Model flags carry the config-file key names (``--xi``, ``--alpha_r``,
``--N``, ``--n`` ...). Precedence: preset < config file < flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .analysis import hex_lattice, verify_equilibrium
from .harness import ExperimentSpec, run_experiment
from .integrator import simulate
from .metrics import bin_bearings, classify_pattern, compute_report, nn_bearings
from .model import ConfigError, DegenerateConfigurationError, ModelParams
from .presets import PRESETS

log = logging.getLogger("anisoswarm")

FLOAT_FLAGS = ("xi", "alpha_a", "alpha_r", "R_sr", "v_max", "L", "alpha_noise", "eps_angle", "dt_max", "disp_cap", "eps_steady")
INT_FLAGS = ("N", "n", "steady_window", "max_iters")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model / solver parameters")
    for name in FLOAT_FLAGS:
        g.add_argument(f"--{name}", type=float, default=None)
    for name in INT_FLAGS:
        g.add_argument(f"--{name}", type=int, default=None)
    g.add_argument("--heading_mode", choices=("fixed", "velocity"), default=None)
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--config", type=Path, default=None, help="key-value config file")


def _collect_params(args) -> tuple[dict, dict, list]:
    """Merge preset, config file and flags into ModelParams kwargs."""
    cfg = io.read_config(args.config) if args.config else {"params": {}, "run": {}, "sweep": []}
    preset_name = args.preset or cfg["run"].get("preset")
    if preset_name and preset_name not in PRESETS:
        raise ConfigError(f"unknown preset {preset_name!r}")
    kw = dict(PRESETS[preset_name]) if preset_name else {}
    kw.update(cfg["params"])
    for name in FLOAT_FLAGS + INT_FLAGS + ("heading_mode",):
        val = getattr(args, name)
        if val is not None:
            kw[name] = val
    return kw, cfg["run"], cfg["sweep"]


def _parse_sweep(items) -> list[tuple[str, list]]:
    out = []
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--sweep expects NAME=v1,v2,...; got {item!r}")
        name, vals = item.split("=", 1)
        out.append((name.strip(), [io.parse_value(name.strip(), v) for v in vals.split(",") if v.strip()]))
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    kw, run_cfg, _ = _collect_params(args)
    params = ModelParams(**{**kw, "seed": args.seed})
    stride = args.snapshot_stride or run_cfg.get("snapshot_stride", 100)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    record = simulate(params, snapshot_stride=stride)
    rid = f"seed{params.seed}"
    io.write_snapshots_csv(record.snapshots, out / "snapshots.csv", rid)
    io.write_centroid_csv(record.snapshots, out / "centroid.csv", rid)
    io.write_record(record, out / "record.json", rid)
    metrics = record.final_metrics
    label = classify_pattern(metrics, params)
    io.dump_json(
        {
            "run_id": rid,
            "seed": params.seed,
            "termination": record.termination.to_dict(),
            "metrics": metrics.to_dict(),
            "pattern": label,
            "metadata": io.timestamp_metadata(),
        },
        out / "metrics.json",
    )
    t = record.termination
    print(
        f"{t.kind} after {t.iterations} iterations (t = {t.final_time:.3f} TU); "
        f"NND = {metrics.nnd_mean:.4g}, elongation = {metrics.elongation:.4g}, pattern = {label}; "
        f"files in {out}"
    )
    return 0


def cmd_batch(args) -> int:
    kw, run_cfg, sweep = _collect_params(args)
    sweep = sweep + _parse_sweep(args.sweep)
    spec = ExperimentSpec(
        base=ModelParams(**kw),
        sweep=sweep,
        replicates=args.replicates or run_cfg.get("replicates", 100),
        seed_base=args.seed,
        snapshot_stride=args.snapshot_stride or run_cfg.get("snapshot_stride", 100),
        output_dir=Path(args.out or run_cfg.get("output_dir", "batch_out")),
        jobs=args.jobs or run_cfg.get("jobs", 1),
    )
    spec.validate()
    summary = run_experiment(spec)
    for row in summary:
        label = {k[6:]: v for k, v in row.items() if k.startswith("param_")}
        print(
            f"cell {row['cell']} {label}: runs={row['runs']} steady={row['steady_runs']} "
            f"nnd={row['nnd_mean_mean']:.4g} elongation={row.get('elongation_mean')}"
        )
    print(f"summary written to {spec.output_dir / 'summary.json'}")
    return 0


def cmd_metrics(args) -> int:
    config, params = io.load_terminal_configuration(args.path)
    params = params or ModelParams(N=max(config.N, 2), alpha_r=args.alpha_r or 360.0)
    if args.eps_angle:
        params = params.replace(eps_angle=args.eps_angle)
    probes = args.theta or None
    report = compute_report(config, params, probes=probes, bin_width=args.bin_width)
    print(json.dumps(report.to_dict(), indent=1, sort_keys=True))
    return 0


def cmd_equilibrium(args) -> int:
    config, params = io.load_terminal_configuration(args.path)
    xi = args.xi if args.xi is not None else (params.xi if params else None)
    if xi is None:
        raise ConfigError("--xi is required when the input carries no parameters")
    eps_tie = args.eps_tie if args.eps_tie is not None else (0.05 * xi if params else 1e-9)
    eps_dist = args.eps_dist if args.eps_dist is not None else eps_tie
    verdict = verify_equilibrium(config, xi, eps_dist=eps_dist, eps_tie=eps_tie, params=params)
    print(json.dumps(verdict.to_dict(), indent=1, sort_keys=True))
    return 0


def cmd_lattice(args) -> int:
    config = hex_lattice(args.rings, args.spacing)
    io.write_configuration_csv(config, args.out, run_id=f"hex{args.rings}")
    msg = f"wrote {config.N} agents to {args.out}"
    if config.N >= 2:
        verdict = verify_equilibrium(config, args.spacing)
        msg += f"; equilibrium={verdict.is_filippov_equilibrium}, max |B_i|={verdict.max_cardinality}"
    print(msg)
    return 0


def cmd_plotdata(args) -> int:
    record = io.read_record(args.path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    final = record.snapshots[-1].configuration()
    io.write_tsv(
        out / "scatter.tsv",
        ["agent_id", "x", "y", "heading_x", "heading_y"],
        ([i, float(p[0]), float(p[1]), float(h[0]), float(h[1])] for i, (p, h) in enumerate(zip(final.positions, final.headings))),
    )
    edges, counts = bin_bearings(nn_bearings(final), args.bin_width)
    total = counts.sum()
    io.write_tsv(
        out / "rose.tsv",
        ["bin_lo", "bin_hi", "count", "fraction"],
        ([float(lo), float(hi), int(c), float(c / total)] for lo, hi, c in zip(edges[:-1], edges[1:], counts)),
    )
    series = io.snapshot_metrics(record)
    keys = list(series[0])
    io.write_tsv(out / "timeseries.tsv", keys, ([row[k] for k in keys] for row in series))
    print(f"wrote scatter.tsv, rose.tsv, timeseries.tsv to {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisoswarm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one seeded simulation")
    _add_model_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="simulate_out")
    p.add_argument("--snapshot-stride", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("batch", help="parameter sweep with replicates")
    _add_model_flags(p)
    p.add_argument("--seed", type=int, required=True, help="seed_base for replicate seeds")
    p.add_argument("--sweep", action="append", metavar="NAME=v1,v2,...")
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--snapshot-stride", type=int, default=None)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("metrics", help="metrics of the terminal configuration of a record or snapshot CSV")
    p.add_argument("path", type=Path)
    p.add_argument("--theta", type=float, action="append", help="AI probe angle (repeatable)")
    p.add_argument("--eps_angle", type=float, default=None)
    p.add_argument("--alpha_r", type=float, default=None, help="for the default alpha_r/2 probe of CSV inputs")
    p.add_argument("--bin-width", type=float, default=10.0)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("equilibrium-check", help="check the n=1 isotropic equilibrium condition")
    p.add_argument("path", type=Path)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--eps_dist", type=float, default=None)
    p.add_argument("--eps_tie", type=float, default=None)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("lattice", help="write a hexagonal lattice configuration")
    p.add_argument("--rings", type=int, required=True)
    p.add_argument("--spacing", type=float, required=True)
    p.add_argument("--out", type=Path, default=Path("lattice.csv"))
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("plotdata", help="tab-delimited plot tables from a run record")
    p.add_argument("path", type=Path)
    p.add_argument("--out", default="plotdata")
    p.add_argument("--bin-width", type=float, default=10.0)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, DegenerateConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
