"""Mean group elongation as both sensitivity zones narrow together.

Cell k uses alpha_r = 360 - 16 k and alpha_a = 360 - 9 k (k = 0..20), n = 7,
xi = 10, N = 30; k = 20 is the line-forming parameter set.

    python3 scripts/elongation_sweep.py --replicates 20 --out results/elongation
"""

import argparse
import logging
from pathlib import Path

from anisoswarm.harness import ExperimentSpec, run_experiment
from anisoswarm.io import write_tsv
from anisoswarm.model import ModelParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, nargs="+", default=list(range(21)))
    ap.add_argument("--max-iters", type=int, default=10_000)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/elongation"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    rows = []
    for k in args.k:
        base = ModelParams(N=30, n=7, xi=10.0, alpha_r=360.0 - 16 * k, alpha_a=360.0 - 9 * k, max_iters=args.max_iters)
        spec = ExperimentSpec(base=base, replicates=args.replicates, seed_base=args.seed + k,
                              snapshot_stride=1000, output_dir=args.out / f"k{k:02d}", jobs=args.jobs)
        spec.validate()
        (row,) = run_experiment(spec)
        rows.append([k, base.alpha_r, base.alpha_a, row["elongation_mean"], row["elongation_min"],
                     row["elongation_max"], row.get("n_nonfinite_elongation", 0)])
        logging.info("k=%d alpha_r=%g alpha_a=%g e=%.3f", k, base.alpha_r, base.alpha_a, row["elongation_mean"])
    header = ["k", "alpha_r", "alpha_a", "elongation_mean", "elongation_min", "elongation_max", "nonfinite"]
    write_tsv(args.out / "elongation.tsv", header, rows)
    print(f"wrote {args.out / 'elongation.tsv'}")


if __name__ == "__main__":
    main()
