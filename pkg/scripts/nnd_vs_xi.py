"""Mean nearest-neighbor distance against the comfortable distance xi, for several n.

    python3 scripts/nnd_vs_xi.py --replicates 10 --out results/nnd_vs_xi
"""

import argparse
import logging
from pathlib import Path

from anisoswarm.harness import ExperimentSpec, run_experiment
from anisoswarm.io import write_tsv
from anisoswarm.model import ModelParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 7, 29])
    ap.add_argument("--xi", type=float, nargs="+", default=[float(x) for x in range(2, 21, 2)])
    ap.add_argument("--max-iters", type=int, default=4000, help="cap for n > 1 runs, which do not settle")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/nnd_vs_xi"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    rows = []
    for n in args.n:
        cap = ModelParams.max_iters if n == 1 else args.max_iters
        spec = ExperimentSpec(
            base=ModelParams(N=30, n=n, max_iters=cap),
            sweep=[("xi", args.xi)],
            replicates=args.replicates,
            seed_base=args.seed,
            snapshot_stride=1000,
            output_dir=args.out / f"n{n}",
            jobs=args.jobs,
        )
        spec.validate()
        for row in run_experiment(spec):
            rows.append([n, row["param_xi"], row["nnd_mean_mean"], row["nnd_variance_mean"],
                         row["nnd_mean_min"], row["nnd_mean_max"], row["steady_runs"], row["runs"]])
            logging.info("n=%d xi=%g NND=%.3f", n, row["param_xi"], row["nnd_mean_mean"])
    header = ["n", "xi", "nnd_mean", "nnd_var_individuals", "nnd_min_runs", "nnd_max_runs", "steady_runs", "runs"]
    write_tsv(args.out / "nnd_vs_xi.tsv", header, rows)
    print(f"wrote {args.out / 'nnd_vs_xi.tsv'}")


if __name__ == "__main__":
    main()
