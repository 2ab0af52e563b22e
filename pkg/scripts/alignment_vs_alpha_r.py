"""Alignment index at 30 degrees and at alpha_r / 2 as the repulsion cone widens.

Vee-forming parameters: alpha_a = 360, xi = 13, n = 7, v_max = 10, N = 30.

    python3 scripts/alignment_vs_alpha_r.py --replicates 20 --out results/alignment
"""

import argparse
import logging
from pathlib import Path

import numpy as np

from anisoswarm.harness import ExperimentSpec, run_cells
from anisoswarm.io import write_tsv
from anisoswarm.metrics import alignment_index
from anisoswarm.model import ModelParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--alpha-r", type=float, nargs="+", default=[30.0 * k for k in range(1, 13)])
    ap.add_argument("--max-iters", type=int, default=10_000)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/alignment"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    base = ModelParams(N=30, n=7, xi=13.0, alpha_a=360.0, v_max=10.0, max_iters=args.max_iters)
    spec = ExperimentSpec(base=base, sweep=[("alpha_r", args.alpha_r)], replicates=args.replicates,
                          seed_base=args.seed, snapshot_stride=args.max_iters, jobs=args.jobs)
    spec.validate()
    cells = spec.cells()
    ai30 = {c: [] for c in range(len(cells))}
    ai_half = {c: [] for c in range(len(cells))}
    for c, _, rec in run_cells(spec):
        p = cells[c]
        ai30[c].append(alignment_index(rec.final, 30.0, p.eps_angle))
        ai_half[c].append(alignment_index(rec.final, p.alpha_r / 2, p.eps_angle))
    rows = []
    for c, p in enumerate(cells):
        rows.append([p.alpha_r, np.mean(ai30[c]), np.std(ai30[c]), np.mean(ai_half[c]), np.std(ai_half[c])])
        logging.info("alpha_r=%g AI(30)=%.1f%% AI(alpha_r/2)=%.1f%%", p.alpha_r, rows[-1][1], rows[-1][3])
    args.out.mkdir(parents=True, exist_ok=True)
    write_tsv(args.out / "alignment.tsv", ["alpha_r", "ai30_mean", "ai30_std", "ai_half_mean", "ai_half_std"],
              ([float(x) for x in r] for r in rows))
    print(f"wrote {args.out / 'alignment.tsv'}")


if __name__ == "__main__":
    main()
