#!/usr/bin/env python3
"""Run the full benchmark chain over the five bundled networks.

Produces, under the output directory: per-network metric scores, influence
curves (cached as .npz), evaluation grids, hub scatter tables, SVG heatmaps,
the cross-network aggregate and a manifest with content hashes.

Full defaults take a while on one core (every node of every network is
simulated at every spreading ratio); --quick cuts the run budget for a smoke
pass.
"""
import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spreadbench.pipeline import ExperimentSpec, run_experiment

NETWORKS = ("arenas-email", "petster-hamster", "yeast", "route-views", "arenas-pgp")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/desk_benchmark")
    ap.add_argument("--runs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=2027)
    ap.add_argument("--lambda-ratios", default="1,2,5")
    ap.add_argument("--quick", action="store_true",
                    help="tiny run budget, arenas-email only")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    if args.quick:
        spec = ExperimentSpec(datasets=("arenas-email",), lambda_ratios=(1.0,),
                              times=tuple(range(1, 11)), runs=50,
                              master_seed=args.seed, out_dir=args.out,
                              workers=args.workers)
    else:
        spec = ExperimentSpec(
            datasets=NETWORKS,
            lambda_ratios=tuple(float(x) for x in args.lambda_ratios.split(",")),
            times=tuple(range(1, 31)), runs=args.runs, master_seed=args.seed,
            out_dir=args.out, workers=args.workers)

    t0 = time.time()
    manifest = run_experiment(spec)
    print(f"done in {time.time() - t0:.0f}s -> {args.out}")
    print(f"cache hits {manifest['cache']['hits']}, "
          f"misses {manifest['cache']['misses']}")
    for ds, msg in manifest["errors"].items():
        print(f"error [{ds}]: {msg}", file=sys.stderr)
    return 1 if manifest["errors"] else 0


if __name__ == "__main__":
    sys.exit(main())
