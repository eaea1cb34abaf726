"""Write the data files for every figure into one directory tree."""
import argparse
import time

from photonops.figures import FIGURES, GridConfig, run_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures_out")
    ap.add_argument("--grid-points", type=int, default=81)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("figures", nargs="*", type=int, default=sorted(FIGURES))
    args = ap.parse_args()
    for k in args.figures:
        t0 = time.perf_counter()
        manifest = run_figure(k, f"{args.out}/fig{k}", GridConfig(-3.0, 3.0, args.grid_points), workers=args.workers)
        print(f"figure {k}: {len(manifest['panels'])} panels in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
