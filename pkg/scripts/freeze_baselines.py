"""Record oracle Wigner minima used as regression baselines by the test suite.

Run once; the output is committed under tests/data/.
"""
import argparse
import json
from pathlib import Path

from photonops import OpSequence, StateSpec, wigner_grid
from photonops import __version__


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "data" / "baselines.json"))
    args = ap.parse_args()
    spec = StateSpec.even_coherent(1.0)
    minima = {}
    for order in ("sa", "as"):
        for p in (1, 2, 3):
            g = wigner_grid(spec, OpSequence(p, 1, order))
            minima[f"{order}_{p}_1"] = {"minimum": g.minimum(), "negative_volume": g.negative_volume()}
    data = {"library_version": __version__, "alpha": 1.0, "grid": [-3.0, 3.0, 81], "ecs_wigner": minima}
    Path(args.out).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
