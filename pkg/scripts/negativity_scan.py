"""Scan Wigner negativity of transformed thermal and even coherent seeds.

Prints the grid minimum and the negative volume for each state so the
sign structure of the figures can be inspected without plotting.
"""
import argparse

from photonops import OpSequence, StateSpec, wigner_grid


def scan(spec, pairs, orders, points):
    for order in orders:
        for p, q in pairs:
            g = wigner_grid(spec, OpSequence(p, q, order), points_per_axis=points)
            print(f"  {order}({p},{q}): min {g.minimum():+.5f}  negative volume {g.negative_volume():.5f}"
                  f"  integral {g.integral():.5f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=81)
    ap.add_argument("--pmax", type=int, default=5)
    args = ap.parse_args()
    for nbar in (0.04, 0.25, 1.0):
        print(f"thermal nbar={nbar}")
        scan(StateSpec.thermal(nbar), [(p, q) for p in range(3) for q in range(3)], ("sa", "as"), args.points)
    for alpha in (0.1, 1.0, 2.0):
        print(f"even coherent alpha={alpha}")
        scan(StateSpec.even_coherent(alpha), [(p, 1) for p in range(1, args.pmax + 1)], ("sa", "as"), args.points)


if __name__ == "__main__":
    main()
