"""Inf-sup constants of the Stokes block on refined fluid boxes.

Compares Taylor-Hood (Q2 velocity, Q1 pressure) with the equal-order Q1/Q1
pair.  The equal-order raw constant is zero on every mesh because of a
spurious pressure kernel; the reduced column is the smallest nonzero
singular value, which decays like 1/n.

    python scripts/infsup_sweep.py --sizes 2 4 8 16
"""
import argparse

from poroplate.verify import format_infsup, infsup_checks, infsup_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8])
    args = parser.parse_args()
    sweep = infsup_sweep(tuple(args.sizes))
    print(format_infsup(sweep))
    for r in infsup_checks(sweep):
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}: {r['value']:.4g}")


if __name__ == "__main__":
    main()
