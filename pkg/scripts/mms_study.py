"""Manufactured-solution convergence table for the unit-shift resolvent.

All layers are refined together.  Errors are L2 norms against the exact
fields generated by scripts/derive_mms.py.

    python scripts/mms_study.py --sizes 2 4 8
"""
import argparse

from poroplate.mms import TRILINEAR_FIELDS, convergence_study


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8])
    args = parser.parse_args()
    table = convergence_study(tuple(args.sizes))
    print(table.format())
    print(f"minimum order over {', '.join(TRILINEAR_FIELDS)}: {table.min_order():.3f}")


if __name__ == "__main__":
    main()
