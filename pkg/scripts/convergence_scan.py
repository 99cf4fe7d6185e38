"""Error of the expanded spatial operator against direct integration as (L, N) double."""

import argparse
from math import pi

from diracpos.checks import CONVERGE, spatial_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--doublings", type=int, default=3)
    ap.add_argument("--m", type=float, default=1.0)
    args = ap.parse_args()

    print(f"{'L':>10} {'N':>5} {'error':>12} {'ratio':>10}")
    prev = None
    for k in range(args.doublings + 1):
        L, N = 20 * pi * 2**k, CONVERGE["N0"] * 2**k
        err = spatial_error(L, N, args.m)
        ratio = "" if prev is None else f"{prev / err:10.3g}"
        print(f"{L:10.3f} {N:5d} {err:12.4e} {ratio}")
        prev = err


if __name__ == "__main__":
    main()
