"""Print every rewrite stage of the symbolic derivation and the comparison with the targets."""

import argparse

from diracpos.symbolic import check_against_target


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("component", choices=["temporal", "spatial"])
    ap.add_argument("--stages", action="store_true", help="show intermediate expressions")
    args = ap.parse_args()
    ok, diff, d = check_against_target(0 if args.component == "temporal" else 1)
    if args.stages:
        print(d.report())
    else:
        print(d.result)
    print()
    print("matches target" if ok else f"MISMATCH: {diff}")


if __name__ == "__main__":
    main()
