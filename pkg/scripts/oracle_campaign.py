#!/usr/bin/env python3
"""Engine vs brute-force oracle on a seeded random campaign."""

import argparse
import time

from kahlerval.branch import random_campaign
from kahlerval.oracle import oracle_compare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=20)
    args = ap.parse_args()
    bad = 0
    t0 = time.perf_counter()
    for b in random_campaign(args.seed, args.count):
        t = time.perf_counter()
        rep = oracle_compare(b)
        bad += not rep.equal
        print(f"{b.label():<28} {rep.message():<40} {time.perf_counter() - t:6.2f}s")
    print(f"{args.count - bad}/{args.count} agree, {time.perf_counter() - t0:.1f}s total")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
