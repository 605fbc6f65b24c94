#!/usr/bin/env python3
"""Tally form types and the outcome of every classification check."""

import argparse
from collections import Counter

from kahlerval.branch import random_campaign
from kahlerval.engine import construct_cx_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[2024, 3])
    ap.add_argument("--count", type=int, default=24)
    ap.add_argument("--companion", action="store_true")
    args = ap.parse_args()
    types, checks = Counter(), Counter()
    for seed in args.seeds:
        for b in random_campaign(seed, args.count):
            cx = construct_cx_basis(b)
            for i in range(len(cx.entries)):
                rep = cx.report(i, companion=args.companion)
                types[rep.type] += 1
                for name, ok in rep.checks.items():
                    checks[(rep.type, name, ok)] += 1
    for t, c in sorted(types.items()):
        print(f"type {t:<8} {c}")
    for (t, name, ok), c in sorted(checks.items()):
        print(f"  type {t} {name:<24} {'true' if ok else 'FALSE'} {c}")
    return 1 if any(not ok for (_, _, ok) in checks) else 0


if __name__ == "__main__":
    raise SystemExit(main())
