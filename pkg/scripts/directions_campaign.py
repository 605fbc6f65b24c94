#!/usr/bin/env python3
"""Singular directions over a random campaign, with a perturbation check:
the root raises the form's order, other values keep the generic order."""

import argparse

from kahlerval.branch import random_campaign
from kahlerval.directions import singular_directions
from kahlerval.engine import construct_cx_basis
from kahlerval.exactnum import rat_str
from kahlerval.pullback import order_on_branch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=24)
    args = ap.parse_args()
    failures = 0
    for b in random_campaign(args.seed, args.count):
        cx = construct_cx_basis(b)
        for r in singular_directions(b, cx):
            if not r.per_index_root:
                continue
            st = next(s for s in cx.trace.stages if s.level == r.level and s.stage == r.stage)
            for k, root in sorted(r.per_index_root.items()):
                go = st.upp_reports[k].generic_order
                jumped = order_on_branch(st.forms[k - 1], b.with_coefficient(r.exponent, root))
                kept = order_on_branch(st.forms[k - 1], b.with_coefficient(r.exponent, root + 1))
                ok = jumped > go and kept == go
                failures += not ok
                print(f"{b.label():<28} beta={r.exponent:<4} k={k:<3} root={rat_str(root):<10} "
                      f"go={go:<4} at root {jumped}  {'ok' if ok else 'FAIL'}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
