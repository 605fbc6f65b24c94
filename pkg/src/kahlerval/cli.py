"""Command-line interface.

    kahlerval info CURVE.json
    kahlerval basis CURVE.json --kind all [--trace]
    kahlerval lambda CURVE.json --bound 40
    kahlerval directions CURVE.json
    kahlerval classify CURVE.json [--companion]
    kahlerval oracle-check CURVE.json
    kahlerval decompose CURVE.json --form "y dy"
    kahlerval random --seed 3 [--genus 2]
    kahlerval batch DIR --out OUTDIR

Exit status: 0 success, 1 internal consistency failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .branch import (
    Branch, branch_from_json, exponent_set, random_branch, semigroup_generators, semigroup_of,
)
from .directions import NonLinearLead, directions_json, singular_directions
from .engine import InternalConsistencyError, construct_cx_basis
from .exactnum import InputError, parse_form, value_json
from .oracle import oracle_compare
from .pullback import PullbackError, decompose
from .semimodule import lambda_from_basis, semimodule_report

INTERNAL_ERRORS = (InternalConsistencyError, PullbackError, NonLinearLead)


def load_curve(path: str) -> Branch:
    try:
        text = Path(path).read_text()
    except OSError as ex:
        raise InputError(f"cannot read {path}: {ex.strerror}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as ex:
        raise InputError(f"{path}: malformed JSON ({ex.msg} at line {ex.lineno})")
    return branch_from_json(doc)


# ---------------------------------------------------------------------------
# Commands; each returns a JSON-able document


def cmd_info(b: Branch, args) -> dict:
    sg = semigroup_of(b)
    return {
        "n": b.n,
        "charExponents": list(b.char_exponents),
        "e": list(b.e_seq),
        "n_j": list(b.n_seq),
        "nu": list(b.nu_seq),
        "sgGens": list(semigroup_generators(b)),
        "exponentsPrefix": exponent_set(b, b.beta(b.g) + 2 * b.n)[:12],
        "conductor": sg.conductor(),
    }


def cmd_basis(b: Branch, args) -> dict:
    cx = construct_cx_basis(b)
    rep = semimodule_report(cx)
    kinds = ["cx", "s", "cw", "c"] if args.kind == "all" else [args.kind]
    out = {"n": b.n}
    for k in kinds:
        out[k] = rep["cx_basis"] if k == "cx" else rep[f"{k}_basis"]
    out["forms"] = [{"value": e.value, "form": str(e.form)} for e in cx.entries]
    out["semigroup"] = rep["semigroup"]
    if args.trace:
        out["trace"] = cx.trace.to_json()
    return out


def cmd_lambda(b: Branch, args) -> dict:
    cx = construct_cx_basis(b)
    lam = lambda_from_basis(cx.values(), b.n)
    bound = args.bound if args.bound is not None else max(cx.values()) + 2 * b.n
    return {"n": b.n, "bound": bound, "class_min": list(lam.class_min),
            "conductor": lam.conductor(), "values": lam.elements_upto(bound)}


def cmd_directions(b: Branch, args) -> list:
    return directions_json(singular_directions(b))


def cmd_classify(b: Branch, args) -> dict:
    cx = construct_cx_basis(b)
    return cx.to_json(companion=args.companion)


def cmd_oracle_check(b: Branch, args) -> dict:
    return oracle_compare(b).to_json()


def cmd_decompose(b: Branch, args) -> dict:
    w = parse_form(args.form)
    cx = construct_cx_basis(b)
    hs, residual = decompose(w, [(e.form, e.value) for e in cx.entries], b, args.T)
    return {
        "form": str(w),
        "basis": [str(e.form) for e in cx.entries],
        "coefficients": [str(h) for h in hs],
        "residual": value_json(residual),
    }


def cmd_random(args) -> dict:
    rng = random.Random(args.seed)
    b = random_branch(rng, genus=args.genus, max_n=args.max_n, max_betabar=args.max_betabar)
    return b.to_json()


def _batch_one(path: str) -> dict:
    b = load_curve(path)
    cx = construct_cx_basis(b)
    dirs = singular_directions(b, cx)
    return {
        "file": Path(path).name,
        "curve": b.to_json(),
        "charExponents": list(b.char_exponents),
        "basis": semimodule_report(cx),
        "directions": directions_json(dirs),
    }


def cmd_batch(args) -> dict:
    files = sorted(str(p) for p in Path(args.directory).glob("*.json"))
    if not files:
        raise InputError(f"no *.json curve files in {args.directory}")
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_batch_one, files))
    else:
        reports = [_batch_one(f) for f in files]
    rows = []
    for rep in reports:
        if out_dir:
            (out_dir / rep["file"].replace(".json", ".report.json")).write_text(_dump(rep, True))
        ndir = sum(len(d["directions"]) for d in rep["directions"])
        rows.append([rep["file"], " ".join(map(str, rep["charExponents"])),
                     " ".join(map(str, rep["basis"]["cx_basis"])), ndir])
    if out_dir:
        with open(out_dir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["file", "exponents", "basis_values", "direction_count"])
            w.writerows(rows)
    return {"processed": len(reports),
            "summary": [{"file": r[0], "exponents": r[1], "basis": r[2], "directions": r[3]}
                        for r in rows]}


# ---------------------------------------------------------------------------
# Output


def _dump(doc, indent: bool) -> str:
    return json.dumps(doc, indent=2 if indent else None, separators=None if indent else (",", ":"))


def _pretty(doc, depth: int = 0) -> str:
    pad = "  " * depth
    if isinstance(doc, dict):
        lines = []
        for k, v in doc.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                          (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, depth + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return "\n".join(lines)
    if isinstance(doc, list):
        return "\n".join(f"{pad}-\n{_pretty(x, depth + 1)}" if isinstance(x, (dict, list))
                         else f"{pad}- {_inline(x)}" for x in doc)
    return pad + _inline(doc)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    if v is None:
        return "-"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kahlerval", description="Values of 1-forms on plane branches.")
    p.add_argument("--version", action="version", version=__version__)
    fmt = argparse.ArgumentParser(add_help=False)
    g = fmt.add_mutually_exclusive_group()
    g.add_argument("--json", dest="style", action="store_const", const="json",
                   help="compact JSON (default: indented JSON)")
    g.add_argument("--pretty", dest="style", action="store_const", const="pretty",
                   help="human-readable text")
    fmt.add_argument("--out", help="write the report to this path instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def curve_cmd(name, fn, help_):
        sp = sub.add_parser(name, parents=[fmt], help=help_)
        sp.add_argument("curve", help="curve file {\"n\": ..., \"terms\": [[exp, \"p/q\"], ...]}")
        sp.set_defaults(fn=fn, needs_curve=True)
        return sp

    curve_cmd("info", cmd_info, "characteristic invariants")
    sp = curve_cmd("basis", cmd_basis, "C[[x]]-basis and the S, C^w, C bases of values")
    sp.add_argument("--kind", choices=["cx", "s", "cw", "c", "all"], default="all")
    sp.add_argument("--trace", action="store_true", help="include the stage-by-stage trace")
    sp = curve_cmd("lambda", cmd_lambda, "value set of 1-forms up to a bound")
    sp.add_argument("--bound", type=int)
    curve_cmd("directions", cmd_directions, "singular directions")
    sp = curve_cmd("classify", cmd_classify, "type and kappa of each basis form")
    sp.add_argument("--companion", action="store_true", help="also compute companion curves")
    curve_cmd("oracle-check", cmd_oracle_check, "compare with the brute-force oracle")
    sp = curve_cmd("decompose", cmd_decompose, "write a form in the C[[x]]-basis")
    sp.add_argument("--form", required=True)
    sp.add_argument("--T", type=int, default=None, help="order to decompose to")

    sp = sub.add_parser("random", parents=[fmt], help="emit a random curve file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--genus", type=int, choices=[1, 2, 3])
    sp.add_argument("--max-n", type=int, default=12)
    sp.add_argument("--max-betabar", type=int, default=200)
    sp.set_defaults(fn=cmd_random, needs_curve=False)

    sp = sub.add_parser("batch", parents=[fmt], help="process every curve file in a directory")
    sp.add_argument("directory")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_batch, needs_curve=False, batch=True)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.needs_curve:
            doc = args.fn(load_curve(args.curve), args)
        else:
            doc = args.fn(args)
    except InputError as ex:
        print(f"input error: {ex}", file=sys.stderr)
        return 2
    except INTERNAL_ERRORS as ex:
        print(f"internal error ({type(ex).__name__}): {ex}", file=sys.stderr)
        return 1
    if args.command == "oracle-check" and args.style == "pretty":
        text = doc["message"]
    elif args.style == "pretty":
        text = _pretty(doc)
    else:
        text = _dump(doc, args.style != "json")
    if args.out and not getattr(args, "batch", False):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.command == "oracle-check" and not doc["equal"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
