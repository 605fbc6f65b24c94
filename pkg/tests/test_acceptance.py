"""Acceptance criteria 1-12, one test each.

Every test prints a single ``[acceptance N] PASS|FAIL ...`` line (outside
pytest's capture) before asserting, so ``pytest -v`` output doubles as the
acceptance report.
"""

from __future__ import annotations

import random
import time

import pytest

from conftest import basis_of, campaign, cusp, fixed_branches, genus2_n4, running_example
from kahlerval.approots import approximate_roots
from kahlerval.branch import exponent_set, random_in_class, semigroup_generators
from kahlerval.directions import singular_directions
from kahlerval.engine import construct_cx_basis
from kahlerval.exactnum import INF, OneForm, XYPoly, parse_form, parse_poly, rat
from kahlerval.oracle import oracle_lambda
from kahlerval.pullback import (
    beg_exceeds, decompose, default_T, order_on_branch, order_on_function, pullback_form,
)
from kahlerval.semimodule import (
    closure_upto, is_c_collection, lambda_from_basis, minimal_generators, recover_semigroup,
)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def _gens(b):
    return semigroup_generators(b)


def test_01_running_example(report):
    t0 = time.perf_counter()
    b = running_example()
    got = {
        "nu(y^5 - x^6)": order_on_function(parse_poly("y^5 - x^6"), b),
        "nu(5x dy - 6y dx)": order_on_branch(parse_form("5 x dy - 6 y dx"), b),
        "beg>21": beg_exceeds(parse_form("5 x dy - 6 y dx"), b, 21),
        "beg>24": beg_exceeds(parse_form("5 x dy - 6 y dx"), b, 24),
        "E": exponent_set(b, 26),
        "sg": _gens(b),
    }
    want = {"nu(y^5 - x^6)": 96, "nu(5x dy - 6y dx)": 39, "beg>21": True, "beg>24": False,
            "E": [18, 21, 24, 25, 26], "sg": (15, 18, 97)}
    dt = time.perf_counter() - t0
    ok = got == want and dt < 10
    report(1, ok, f"running example {got} in {dt:.2f}s")


def test_02_genus2_bases(report):
    t0 = time.perf_counter()
    b = genus2_n4()
    cx = construct_cx_basis(b)
    lam = lambda_from_basis(cx.values(), b.n)
    got = {
        "cx": sorted(cx.values()),
        "s": minimal_generators(lam, "s", _gens(b)),
        "cw": minimal_generators(lam, "cw", _gens(b)),
        "c": minimal_generators(lam, "c", _gens(b)),
    }
    dt = time.perf_counter() - t0
    want = {"cx": [4, 6, 11, 13], "s": [4, 6, 11, 13], "cw": [4, 6, 11], "c": [4, 6]}
    report(2, got == want and dt < 1, f"{got} in {dt:.3f}s")


def test_03_oracle_equivalence(report):
    t0 = time.perf_counter()
    branches = campaign()[:20]
    bad = []
    for b in branches:
        vals = construct_cx_basis(b).values()
        lam = lambda_from_basis(vals, b.n)
        bound = max(vals) + 2 * b.n
        if lam.elements_upto(bound) != oracle_lambda(b, bound):
            bad.append(b.label())
    dt = time.perf_counter() - t0
    shape_ok = all(b.g <= 3 and b.n <= 12 and b.betabar(b.g) <= 200 for b in branches)
    ok = not bad and shape_ok and len(branches) >= 20 and dt < 60
    report(3, ok, f"{len(branches)} branches, mismatches {bad}, {dt:.1f}s")


def test_04_c_collection(report):
    bad = []
    for b in campaign()[:20]:
        lam = lambda_from_basis(basis_of(b).values(), b.n)
        ok, witness = is_c_collection(lam, _gens(b))
        if not ok:
            bad.append((b.label(), witness))
    report(4, not bad, f"20 branches, failures {bad}")


def test_05_semigroup_in_s_basis(report):
    bad = []
    for b in campaign()[:20]:
        lam = lambda_from_basis(basis_of(b).values(), b.n)
        s_basis = set(minimal_generators(lam, "s", _gens(b)))
        if not set(_gens(b)) <= s_basis:
            bad.append(b.label())
    report(5, not bad, f"20 branches, failures {bad}")


def test_06_semigroup_recovery(report):
    branches = list(campaign()) + fixed_branches()
    bad = [b.label() for b in branches
           if recover_semigroup(sorted(basis_of(b).values())) != _gens(b)]
    report(6, not bad, f"{len(branches)} branches, failures {bad}")


POWER2_CLASSES = [(4, (6, 7)), (4, (10, 13)), (8, (12, 14, 15))]


def test_07_power_of_two(report):
    rng = random.Random(77)
    bad = []
    for n, chars in POWER2_CLASSES:
        seen = set()
        for _ in range(10):
            b = random_in_class(rng, n, chars)
            cx = construct_cx_basis(b)
            seen.add(tuple(sorted(cx.values())))
            lam = lambda_from_basis(cx.values(), n)
            bound = max(cx.values()) + 2 * n
            if lam.elements_upto(bound) != closure_upto([n, chars[0]], "c", _gens(b), bound):
                bad.append((b.label(), "Lambda"))
            if any(r.union for r in singular_directions(b, cx)):
                bad.append((b.label(), "direction"))
        if len(seen) != 1:
            bad.append(((n,) + chars, f"{len(seen)} distinct bases"))
    report(7, not bad, f"3 classes x 10 coefficient sets, failures {bad}")


def test_08_cusp_ledger(report):
    b = cusp()
    tr = construct_cx_basis(b).trace
    st0, st1 = tr.stages_at(1)[:2]
    got = {
        "stage0": [str(w) for w in st0.forms],
        "values0": list(st0.values),
        "reduced": sorted(str(st1.forms[k - 1]) for k in (3, 4)),
        "reduced_values": [st1.exact_values(b)[k - 1] for k in (3, 4)],
        "final": [str(w) for w in construct_cx_basis(b).forms()],
    }
    want_reduced = sorted([str(parse_form("y dx - 2/3 x dy")), str(parse_form("y dy - 3/2 x^2 dx"))])
    want = {"stage0": ["dx", "dy", "y dx", "y dy"], "values0": [2, 3, 5, 6],
            "reduced": want_reduced, "reduced_values": [INF, INF], "final": ["dx", "dy"]}
    report(8, got == want, f"{got}")


def test_09_approximate_roots(report):
    branches = fixed_branches() + list(campaign())
    bad = []
    for b in branches:
        for r in approximate_roots(b):
            if r.value_on_branch != b.betabar(r.index) or r.poly.y_degree() != b.nu(r.index - 1):
                bad.append((b.label(), r.index))
            elif order_on_function(r.poly, b) != b.betabar(r.index):
                bad.append((b.label(), r.index, "recheck"))
    report(9, not bad, f"{len(branches)} branches, failures {bad}")


def _random_form(rng, deg=3):
    def poly():
        return XYPoly({(i, j): rat(rng.randint(-3, 3))
                       for i in range(deg + 1) for j in range(deg + 1 - i) if rng.random() < 0.4})
    return OneForm(poly(), poly())


def test_10_decomposition(report):
    rng = random.Random(10)
    branches = fixed_branches() + list(campaign()[:5])
    bad = []
    for b in branches:
        cx = basis_of(b)
        basis = [(e.form, e.value) for e in cx.entries]
        T = default_T(cx.values(), b.n)
        for _ in range(50):
            w = _random_form(rng)
            if w.is_zero():
                continue
            hs, residual = decompose(w, basis, b, T)
            rest = w
            for h, (f, _) in zip(hs, basis):
                rest = rest - f.times(h)
            again = order_on_branch(rest, b)
            if not (residual > T and again > T):
                bad.append((b.label(), str(w)))
    report(10, not bad, f"{len(branches)} branches x 50 forms, failures {bad[:3]}")


def test_11_companion_curves(report):
    branches = fixed_branches() + list(campaign()[:12])
    count, bad = 0, []
    for b in branches:
        cx = basis_of(b)
        for i, e in enumerate(cx.entries):
            rep = cx.report(i, companion=True)
            if rep.type not in ("1", "2"):
                continue
            count += 1
            c = rep.companion
            start = rep.beg_value if b.beta(rep.birth_level + 1) is INF else \
                min(rep.beg_value, b.beta(rep.birth_level + 1))
            level = sum(1 for beta in b.char_exponents if beta < start)
            support_ok = all(x % b.e(level) == 0 for x, _ in c.terms if x >= start)
            T = 2 * (max(e.value, b.beta(b.g)) + b.n)
            order = pullback_form(e.form, c, prec=T + 1).order()
            if not (support_ok and order > T and rep.checks.get("companion_equisingular")):
                bad.append((b.label(), e.value))
    report(11, not bad and count > 0, f"{count} type-1/2 forms, failures {bad}")


def test_12_direction_semantics(report):
    rng = random.Random(12)
    checked, bad = 0, []
    for b in campaign():
        cx = basis_of(b)
        for r in singular_directions(b, cx):
            if not r.per_index_root:
                continue
            st = next(s for s in cx.trace.stages if s.level == r.level and s.stage == r.stage)
            for k, root in r.per_index_root.items():
                w = st.forms[k - 1]
                go = st.upp_reports[k].generic_order
                checked += 1
                if not order_on_branch(w, b.with_coefficient(r.exponent, root)) > go:
                    bad.append((b.label(), r.exponent, k, "root"))
                others = {root + 1, root - rat("1/2")}
                others |= {rat(f"{rng.randint(-9, 9)}/{rng.randint(1, 4)}") for _ in range(2)}
                for a in others - {root}:
                    if order_on_branch(w, b.with_coefficient(r.exponent, a)) != go:
                        bad.append((b.label(), r.exponent, k, str(a)))
    report(12, not bad and checked > 0, f"{checked} (exponent, form) pairs, failures {bad[:3]}")
