import json

import pytest

from conftest import basis_of, campaign, cusp, genus2_n4, running_example
from kahlerval.branch import parse_branch
from kahlerval.engine import (
    EngineConfig, Unresolved, certificate, construct_cx_basis, initial_family,
    kappa, run_level,
)
from kahlerval.exactnum import INF, parse_form
from kahlerval.pullback import order_on_branch
from kahlerval.semimodule import lambda_from_basis

BRANCHES = [cusp(), parse_branch(2, [(3, 1), (5, 1)]), parse_branch(3, [(4, 1)]), genus2_n4(),
            running_example()] + list(campaign()[:8])


@pytest.mark.parametrize("b, want", [
    (cusp(), [2, 3]),
    (parse_branch(2, [(3, 1), (5, 1)]), [2, 3]),
    (parse_branch(3, [(4, 1)]), [3, 4, 8]),
    (genus2_n4(), [4, 6, 11, 13]),
])
def test_basis_values(b, want):
    assert sorted(basis_of(b).values()) == want


def test_running_example_basis():
    vals = sorted(basis_of(running_example()).values())
    assert vals == [15, 18, 36, 39, 55, 57, 73, 76, 94, 97, 113, 116, 134, 137, 155]
    assert len({v % 15 for v in vals}) == 15


def test_cusp_basis_forms():
    assert [str(w) for w in basis_of(cusp()).forms()] == ["dx", "dy"]


def test_stage_zero_families():
    f = initial_family(cusp(), 1)
    assert [str(w) for w in f.forms] == ["dx", "dy", "y dx", "y dy"]
    assert list(f.values) == [2, 3, 5, 6]
    assert f.tilde_upp == frozenset({4})
    g = initial_family(parse_branch(3, [(4, 1)]), 1)
    assert [str(w) for w in g.forms] == ["dx", "dy", "y dx", "y dy", "y^2 dx", "y^2 dy"]
    assert list(g.values) == [3, 4, 7, 8, 11, 12]


def test_stage_one_on_perturbed_cusp():
    b = parse_branch(2, [(3, 1), (5, 1)])
    st1 = construct_cx_basis(b).trace.stages_at(1)[1]
    assert str(st1.forms[2]) == str(parse_form("y dx - 2/3 x dy"))
    assert str(st1.forms[3]) == str(parse_form("y dy - 3/2 x^2 dx"))
    assert st1.exact_values(b)[2:] == (7, 8)


def test_genus2_positions_of_semigroup_generators():
    vals = sorted(basis_of(genus2_n4()).values())
    assert vals[1] == 6 and vals[3] == 13


@pytest.mark.parametrize("b", BRANCHES, ids=lambda b: b.label())
def test_trace_invariants(b):
    cx = basis_of(b)
    tr = cx.trace
    for st in tr.stages:
        nu = b.nu(st.level)
        assert len(st.forms) == 2 * nu
        assert certificate(st.forms, nu) != 0
        if st.stage == 0:
            continue
        assert st.low | st.upp == frozenset(range(1, 2 * nu + 1))
        assert len(st.low) == len(st.upp) == nu
        assert set(range(1, 2 * b.nu(st.level - 1) + 1)) <= st.low
        assert st.hat_upp <= st.upp
        classes = [st.values[j - 1] % b.n for j in st.low]
        assert len(set(classes)) == nu
        assert set(classes) == {c for c in range(b.n) if c % b.e(st.level) == 0}
    for l, term in enumerate(tr.terminals[1:b.g], start=1):
        vals = [v for v in term.values]
        assert max(vals) == b.betabar(l + 1)
        assert len({v % b.n for v in vals}) == len(vals)


@pytest.mark.parametrize("b", BRANCHES, ids=lambda b: b.label())
def test_values_are_exact_and_monotone(b):
    cx = basis_of(b)
    for e in cx.entries:
        assert order_on_branch(e.form, b) == e.value
    stages = cx.trace.stages
    for prev, cur in zip(stages, stages[1:]):
        if prev.level != cur.level or prev.stage == 0:
            continue
        for w0, v0, w1, v1 in zip(prev.forms, prev.values, cur.forms, cur.values):
            if isinstance(v0, Unresolved) or isinstance(v1, Unresolved):
                continue
            if w0 == w1:
                assert v0 == v1
            elif v0 is not INF:
                # a rewritten form either moved up or swapped roles with its partner
                assert v1 > v0 or v1 in prev.values


@pytest.mark.parametrize("b", BRANCHES, ids=lambda b: b.label())
def test_chu_value_relation(b):
    vals = basis_of(b).values()
    lam = lambda_from_basis(vals, b.n)
    for v in vals:
        for l in range(1, b.g):
            if v <= b.betabar(l):
                assert lam.contains(v + b.betabar(l + 1) - b.betabar(l))


def test_classify_genus2():
    cx = basis_of(genus2_n4())
    reps = {e.value: cx.report(i, companion=True) for i, e in enumerate(cx.entries)}
    assert reps[4].type == "trivial" and reps[6].type == "trivial"
    assert reps[11].type == "1" and reps[11].kappa == 1
    assert reps[13].type == "2" and reps[13].checks["value_relation"]
    assert reps[11].companion.terms == ((6, 1),)


def test_kappa():
    b = genus2_n4()
    assert kappa(b, 11) == 1 and kappa(b, 13) == 1 and kappa(b, 14) == 2 and kappa(b, 5) == 0


def test_run_level_terminal():
    t = run_level(genus2_n4(), 1)
    assert t.values == (4, 6, 11, 13)
    assert [str(w) for w in t.forms[2:]] == ["y dx - 2/3 x dy", "-3/2 x^2 dx + y dy"]


def test_precision_restarts_agree():
    b = campaign()[0]
    small = construct_cx_basis(b, EngineConfig(initial_precision=16))
    assert small.values() == basis_of(b).values()


def test_trace_json_is_deterministic():
    b = campaign()[1]
    a = json.dumps(construct_cx_basis(b).trace.to_json(), sort_keys=False)
    c = json.dumps(construct_cx_basis(b).trace.to_json(), sort_keys=False)
    assert a == c
