import random

import pytest

from conftest import basis_of, campaign, cusp, genus2_n4
from kahlerval.branch import parse_branch, random_in_class
from kahlerval.directions import DirectionReport, q_set, singular_directions, stage_directions
from kahlerval.engine import construct_cx_basis
from kahlerval.exactnum import rat


def test_genus2_n4_has_no_directions():
    b = genus2_n4()
    reps = singular_directions(b)
    assert reps and all(not r.union for r in reps)


def test_cusp_has_no_directions():
    assert all(not r.union for r in singular_directions(cusp()))


def test_characteristic_exponents_report_empty():
    for b in campaign()[:6]:
        reps = [r for r in singular_directions(b, basis_of(b)) if r.stage is None]
        assert [r.exponent for r in reps] == list(b.char_exponents)
        assert all(not r.q_set and not r.per_index_root for r in reps)


def test_q_set_of_cusp_family_first_stage_is_empty():
    b = parse_branch(2, [(3, 1), (5, 1)])
    st = next(s for s in basis_of(b).trace.stages if s.level == 1 and s.stage == 1)
    assert q_set(st, b) == frozenset()


def test_reports_sorted_and_within_level():
    for b in campaign()[:8]:
        reps = singular_directions(b, basis_of(b))
        assert [(r.exponent, r.level) for r in reps] == sorted((r.exponent, r.level) for r in reps)
        for r in reps:
            if r.stage is not None:
                assert r.exponent < b.beta(r.level + 1)


def test_some_campaign_branch_has_a_direction():
    assert any(r.union for b in campaign() for r in singular_directions(b, basis_of(b)))


def test_direction_report_json():
    r = DirectionReport(21, 1, 2, frozenset({5}), {5: rat("-3/4")})
    assert r.to_json() == {"exponent": 21, "level": 1, "stage": 2,
                           "directions": ["-3/4"], "per_form": {"5": "-3/4"}}


@pytest.mark.parametrize("n,chars", [(6, (9, 10)), (9, (12, 13)), (5, (7,)), (4, (6, 7))])
def test_generic_members_share_lambda(n, chars):
    rng = random.Random(n * 100 + chars[0])
    seen, used = set(), 0
    # zero is often a direction (e.g. at 8 for (5; 7)), so fill most exponents
    for _ in range(12):
        b = random_in_class(rng, n, chars, extra_density=0.9)
        cx = construct_cx_basis(b)
        if any(b.coefficient(r.exponent) in r.union for r in singular_directions(b, cx)):
            continue
        used += 1
        seen.add(tuple(sorted(cx.values())))
    assert used >= 5 and len(seen) == 1


def test_roots_are_rational_and_linear():
    for b in campaign()[:10]:
        cx = basis_of(b)
        for st in cx.trace.stages:
            if st.stage == 0 or not st.upp_reports or st.current_exponent >= b.beta(st.level + 1):
                continue
            rep = stage_directions(st, b)
            for k, root in rep.per_index_root.items():
                assert st.upp_reports[k].lead.evaluate(root) == 0
