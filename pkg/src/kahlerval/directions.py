"""Singular directions: coefficient values at which a generic order jumps.

At a stage with current exponent beta, an Upp form k whose generic order
cannot be matched by any Low value (no j with go_k - nu_j in nZ_{>=0}) has
its order pinned to go_k except at the roots of its lead coefficient in a.
Those roots, over all such k, are the singular directions at beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from .branch import Branch
from .engine import CxBasis, StageFamily, Unresolved, construct_cx_basis
from .exactnum import INF, Rational, rat_str
from .pullback import order_on_branch


class NonLinearLead(Exception):
    """Lead coefficient of a Q-index has degree other than 1 in a."""


@dataclass(frozen=True)
class DirectionReport:
    exponent: int
    level: int
    stage: Optional[int]
    q_set: FrozenSet[int]
    per_index_root: Dict[int, Rational] = field(default_factory=dict)

    @property
    def union(self) -> FrozenSet[Rational]:
        return frozenset(self.per_index_root.values())

    def to_json(self) -> dict:
        return {
            "exponent": self.exponent,
            "level": self.level,
            "stage": self.stage,
            "directions": [rat_str(r) for r in sorted(self.union)],
            "per_form": {str(k): rat_str(v) for k, v in sorted(self.per_index_root.items())},
        }


def _is_invariant(st: StageFamily, k: int, b: Branch) -> bool:
    v = st.values[k - 1]
    if isinstance(v, Unresolved):
        return order_on_branch(st.forms[k - 1], b) is INF
    return v is INF


def q_set(st: StageFamily, b: Branch) -> FrozenSet[int]:
    n = b.n
    lows = [st.values[j - 1] for j in st.low]
    out = set()
    for k in st.upp:
        rep = st.upp_reports.get(k)
        if rep is None or rep.generic_order is None:
            continue
        go = rep.generic_order
        if any(isinstance(v, int) and go >= v and (go - v) % n == 0 for v in lows):
            continue
        if _is_invariant(st, k, b):
            continue
        out.add(k)
    return frozenset(out)


def stage_directions(st: StageFamily, b: Branch) -> DirectionReport:
    q = q_set(st, b)
    roots = {}
    for k in sorted(q):
        lead = st.upp_reports[k].lead
        if lead.degree != 1:
            raise NonLinearLead(
                f"exponent {st.current_exponent}, index {k}: lead {lead} has degree {lead.degree}")
        roots[k] = lead.root_if_linear()
    return DirectionReport(st.current_exponent, st.level, st.stage, q, roots)


def singular_directions(b: Branch, cx: Optional[CxBasis] = None) -> List[DirectionReport]:
    if cx is None:
        cx = construct_cx_basis(b)
    out = [DirectionReport(beta, j, None, frozenset()) for j, beta in enumerate(b.char_exponents, 1)]
    for st in cx.trace.stages:
        if st.stage == 0 or not st.upp_reports:
            continue
        if st.current_exponent >= b.beta(st.level + 1):
            continue
        out.append(stage_directions(st, b))
    out.sort(key=lambda r: (r.exponent, r.level))
    return out


def directions_json(reports: List[DirectionReport]) -> list:
    return [r.to_json() for r in reports]
