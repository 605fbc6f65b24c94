"""Approximate roots f_1, ..., f_g of a branch as exact polynomials.

f_j is the irreducible equation of the truncation below beta_j. That
truncation is (t^n, p(t^e)) with e = e_{j-1}, so after s = t^e it becomes
(s^m, p(s)) with m = nu_{j-1}, and

    f_j(x, y) = prod_{s^m = x} (y - p(s)) = +- Res_s(s^m - x, y - p(s)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import sympy

from .branch import Branch
from .exactnum import Value, XYPoly, rat
from .pullback import order_on_function

_x, _y, _s = sympy.symbols("x y s")


@dataclass(frozen=True)
class ApproxRoot:
    index: int
    poly: XYPoly
    value_on_branch: Value

    def to_json(self) -> dict:
        return {"index": self.index, "poly": str(self.poly), "value": self.value_on_branch}


def _truncation_poly(b: Branch, j: int):
    e = b.e(j - 1)
    beta = b.beta(j)
    p = sympy.Integer(0)
    for exp, c in b.terms:
        if exp < beta:
            p += sympy.Rational(int(c.numerator), int(c.denominator)) * _s ** (exp // e)
    return p


def _to_xypoly(expr) -> XYPoly:
    poly = sympy.Poly(sympy.expand(expr), _x, _y)
    terms = {}
    for (i, j), c in poly.terms():
        c = sympy.Rational(c)
        terms[(int(i), int(j))] = rat(f"{c.p}/{c.q}")
    return XYPoly(terms)


@lru_cache(maxsize=512)
def _root_poly(b: Branch, j: int) -> XYPoly:
    m = b.nu(j - 1)
    p = _truncation_poly(b, j)
    res = sympy.resultant(_s ** m - _x, _y - p, _s)
    f = _to_xypoly(res)
    lead = f.coeff(0, m)
    return f.scale(1 / lead)


def approximate_root(b: Branch, j: int) -> ApproxRoot:
    if not 1 <= j <= b.g:
        raise ValueError(f"approximate roots are indexed 1..{b.g}, got {j}")
    f = _root_poly(b, j)
    return ApproxRoot(j, f, order_on_function(f, b))


def approximate_roots(b: Branch):
    return [approximate_root(b, j) for j in range(1, b.g + 1)]
