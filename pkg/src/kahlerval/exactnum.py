"""Exact scalars, polynomials, truncated series and 1-forms.

Rationals are ``gmpy2.mpq`` values: always in lowest terms with a positive
denominator, and several times faster than ``fractions.Fraction`` in the
dense series kernels that dominate the running time.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

from gmpy2 import mpq

Rational = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


class InputError(ValueError):
    """Malformed user input (curve files, form strings, rationals)."""


def rat(x) -> "Rational":
    """Coerce int, str ("p/q"), Fraction or mpq to an exact rational."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
            raise InputError(f"not a rational: {x!r}")
        if "/" in s and int(s.split("/")[1]) == 0:
            raise InputError(f"zero denominator: {x!r}")
        return mpq(s)
    raise InputError(f"not a rational: {x!r}")


def rat_str(q) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    return str(rat(q))


class _Infinity:
    """The value of a 1-form whose pullback vanishes identically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "infinity"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("kahlerval.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Value = Union[int, _Infinity]


def is_inf(v) -> bool:
    return v is INF


def value_str(v) -> str:
    return "infinity" if v is INF else str(int(v))


def value_json(v):
    """Integers stay integers, Infinity becomes the string "infinity"."""
    return "infinity" if v is INF else int(v)


# ---------------------------------------------------------------------------
# One-parameter scalars


class ParamScalar:
    """Polynomial in a single parameter ``a`` with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: Tuple = tuple(cs)

    @classmethod
    def const(cls, c) -> "ParamScalar":
        return cls((c,))

    @classmethod
    def var(cls) -> "ParamScalar":
        return cls((0, 1))

    @staticmethod
    def lift(x) -> "ParamScalar":
        return x if isinstance(x, ParamScalar) else ParamScalar((x,))

    @property
    def degree(self) -> int:
        """Degree in ``a``; -1 for the zero element."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self):
        return self.coeffs[0] if self.coeffs else ZERO

    def evaluate(self, a):
        a = rat(a)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def root_if_linear(self):
        if self.degree != 1:
            return None
        c0, c1 = self.coeffs
        return -c0 / c1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, ParamScalar):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Rational, Fraction)):
            return self.coeffs == ParamScalar((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.constant_value())
        return hash(self.coeffs)

    def __add__(self, other):
        o = ParamScalar.lift(other).coeffs
        s = self.coeffs
        if len(s) < len(o):
            s, o = o, s
        out = list(s)
        for i, c in enumerate(o):
            out[i] = out[i] + c
        return ParamScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-ParamScalar.lift(other))

    def __rsub__(self, other):
        return ParamScalar.lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, ParamScalar):
            c = rat(other)
            return ParamScalar(x * c for x in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ParamScalar()
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return ParamScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = rat(other)
        return ParamScalar(x / c for x in self.coeffs)

    def __pow__(self, k: int):
        out = ParamScalar.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"ParamScalar({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("a" if k == 1 else f"a^{k}")
            parts.append(_signed_term(c, mono, sep="*"))
        return _join_terms(parts)

    def to_json(self):
        return [rat_str(c) for c in self.coeffs]


def _signed_term(c, mono: str, sep: str = " ") -> Tuple[bool, str]:
    neg = c < 0
    mag = -c if neg else c
    if not mono:
        body = rat_str(mag)
    elif mag == 1:
        body = mono
    else:
        body = f"{rat_str(mag)}{sep}{mono}"
    return neg, body


def _join_terms(parts) -> str:
    if not parts:
        return "0"
    out = ""
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


# ---------------------------------------------------------------------------
# Univariate polynomials in t


Coeff = Union["Rational", ParamScalar]


class TPoly:
    """Sparse polynomial in ``t`` with rational or ParamScalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[int, Coeff]] = None):
        self.terms: Dict[int, Coeff] = {}
        if terms:
            for e, c in terms.items():
                if e < 0:
                    raise ValueError("negative t-exponent")
                if c:
                    self.terms[int(e)] = c

    @classmethod
    def from_dense(cls, coeffs) -> "TPoly":
        return cls({e: c for e, c in enumerate(coeffs) if c})

    def order(self) -> Value:
        return min(self.terms) if self.terms else INF

    def degree(self) -> int:
        return max(self.terms) if self.terms else -1

    def coeff(self, e: int) -> Coeff:
        return self.terms.get(e, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def leading(self):
        """(order, coefficient) of the lowest term."""
        e = self.order()
        return e, (self.terms[e] if e is not INF else ZERO)

    def __add__(self, other: "TPoly") -> "TPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return TPoly(out)

    def __neg__(self):
        return TPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TPoly") -> "TPoly":
        return self + (-other)

    def scale(self, c) -> "TPoly":
        return TPoly({e: c * v for e, v in self.terms.items()})

    def shift(self, k: int) -> "TPoly":
        return TPoly({e + k: v for e, v in self.terms.items()})

    def mul(self, other: "TPoly", prec: Optional[int] = None) -> "TPoly":
        """Product, keeping only exponents < prec when prec is given."""
        out: Dict[int, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if prec is not None and e >= prec:
                    continue
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return TPoly(out)

    __mul__ = mul

    def truncate(self, prec: int) -> "TPoly":
        return TPoly({e: c for e, c in self.terms.items() if e < prec})

    def derivative(self) -> "TPoly":
        return TPoly({e - 1: c * e for e, c in self.terms.items() if e})

    def specialize(self, a) -> "TPoly":
        """Substitute a rational value for the parameter."""
        out = {}
        for e, c in self.terms.items():
            out[e] = c.evaluate(a) if isinstance(c, ParamScalar) else c
        return TPoly(out)

    def __eq__(self, other):
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        return f"TPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if isinstance(c, ParamScalar) and not c.is_constant():
                parts.append((False, f"({c})" + (f"*{mono}" if mono else "")))
            else:
                c = c.constant_value() if isinstance(c, ParamScalar) else c
                parts.append(_signed_term(c, mono, sep="*"))
        return _join_terms(parts)


def tpoly_order(p: TPoly) -> Value:
    """Least exponent with a nonzero coefficient; INF for the zero polynomial."""
    return p.order()


# ---------------------------------------------------------------------------
# Bivariate polynomials and 1-forms


class XYPoly:
    """Sparse polynomial in x, y with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Tuple[int, int], object]] = None):
        self.terms: Dict[Tuple[int, int], "Rational"] = {}
        if terms:
            for (i, j), c in terms.items():
                c = rat(c)
                if c:
                    self.terms[(int(i), int(j))] = c

    @classmethod
    def _raw(cls, terms: Dict[Tuple[int, int], "Rational"]) -> "XYPoly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "XYPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "XYPoly":
        return cls({(i, j): c})

    @classmethod
    def x(cls) -> "XYPoly":
        return cls.monomial(1, 0)

    @classmethod
    def y(cls) -> "XYPoly":
        return cls.monomial(0, 1)

    def is_zero(self) -> bool:
        return not self.terms

    def y_degree(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def x_degree(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def coeff(self, i: int, j: int):
        return self.terms.get((i, j), ZERO)

    def leading_y_coeff(self) -> "XYPoly":
        d = self.y_degree()
        return XYPoly._raw({(i, 0): c for (i, j), c in self.terms.items() if j == d})

    def at_x0(self) -> Dict[int, "Rational"]:
        """Coefficients of y^j after setting x = 0."""
        return {j: c for (i, j), c in self.terms.items() if i == 0}

    def __add__(self, other: "XYPoly") -> "XYPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return XYPoly._raw(out)

    def __neg__(self):
        return XYPoly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "XYPoly") -> "XYPoly":
        return self + (-other)

    def scale(self, c, xpow: int = 0) -> "XYPoly":
        c = rat(c)
        if not c:
            return XYPoly()
        return XYPoly._raw({(i + xpow, j): c * v for (i, j), v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, XYPoly):
            return self.scale(other)
        out: Dict[Tuple[int, int], "Rational"] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return XYPoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "XYPoly":
        out = XYPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff_x(self) -> "XYPoly":
        return XYPoly._raw({(i - 1, j): c * i for (i, j), c in self.terms.items() if i})

    def diff_y(self) -> "XYPoly":
        return XYPoly._raw({(i, j - 1): c * j for (i, j), c in self.terms.items() if j})

    def __eq__(self, other):
        if not isinstance(other, XYPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        # Higher powers of y first, then increasing powers of x.
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][1], kv[0][0]))

    def __repr__(self):
        return f"XYPoly({self})"

    def __str__(self):
        return self.render()

    def render(self, suffix: str = "") -> str:
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = " ".join(_var("x", i) + _var("y", j))
            if suffix:
                mono = f"{mono} {suffix}".strip()
            parts.append(_signed_term(c, mono))
        return _join_terms(parts)


def _var(name: str, k: int):
    if k == 0:
        return []
    return [name if k == 1 else f"{name}^{k}"]


class OneForm:
    """The 1-form ``adx*dx + ady*dy`` with polynomial coefficients."""

    __slots__ = ("adx", "ady")

    def __init__(self, adx: Optional[XYPoly] = None, ady: Optional[XYPoly] = None):
        self.adx = adx if adx is not None else XYPoly()
        self.ady = ady if ady is not None else XYPoly()

    @classmethod
    def dx(cls) -> "OneForm":
        return cls(XYPoly.const(1), XYPoly())

    @classmethod
    def dy(cls) -> "OneForm":
        return cls(XYPoly(), XYPoly.const(1))

    @classmethod
    def d(cls, f: XYPoly) -> "OneForm":
        """Exterior derivative of a function."""
        return cls(f.diff_x(), f.diff_y())

    def is_zero(self) -> bool:
        return self.adx.is_zero() and self.ady.is_zero()

    def y_degree(self) -> int:
        return max(self.adx.y_degree(), self.ady.y_degree())

    def x_degree(self) -> int:
        return max(self.adx.x_degree(), self.ady.x_degree())

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.adx + other.adx, self.ady + other.ady)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.adx - other.adx, self.ady - other.ady)

    def __neg__(self):
        return OneForm(-self.adx, -self.ady)

    def times(self, f: XYPoly) -> "OneForm":
        return OneForm(self.adx * f, self.ady * f)

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.adx == other.adx and self.ady == other.ady

    def __hash__(self):
        return hash((self.adx, self.ady))

    def monomials(self) -> Iterator[Tuple[str, int, int, "Rational"]]:
        for (i, j), c in self.adx.terms.items():
            yield "dx", i, j, c
        for (i, j), c in self.ady.terms.items():
            yield "dy", i, j, c

    def __repr__(self):
        return f"OneForm({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for comp, name in ((self.adx, "dx"), (self.ady, "dy")):
            for (i, j), c in sorted(comp.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
                mono = " ".join(_var("x", i) + _var("y", j) + [name])
                parts.append(_signed_term(c, mono))
        return _join_terms(parts)


def poly_add(p: XYPoly, q: XYPoly) -> XYPoly:
    return p + q


def poly_mul(p: XYPoly, q: XYPoly) -> XYPoly:
    return p * q


def form_scale(form: OneForm, c, xpow: int = 0) -> OneForm:
    """c * x^xpow * form, componentwise."""
    return OneForm(form.adx.scale(c, xpow), form.ady.scale(c, xpow))


# ---------------------------------------------------------------------------
# Parsing "y dx - 2/3 x dy", "5*x*dy - 6*y*dx", "y^5 - x^6" and friends

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<diff>d[xy])\b|(?P<var>[xy])"
    r"(?:\s*(?:\^|\*\*)\s*(?P<exp>\d+))?|(?P<op>[-+*()]))"
)


def _tokens(text: str):
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse {text!r} near position {pos}")
        pos = m.end()
        yield m


def _parse_terms(text: str, allow_diff: bool):
    """Yield (coefficient, i, j, diff) for each additive term."""
    if not text.strip():
        raise InputError("empty expression")
    sign = 1
    coef = ONE
    i = j = 0
    diff = None
    seen = False
    depth = 0
    for m in _tokens(text):
        if m.group("op") in ("+", "-"):
            if depth:
                raise InputError(f"signs inside parentheses are not supported: {text!r}")
            if seen:
                yield sign * coef, i, j, diff
                coef, i, j, diff, seen = ONE, 0, 0, None, False
                sign = 1
            if m.group("op") == "-":
                sign = -sign
        elif m.group("op") == "(":
            depth += 1
        elif m.group("op") == ")":
            depth -= 1
            if depth < 0:
                raise InputError(f"unbalanced parentheses: {text!r}")
        elif m.group("op") == "*":
            continue
        elif m.group("num"):
            q = rat(m.group("num"))
            coef = coef * q
            seen = True
        elif m.group("var"):
            k = int(m.group("exp") or 1)
            if m.group("var") == "x":
                i += k
            else:
                j += k
            seen = True
        elif m.group("diff"):
            if not allow_diff:
                raise InputError(f"unexpected differential in function {text!r}")
            if diff is not None:
                raise InputError(f"two differentials in one term of {text!r}")
            diff = m.group("diff")
            seen = True
    if depth:
        raise InputError(f"unbalanced parentheses: {text!r}")
    if not seen:
        raise InputError(f"dangling sign in {text!r}")
    yield sign * coef, i, j, diff


def parse_poly(text: str) -> XYPoly:
    acc: Dict[Tuple[int, int], "Rational"] = {}
    for c, i, j, _ in _parse_terms(text, allow_diff=False):
        acc[(i, j)] = acc.get((i, j), ZERO) + c
    return XYPoly(acc)


def parse_form(text: str) -> OneForm:
    adx: Dict[Tuple[int, int], "Rational"] = {}
    ady: Dict[Tuple[int, int], "Rational"] = {}
    for c, i, j, diff in _parse_terms(text, allow_diff=True):
        if diff is None:
            raise InputError(f"term without dx or dy in {text!r}")
        target = adx if diff == "dx" else ady
        target[(i, j)] = target.get((i, j), ZERO) + c
    return OneForm(XYPoly(adx), XYPoly(ady))
