"""Pullbacks of functions and 1-forms along parametrizations.

Two evaluation paths live here.

* Exact sparse pullbacks (``pullback_function``, ``pullback_form``) work over
  any ``ParamCurve``, including curves with a symbolic coefficient.
* A dense truncated kernel (``CurvePowers``, ``Jet``) handles branches with
  rational coefficients. A jet stores, for a 1-form w, the Taylor data of
  t * (Gamma_eps)^* w in eps, where Gamma_eps replaces y(t) by y(t) + eps t^b.
  The data do not depend on b:

      S_m = t^(m b) * (U_m + m b V_m)

  is the eps^m coefficient. Jets are linear in the form, so the engine
  updates them alongside the forms instead of recomputing pullbacks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .branch import Branch, ExponentLadder, ParamCurve, as_curve, make_curve
from .exactnum import (
    INF, ONE, ZERO, OneForm, ParamScalar, Rational, TPoly, Value, XYPoly, rat,
)


class PullbackError(Exception):
    pass


class NonDivisibleOrder(PullbackError):
    """Order of a pullback along a non-primitive curve not divisible by e."""


class StuckCoefficient(PullbackError):
    """Leading coefficient does not depend (linearly) on the free coefficient."""


class CompanionSupportViolation(PullbackError):
    """A companion coefficient is nonzero where equisingularity forbids it."""


@dataclass(frozen=True)
class PullbackResult:
    series: TPoly
    primitivity_factor: int

    def order(self) -> Value:
        return self.series.order()


@dataclass(frozen=True)
class GenericOrderReport:
    generic_order: Value
    lead_coefficient: ParamScalar
    is_constant_in_a: bool
    root_if_linear: Optional[Rational]

    def to_json(self) -> dict:
        from .exactnum import rat_str, value_json
        return {
            "generic_order": value_json(self.generic_order),
            "lead_coefficient": self.lead_coefficient.to_json(),
            "is_constant_in_a": self.is_constant_in_a,
            "root_if_linear": None if self.root_if_linear is None else rat_str(self.root_if_linear),
        }


def _report(go: Value, lead: ParamScalar) -> GenericOrderReport:
    return GenericOrderReport(go, lead, lead.is_constant(), lead.root_if_linear())


# ---------------------------------------------------------------------------
# Exact sparse pullbacks


def _sparse_powers(y: TPoly, k: int, prec: Optional[int] = None) -> List[TPoly]:
    out = [TPoly({0: ONE})]
    for _ in range(k):
        out.append(out[-1].mul(y, prec))
    return out


def _theta(p: TPoly) -> TPoly:
    """t d/dt."""
    return TPoly({e: c * e for e, c in p.terms.items()})


def pullback_function(f: XYPoly, c) -> PullbackResult:
    """f(x(t), y(t)) exactly."""
    curve = as_curve(c)
    if curve.vertical:
        return PullbackResult(TPoly({j: v for (i, j), v in f.terms.items() if i == 0}), 1)
    ys = _sparse_powers(curve.y_series(), max(f.y_degree(), 0))
    acc = TPoly()
    for (i, j), v in f.terms.items():
        acc = acc + ys[j].shift(curve.n * i).scale(v)
    return PullbackResult(acc, curve.primitivity_factor)


def pullback_form(w: OneForm, c, prec: Optional[int] = None) -> PullbackResult:
    """t * Gamma^* w as an exact polynomial in t, or its terms below ``prec``."""
    curve = as_curve(c)
    if curve.vertical:
        # x = 0, y = t: only the dy-terms free of x survive.
        return PullbackResult(TPoly({j + 1: v for (i, j), v in w.ady.terms.items() if i == 0}), 1)
    n = curve.n
    y = curve.y_series()
    ty = _theta(y)
    if prec is not None:
        y, ty = y.truncate(prec), ty.truncate(prec)
    ys = _sparse_powers(y, max(w.y_degree(), 0), prec)
    acc = TPoly()
    for (i, j), v in w.adx.terms.items():
        acc = acc + ys[j].shift(n * (i + 1)).scale(v * n)
    dy_part = TPoly()
    for (i, j), v in w.ady.terms.items():
        dy_part = dy_part + ys[j].shift(n * i).scale(v)
    acc = acc + dy_part.mul(ty, prec)
    if prec is not None:
        acc = acc.truncate(prec)
    return PullbackResult(acc, curve.primitivity_factor)


def _normalize(order: Value, e: int) -> Value:
    if order is INF:
        return INF
    if order % e:
        raise NonDivisibleOrder(f"order {order} not divisible by primitivity factor {e}")
    return order // e


def order_on_function(f: XYPoly, c) -> Value:
    if isinstance(c, Branch):
        return _fast_function_order(f, c)
    r = pullback_function(f, c)
    return _normalize(r.order(), r.primitivity_factor)


def order_on_branch(w: OneForm, c) -> Value:
    """nu(w) = ord(t Gamma^* w) / e, INF when the pullback vanishes."""
    if isinstance(c, Branch):
        return _fast_form_order(w, c)
    r = pullback_form(w, c)
    return _normalize(r.order(), r.primitivity_factor)


# ---------------------------------------------------------------------------
# Dense truncated kernel


def _axpy(dst: list, c, src: list, shift: int) -> None:
    """dst[e + shift] += c * src[e] for every e that fits."""
    if not c:
        return
    top = len(dst) - shift
    if top <= 0:
        return
    for e in range(min(top, len(src))):
        v = src[e]
        if v:
            dst[e + shift] += c * v


def _order_or(xs: list, default: int) -> int:
    e = _first_nonzero(xs)
    return default if e is None else e


def _first_nonzero(xs: list, limit: Optional[int] = None) -> Optional[int]:
    stop = len(xs) if limit is None else min(limit, len(xs))
    for e in range(stop):
        if xs[e]:
            return e
    return None


class CurvePowers:
    """Truncated powers y^k and t d/dt (y^k) of a rational series y(t)."""

    def __init__(self, y_terms: Sequence[Tuple[int, Rational]], prec: int):
        self.y_terms = [(int(e), rat(c)) for e, c in y_terms if c]
        self.prec = prec
        one = [ZERO] * prec
        if prec:
            one[0] = ONE
        self._Y = [one]
        self._TY = [[ZERO] * prec]

    def Y(self, k: int) -> list:
        while len(self._Y) <= k:
            prev = self._Y[-1]
            nxt = [ZERO] * self.prec
            for e, c in self.y_terms:
                _axpy(nxt, c, prev, e)
            self._Y.append(nxt)
            self._TY.append([v * i if v else ZERO for i, v in enumerate(nxt)])
        return self._Y[k]

    def TY(self, k: int) -> list:
        self.Y(k)
        return self._TY[k]


class Jet:
    """Taylor data (U_m, V_m), 0 <= m <= D, truncated below ``prec``."""

    __slots__ = ("n", "prec", "D", "U", "V")

    def __init__(self, n: int, prec: int, D: int, U=None, V=None):
        self.n = n
        self.prec = prec
        self.D = D
        self.U = U if U is not None else [[ZERO] * prec for _ in range(D + 1)]
        self.V = V if V is not None else [[ZERO] * prec for _ in range(D + 1)]

    def copy(self) -> "Jet":
        return Jet(self.n, self.prec, self.D, [list(u) for u in self.U], [list(v) for v in self.V])

    def order(self) -> Optional[int]:
        """Order of the pullback itself, None if it vanishes below prec."""
        return _first_nonzero(self.U[0])

    def lead(self):
        e = self.order()
        return None if e is None else self.U[0][e]

    def combined(self, other: "Jet", c, xpow: int) -> "Jet":
        """Jet of (self - c x^xpow other)."""
        out = self.copy()
        s = self.n * xpow
        D = max(self.D, other.D)
        while out.D < D:
            out.U.append([ZERO] * self.prec)
            out.V.append([ZERO] * self.prec)
            out.D += 1
        for m in range(other.D + 1):
            _axpy(out.U[m], -c, other.U[m], s)
            _axpy(out.V[m], -c, other.V[m], s)
        return out

    def generic(self, beta: int, a_actual, limit: Optional[int] = None):
        """Generic order and lead coefficient (polynomial in a) at ``beta``.

        Returns (None, None) when every S_m vanishes below min(prec, limit).
        """
        stop = self.prec if limit is None else min(self.prec, limit)
        U, V = self.U, self.V
        mmax = self.D
        start = self._lower_bound(beta)
        for e in range(start, stop):
            if U[0][e]:
                return e, self._lead_at(e, beta, a_actual)
            m = 1
            while m <= mmax and m * beta <= e:
                k = e - m * beta
                if k < len(U[m]) and (U[m][k] or V[m][k]):
                    if U[m][k] + m * beta * V[m][k]:
                        return e, self._lead_at(e, beta, a_actual)
                m += 1
        return None, None

    def _lower_bound(self, beta: int) -> int:
        lb = _order_or(self.U[0], self.prec)
        for m in range(1, self.D + 1):
            o = min(_order_or(self.U[m], self.prec), _order_or(self.V[m], self.prec))
            lb = min(lb, m * beta + o)
        return lb

    def trimmed(self, beta: int) -> "Jet":
        """Drop the parts of U_m, V_m that no exponent >= beta can reach."""
        U = [self.U[0]]
        V = [self.V[0]]
        for m in range(1, self.D + 1):
            keep = self.prec - m * beta
            if keep <= 0:
                break
            U.append(self.U[m][:keep])
            V.append(self.V[m][:keep])
        return Jet(self.n, self.prec, len(U) - 1, U, V)

    def _lead_at(self, e: int, beta: int, a_actual) -> ParamScalar:
        eps = []
        for m in range(self.D + 1):
            k = e - m * beta
            if k < 0:
                break
            if k < len(self.U[m]):
                eps.append(self.U[m][k] + m * beta * self.V[m][k])
            else:
                eps.append(ZERO)
        # sum_m eps_m (a - a_actual)^m
        shift = ParamScalar((-rat(a_actual), 1))
        acc = ParamScalar()
        power = ParamScalar.const(1)
        for c in eps:
            if c:
                acc = acc + power * c
            power = power * shift
        return acc

    def recentered(self, beta: int, a) -> "Jet":
        """Jet along y + a t^beta."""
        a = rat(a)
        if not a:
            return self.copy()
        D, P = self.D, self.prec
        U = [[ZERO] * len(u) for u in self.U]
        V = [[ZERO] * len(v) for v in self.V]
        for m in range(D + 1):
            for j in range(D - m + 1):
                s = j * beta
                if s >= P:
                    break
                w = comb(m + j, m) * a ** j
                src_u = self.U[m + j]
                src_v = self.V[m + j]
                if j:
                    mixed = [u + j * beta * v for u, v in zip(src_u, src_v)]
                else:
                    mixed = src_u
                _axpy(U[m], w, mixed, s)
                _axpy(V[m], w, src_v, s)
        return Jet(self.n, P, D, U, V)


def form_jet(w: OneForm, powers: CurvePowers, n: int, D: Optional[int] = None) -> Jet:
    """Jet of w along the curve whose powers are given."""
    if D is None:
        D = max(w.y_degree(), 0) + 1
    P = powers.prec
    jet = Jet(n, P, D)
    for (i, b), alpha in w.adx.terms.items():
        base = n * (i + 1)
        if base >= P:
            continue
        for m in range(min(b, D) + 1):
            _axpy(jet.U[m], alpha * n * comb(b, m), powers.Y(b - m), base)
    for (i, b), gamma in w.ady.terms.items():
        base = n * i
        if base >= P:
            continue
        for m in range(min(b + 1, D) + 1):
            c = gamma * comb(b + 1, m) / (b + 1)
            _axpy(jet.U[m], c, powers.TY(b + 1 - m), base)
            if m:
                _axpy(jet.V[m], c, powers.Y(b + 1 - m), base)
    return jet


def series_upto(w: OneForm, powers: CurvePowers, n: int) -> list:
    """Dense t * Gamma^* w below powers.prec (the m = 0 part of a jet)."""
    P = powers.prec
    out = [ZERO] * P
    for (i, b), alpha in w.adx.terms.items():
        _axpy(out, alpha * n, powers.Y(b), n * (i + 1))
    for (i, b), gamma in w.ady.terms.items():
        _axpy(out, gamma / (b + 1), powers.TY(b + 1), n * i)
    return out


def function_series_upto(f: XYPoly, powers: CurvePowers, n: int) -> list:
    out = [ZERO] * powers.prec
    for (i, b), c in f.terms.items():
        _axpy(out, c, powers.Y(b), n * i)
    return out


def _degree_bound_form(w: OneForm, n: int, top: int) -> int:
    d = 0
    for (i, b), _ in w.adx.terms.items():
        d = max(d, n * (i + 1) + b * top)
    for (i, b), _ in w.ady.terms.items():
        d = max(d, n * i + (b + 1) * top)
    return d


def _degree_bound_function(f: XYPoly, n: int, top: int) -> int:
    return max((n * i + b * top for (i, b) in f.terms), default=0)


def _naive_order_form(w: OneForm, n: int, beta1: int) -> int:
    orders = [n * (i + 1) + b * beta1 for (i, b) in w.adx.terms]
    orders += [n * i + (b + 1) * beta1 for (i, b) in w.ady.terms]
    return min(orders) if orders else 0


def _fast_form_order(w: OneForm, b: Branch) -> Value:
    if w.is_zero():
        return INF
    full = _degree_bound_form(w, b.n, b.max_exponent()) + 1
    P = min(full, _naive_order_form(w, b.n, b.char_exponents[0]) + 4 * b.max_exponent() + 16)
    while True:
        powers = CurvePowers(b.terms, P)
        e = _first_nonzero(series_upto(w, powers, b.n))
        if e is not None:
            return e
        if P >= full:
            return INF
        P = min(full, 2 * P)


def _fast_function_order(f: XYPoly, b: Branch) -> Value:
    if f.is_zero():
        return INF
    full = _degree_bound_function(f, b.n, b.max_exponent()) + 1
    P = min(full, 8 * b.max_exponent() + 16)
    while True:
        powers = CurvePowers(b.terms, P)
        e = _first_nonzero(function_series_upto(f, powers, b.n))
        if e is not None:
            return e
        if P >= full:
            return INF
        P = min(full, 2 * P)


# ---------------------------------------------------------------------------
# Generic orders and the Beg test


def generic_order(w: OneForm, b: Branch, beta_star: int) -> GenericOrderReport:
    """Order of the pullback along Gamma with a_{beta_star} replaced by the
    indeterminate a, together with its coefficient as a polynomial in a."""
    if w.is_zero():
        return _report(INF, ParamScalar())
    top = max(b.max_exponent(), beta_star)
    full = _degree_bound_form(w, b.n, top) + 1
    P = min(full, _naive_order_form(w, b.n, b.char_exponents[0]) + 4 * top + 16)
    a_act = b.coefficient(beta_star)
    while True:
        jet = form_jet(w, CurvePowers(b.terms, P), b.n)
        go, lead = jet.generic(beta_star, a_act)
        if go is not None:
            return _report(go, lead)
        if P >= full:
            return _report(INF, ParamScalar())
        P = min(full, 2 * P)


def generic_order_symbolic(w: OneForm, b: Branch, beta_star: int) -> GenericOrderReport:
    """Same as generic_order through an exact ParamScalar pullback (slow; a
    cross-check for the jet kernel)."""
    from .branch import family_member
    r = pullback_form(w, family_member(b, beta_star, tail="actual"))
    go = r.order()
    if go is INF:
        return _report(INF, ParamScalar())
    return _report(go, ParamScalar.lift(r.series.coeff(go)))


def beg_exceeds(w: OneForm, b: Branch, beta_star: int) -> bool:
    """True iff nu(w) is larger than the generic order at beta_star."""
    return order_on_branch(w, b) > generic_order(w, b, beta_star).generic_order


def beg_value(w: OneForm, b: Branch) -> Value:
    """Beg of w: the first exponent of E whose coefficient enters the leading
    term of the pullback linearly. n when no exponent up to nu(w) does."""
    nu = order_on_branch(w, b)
    if nu is INF:
        return INF
    P = nu + 1
    jet = form_jet(w, CurvePowers(b.terms, P), b.n)
    ladder = ExponentLadder(b)
    beta = b.char_exponents[0]
    while beta <= nu:
        go, lead = jet.generic(beta, b.coefficient(beta))
        if go == nu and lead.degree == 1:
            return beta
        beta = ladder.next(beta)
    return b.n


# ---------------------------------------------------------------------------
# Companion curves


def companion_curve(w: OneForm, b: Branch, start_beta: int, T: int) -> ParamCurve:
    """Invariant curve of w = 0 agreeing with Gamma below start_beta, solved
    coefficient by coefficient along E until the pullback order exceeds T.

    Past start_beta, exponents outside (e) are forced to zero, where e is the
    gcd of n with the exponents kept so far."""
    ladder = ExponentLadder(b)
    level = sum(1 for beta in b.char_exponents if beta < start_beta)
    e_req = b.e(level)
    coeffs: Dict[int, Rational] = {e: c for e, c in b.terms if e < start_beta}
    P = T + 1
    D = max(w.y_degree(), 0) + 1
    jet = form_jet(w, CurvePowers(sorted(coeffs.items()), P), b.n, D)
    beta = start_beta if ladder.contains(start_beta) else ladder.next(start_beta)
    first = beta
    while beta <= T:
        go, lead = jet.generic(beta, 0)
        outside = beta % e_req != 0
        if go is None:
            # every value of the coefficient keeps the order above T
            a = ZERO if outside and beta != first else b.coefficient(beta)
        elif outside and beta != first:
            if lead.evaluate(ZERO):
                raise CompanionSupportViolation(
                    f"exponent {beta} outside ({e_req}) but a = 0 leaves order {go}")
            a = ZERO
        elif lead.degree == 1:
            a = lead.root_if_linear()
        else:
            raise StuckCoefficient(
                f"leading coefficient {lead} at t^{go} has degree {lead.degree} "
                f"in the coefficient of t^{beta}")
        if a:
            coeffs[beta] = a
            jet = jet.recentered(beta, a)
            if outside:
                e_req = gcd(e_req, beta)
        beta = ladder.next(beta)
        jet = jet.trimmed(beta)
    if jet.order() is not None:
        raise StuckCoefficient(f"pullback order {jet.order()} did not exceed {T}")
    return make_curve(b.n, sorted(coeffs.items()))


# ---------------------------------------------------------------------------
# Decomposition against a C[[x]]-basis


def default_T(basis_values: Sequence[Value], n: int) -> int:
    finite = [v for v in basis_values if v is not INF]
    return 4 * (max(finite) + n)


def decompose(
    w: OneForm,
    basis: Sequence[Tuple[OneForm, Value]],
    b: Branch,
    T: Optional[int] = None,
) -> Tuple[List[XYPoly], Value]:
    """Write w = sum h_i(x) Omega_i + (remainder of value > T)."""
    n = b.n
    values = [v for _, v in basis]
    if T is None:
        T = default_T(values, n)
    by_class: Dict[int, int] = {}
    for idx, v in enumerate(values):
        if v is INF:
            continue
        if v % n in by_class:
            raise ValueError("basis values are not pairwise incongruent mod n")
        by_class[v % n] = idx
    P = T + 1
    powers = CurvePowers(b.terms, P)
    basis_series = [series_upto(f, powers, n) for f, _ in basis]
    res = series_upto(w, powers, n)
    coeffs: List[Dict[int, Rational]] = [dict() for _ in basis]
    steps: List[Tuple[int, int, Rational]] = []
    while True:
        v = _first_nonzero(res)
        if v is None:
            break
        idx = by_class.get(v % n)
        if idx is None or values[idx] > v:
            raise ValueError(f"value {v} is not reachable from the basis")
        r = (v - values[idx]) // n
        c = res[v] / basis_series[idx][values[idx]]
        _axpy(res, -c, basis_series[idx], n * r)
        coeffs[idx][r] = coeffs[idx].get(r, ZERO) + c
        steps.append((idx, r, c))
    hs = [XYPoly({(r, 0): c for r, c in d.items()}) for d in coeffs]
    residual = w
    for h, (f, _) in zip(hs, basis):
        residual = residual - f.times(h)
    return hs, order_on_branch(residual, b)
