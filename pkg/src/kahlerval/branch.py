"""Plane branches given by polynomial Puiseux data (t^n, sum a_b t^b)."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exactnum import INF, InputError, ParamScalar, Rational, TPoly, rat, rat_str


class BranchError(InputError):
    pass


class NonPrimitive(BranchError):
    pass


class NotSingularNormalForm(BranchError):
    pass


class ZeroCoefficient(BranchError):
    pass


@dataclass(frozen=True)
class Branch:
    n: int
    terms: Tuple[Tuple[int, Rational], ...]
    char_exponents: Tuple[int, ...]
    e_seq: Tuple[int, ...]
    n_seq: Tuple[int, ...]
    nu_seq: Tuple[int, ...]
    sg_gens: Tuple[int, ...]  # (betabar_1, ..., betabar_g)
    _coeffs: Dict[int, Rational] = field(default_factory=dict, compare=False, repr=False)

    @property
    def g(self) -> int:
        return len(self.char_exponents)

    def beta(self, j: int) -> float:
        """beta_j for 1 <= j <= g, with beta_{g+1} = INF."""
        return self.char_exponents[j - 1] if j <= self.g else INF

    def betabar(self, j: int) -> int:
        return self.n if j == 0 else self.sg_gens[j - 1]

    def e(self, j: int) -> int:
        return self.e_seq[j]

    def nu(self, j: int) -> int:
        return self.nu_seq[j]

    def coefficient(self, b: int) -> Rational:
        return self._coeffs.get(b, rat(0))

    def exponents(self) -> List[int]:
        return [b for b, _ in self.terms]

    def max_exponent(self) -> int:
        return self.terms[-1][0]

    def y_series(self) -> TPoly:
        return TPoly(dict(self.terms))

    def with_coefficient(self, b: int, c) -> "Branch":
        """Same curve with a_b replaced by c (dropped when c = 0)."""
        d = dict(self.terms)
        c = rat(c)
        if c:
            d[b] = c
        else:
            d.pop(b, None)
        return parse_branch(self.n, sorted(d.items()))

    def genus_level(self, b: int) -> int:
        """max{r : beta_r <= b} (0 below beta_1)."""
        return sum(1 for beta in self.char_exponents if beta <= b)

    def to_json(self) -> dict:
        return {"n": self.n, "terms": [[b, rat_str(c)] for b, c in self.terms]}

    def label(self) -> str:
        return f"({self.n}; " + ", ".join(str(b) for b in self.char_exponents) + ")"


def parse_branch(n: int, terms: Sequence[Tuple[int, object]]) -> Branch:
    """Validate Puiseux data and derive every characteristic invariant."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise NotSingularNormalForm(f"multiplicity must be an integer >= 2, got {n!r}")
    if not terms:
        raise InputError("empty term list")
    coeffs: Dict[int, Rational] = {}
    for item in terms:
        try:
            b, c = item
        except (TypeError, ValueError):
            raise InputError(f"term must be a pair [exponent, coefficient]: {item!r}")
        if isinstance(b, bool) or not isinstance(b, int) or b < 1:
            raise InputError(f"exponent must be a positive integer: {b!r}")
        if b in coeffs:
            raise InputError(f"duplicate exponent {b}")
        c = rat(c)
        if c == 0:
            raise ZeroCoefficient(f"coefficient of t^{b} is zero")
        coeffs[b] = c

    exps = sorted(coeffs)
    e = n
    chars: List[int] = []
    e_seq = [n]
    for b in exps:
        if b % e:
            chars.append(b)
            e = gcd(e, b)
            e_seq.append(e)
    if e != 1:
        raise NonPrimitive(f"gcd of n and all exponents is {e}")
    if chars[0] <= n:
        raise NotSingularNormalForm(f"beta_1 = {chars[0]} must exceed n = {n}")
    if exps[0] < chars[0]:
        raise NotSingularNormalForm(
            f"term t^{exps[0]} lies below beta_1 = {chars[0]}; remove it by a change of coordinates"
        )
    n_seq = tuple(e_seq[j - 1] // e_seq[j] for j in range(1, len(e_seq)))
    nu = [1]
    for nj in n_seq:
        nu.append(nu[-1] * nj)
    bb = [chars[0]]
    for j in range(1, len(chars)):
        bb.append(n_seq[j - 1] * bb[-1] - chars[j - 1] + chars[j])
    return Branch(
        n=n,
        terms=tuple((b, coeffs[b]) for b in exps),
        char_exponents=tuple(chars),
        e_seq=tuple(e_seq),
        n_seq=n_seq,
        nu_seq=tuple(nu),
        sg_gens=tuple(bb),
        _coeffs=coeffs,
    )


def branch_from_json(doc) -> Branch:
    if not isinstance(doc, Mapping) or "n" not in doc or "terms" not in doc:
        raise InputError('curve file must be an object with keys "n" and "terms"')
    terms = doc["terms"]
    if not isinstance(terms, list):
        raise InputError('"terms" must be a list')
    return parse_branch(doc["n"], [tuple(t) if isinstance(t, list) else t for t in terms])


def semigroup_generators(b: Branch) -> Tuple[int, ...]:
    return (b.n,) + b.sg_gens


# ---------------------------------------------------------------------------
# The exponent set and its successor / predecessor maps


class ExponentLadder:
    """E as the union over j of {beta_j + k e_j : k >= 0}."""

    def __init__(self, b: Branch):
        self.b = b

    def contains(self, x: int) -> bool:
        return any(x >= beta and x % self.b.e(j) == 0
                   for j, beta in enumerate(self.b.char_exponents, start=1))

    def next(self, x: int) -> int:
        if x < self.b.char_exponents[0]:
            return self.b.char_exponents[0]
        y = x + 1
        while not self.contains(y):
            y += 1
        return y

    def prev(self, x: int) -> int:
        """Predecessor in E with n as the predecessor of beta_1."""
        beta1 = self.b.char_exponents[0]
        if x <= beta1:
            if x == beta1:
                return self.b.n
            raise ValueError(f"{x} has no predecessor in E")
        y = x - 1
        while not self.contains(y):
            y -= 1
        return y

    def iterate(self, start: int, cap: int) -> Iterator[int]:
        """Elements of E in [start, cap]."""
        x = start if self.contains(start) else self.next(start)
        while x <= cap:
            yield x
            x = self.next(x)


def exponent_set(b: Branch, cap: int, include_n: bool = False) -> List[int]:
    out = list(ExponentLadder(b).iterate(b.char_exponents[0], cap))
    return ([b.n] if include_n and cap >= b.n else []) + out


# ---------------------------------------------------------------------------
# Possibly symbolic, possibly non-primitive parametrizations


@dataclass(frozen=True)
class ParamCurve:
    n: int
    terms: Tuple[Tuple[int, object], ...]  # exponent -> Rational or ParamScalar
    primitivity_factor: int
    vertical: bool = False  # the curve x = 0, parametrized as (0, t)

    def y_series(self) -> TPoly:
        if self.vertical:
            return TPoly({1: rat(1)})
        return TPoly(dict(self.terms))

    def coefficient(self, b: int):
        return dict(self.terms).get(b, rat(0))

    def is_symbolic(self) -> bool:
        return any(isinstance(c, ParamScalar) and not c.is_constant() for _, c in self.terms)

    def specialize(self, a) -> "ParamCurve":
        terms = []
        for e, c in self.terms:
            v = c.evaluate(a) if isinstance(c, ParamScalar) else c
            if v:
                terms.append((e, v))
        return make_curve(self.n, terms)

    def char_exponents(self) -> Tuple[int, ...]:
        """Exponents at which the running gcd with n drops."""
        out, e = [], self.n
        for b, _ in self.terms:
            if b % e:
                e = gcd(e, b)
                out.append(b)
        return tuple(out)

    def to_json(self) -> dict:
        if self.vertical:
            return {"vertical": True}
        out = []
        for e, c in self.terms:
            if isinstance(c, ParamScalar):
                out.append([e, c.to_json()])
            else:
                out.append([e, rat_str(c)])
        return {"n": self.n, "terms": out, "primitivity_factor": self.primitivity_factor}


def make_curve(n: int, terms) -> ParamCurve:
    terms = tuple(sorted((int(e), c) for e, c in terms if c))
    e = n
    for b, _ in terms:
        e = gcd(e, b)
    return ParamCurve(n=n, terms=terms, primitivity_factor=e)


def as_curve(c) -> ParamCurve:
    if isinstance(c, ParamCurve):
        return c
    return make_curve(c.n, c.terms)


def truncation(b: Branch, beta) -> ParamCurve:
    """Keep the terms of exponent < beta; beta = n gives the curve x = 0."""
    if beta == b.n:
        return ParamCurve(n=b.n, terms=(), primitivity_factor=1, vertical=True)
    kept = [(e, c) for e, c in b.terms if beta is INF or e < beta]
    return make_curve(b.n, kept)


def family_member(b: Branch, beta: int, tail: str = "actual") -> ParamCurve:
    """Gamma below beta, the parameter a at beta, and above beta either
    Gamma's own coefficients (tail="actual") or nothing (tail="none")."""
    terms = [(e, c) for e, c in b.terms if e < beta]
    terms.append((beta, ParamScalar.var()))
    if tail == "actual":
        terms += [(e, c) for e, c in b.terms if e > beta]
    return make_curve(b.n, terms)


# ---------------------------------------------------------------------------
# Numerical semigroups


class NumericalSemigroup:
    """<gens> via the Apery set of its smallest generator."""

    def __init__(self, gens: Sequence[int]):
        gens = sorted(set(int(x) for x in gens if x > 0))
        if not gens:
            raise ValueError("no generators")
        g = 0
        for x in gens:
            g = gcd(g, x)
        if g != 1:
            raise ValueError(f"generators have gcd {g}")
        self.gens = tuple(gens)
        self.m = gens[0]
        self.apery = self._apery()

    def _apery(self) -> Tuple[int, ...]:
        m = self.m
        dist = [None] * m
        dist[0] = 0
        heap = [(0, 0)]
        while heap:
            d, r = heapq.heappop(heap)
            if d > dist[r]:
                continue
            for g in self.gens[1:]:
                nd, nr = d + g, (r + g) % m
                if dist[nr] is None or nd < dist[nr]:
                    dist[nr] = nd
                    heapq.heappush(heap, (nd, nr))
        return tuple(dist)

    def __contains__(self, x: int) -> bool:
        return x >= 0 and x >= self.apery[x % self.m]

    def frobenius(self) -> int:
        return max(self.apery) - self.m

    def conductor(self) -> int:
        return self.frobenius() + 1

    def elements_upto(self, bound: int) -> List[int]:
        return [x for x in range(bound + 1) if x in self]


def semigroup_of(b: Branch) -> NumericalSemigroup:
    return NumericalSemigroup(semigroup_generators(b))


# ---------------------------------------------------------------------------
# Random branches for tests and experiments

_SHAPES = {
    1: [(k,) for k in range(2, 13)],
    2: [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3), (2, 5), (5, 2), (2, 6), (6, 2), (3, 4), (4, 3)],
    3: [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)],
}


def random_branch(
    rng: random.Random,
    genus: Optional[int] = None,
    max_n: int = 12,
    max_betabar: int = 200,
    extra_density: float = 0.35,
    extra_span: int = 8,
    shape: Optional[Tuple[int, ...]] = None,
) -> Branch:
    """A random branch with rational coefficients and some zero/nonzero
    coefficients at non-characteristic exponents."""
    for _ in range(1000):
        if shape is None:
            g = genus or rng.choice([1, 2, 2, 3])
            shapes = [s for s in _SHAPES[g] if _prod(s) <= max_n]
            if not shapes:
                continue
            sh = rng.choice(shapes)
        else:
            sh = tuple(shape)
        n = _prod(sh)
        es = [n]
        for nj in sh:
            es.append(es[-1] // nj)
        chars = []
        prev = n
        ok = True
        for j in range(1, len(sh) + 1):
            ej, ejm = es[j], es[j - 1]
            cands = [x for x in range(prev + 1, prev + 4 * ejm + 1) if x % ej == 0 and x % ejm]
            cands = [x for x in cands if gcd(x, ejm) == ej]
            if not cands:
                ok = False
                break
            x = rng.choice(cands[:4])
            chars.append(x)
            prev = x
        if not ok:
            continue
        bb = [chars[0]]
        for j in range(1, len(chars)):
            bb.append(sh[j - 1] * bb[-1] - chars[j - 1] + chars[j])
        if bb[-1] > max_betabar:
            continue
        return random_in_class(rng, n, chars, extra_density, extra_span)
    raise RuntimeError("could not sample a branch")


def random_in_class(
    rng: random.Random,
    n: int,
    chars: Sequence[int],
    extra_density: float = 0.35,
    extra_span: int = 8,
) -> Branch:
    """Random coefficients for fixed characteristic exponents."""
    es = [n]
    for c in chars:
        es.append(gcd(es[-1], c))
    terms = {b: _rand_coeff(rng) for b in chars}
    for x in range(chars[0] + 1, chars[-1] + extra_span + 1):
        if x in terms:
            continue
        j = sum(1 for c in chars if c < x)
        if x % es[j] == 0 and rng.random() < extra_density:
            terms[x] = _rand_coeff(rng)
    return parse_branch(n, sorted(terms.items()))


def _prod(xs) -> int:
    p = 1
    for x in xs:
        p *= x
    return p


def _rand_coeff(rng: random.Random) -> Rational:
    num = rng.choice([x for x in range(-4, 5) if x])
    den = rng.choice([1, 1, 1, 2, 3])
    return rat(num) / den


def random_campaign(seed: int, count: int, **kwargs) -> List[Branch]:
    """``count`` random branches from one seeded stream."""
    rng = random.Random(seed)
    return [random_branch(rng, **kwargs) for _ in range(count)]
