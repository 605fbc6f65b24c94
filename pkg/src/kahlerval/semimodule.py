"""The value set Lambda of 1-forms, its closures and minimal generators.

Lambda is stored by its n class minima: a value m belongs to Lambda iff
m >= classMin[m mod n]. Every structural statement about Lambda reduces to
O(1) membership queries on that table.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from .branch import NumericalSemigroup


class CollectionKind(str, Enum):
    CX = "cx"
    S = "s"
    CW = "cw"
    C = "c"


@dataclass(frozen=True)
class SemigroupData:
    """(n, betabar_1, ..., betabar_g) together with the derived beta_j, e_j."""

    gens: Tuple[int, ...]
    betas: Tuple[int, ...]
    e: Tuple[int, ...]

    @classmethod
    def from_generators(cls, gens: Sequence[int]) -> "SemigroupData":
        gens = tuple(int(x) for x in gens)
        n, bb = gens[0], gens[1:]
        e = [n]
        betas = []
        for j, v in enumerate(bb):
            if j == 0:
                betas.append(v)
            else:
                n_prev = e[j - 1] // e[j]
                betas.append(v - n_prev * bb[j - 1] + betas[j - 1])
            e.append(gcd(e[-1], v))
        return cls(gens, tuple(betas), tuple(e))

    @property
    def n(self) -> int:
        return self.gens[0]

    @property
    def g(self) -> int:
        return len(self.gens) - 1

    def betabar(self, j: int) -> int:
        return self.gens[j]

    def semigroup(self) -> NumericalSemigroup:
        return _semigroup(self.gens)

    def in_s0(self, m: int) -> bool:
        """m in S_Gamma or m = 0."""
        return m == 0 or (m > 0 and m in self.semigroup())


@lru_cache(maxsize=256)
def _semigroup(gens: Tuple[int, ...]) -> NumericalSemigroup:
    return NumericalSemigroup(gens)


def _data(sg) -> SemigroupData:
    return sg if isinstance(sg, SemigroupData) else SemigroupData.from_generators(sg)


@dataclass(frozen=True)
class ValueSemimodule:
    n: int
    class_min: Tuple[Optional[int], ...]

    def contains(self, m: int) -> bool:
        c = self.class_min[m % self.n]
        return c is not None and m >= c

    __contains__ = contains

    def elements_upto(self, bound: int) -> List[int]:
        return [m for m in range(1, bound + 1) if self.contains(m)]

    def conductor(self) -> int:
        if any(c is None for c in self.class_min):
            raise ValueError("semimodule misses a residue class")
        return max(self.class_min) - self.n + 1

    def to_json(self) -> dict:
        return {"n": self.n, "class_min": list(self.class_min)}


def lambda_from_basis(values: Iterable[int], n: int) -> ValueSemimodule:
    table: List[Optional[int]] = [None] * n
    for v in values:
        c = v % n
        if table[c] is not None:
            raise ValueError(f"values {table[c]} and {v} share the class {c} mod {n}")
        table[c] = v
    return ValueSemimodule(n, tuple(table))


# ---------------------------------------------------------------------------
# Closures


def _chain_offsets(sg: SemigroupData, k: int) -> List[int]:
    """All sums of betabar_b - betabar_a over chains k <= bb_a1 < bb_b1 <= bb_a2 < ..."""
    g = sg.g
    out = [0]

    def walk(lo: int, acc: int):
        # lo: minimal admissible index for the next a
        for a in range(lo, g + 1):
            for b in range(a + 1, g + 1):
                total = acc + sg.betabar(b) - sg.betabar(a)
                out.append(total)
                walk(b, total)

    first = next((a for a in range(1, g + 1) if k <= sg.betabar(a)), None)
    if first is not None:
        walk(first, 0)
    return out


def _cw_offsets(sg: SemigroupData, k: int) -> List[int]:
    out = [0]
    for a in range(1, sg.g + 1):
        if k <= sg.betabar(a) and (k - sg.betas[a - 1]) % sg.e[a - 1] == 0:
            out.extend(sg.betabar(b) - sg.betabar(a) for b in range(a + 1, sg.g + 1))
    return out


def _offsets(sg: SemigroupData, kind: CollectionKind, k: int) -> List[int]:
    if kind is CollectionKind.C:
        return _chain_offsets(sg, k)
    if kind is CollectionKind.CW:
        return _cw_offsets(sg, k)
    return [0]


def closure_member(S: Iterable[int], kind, m: int, sg_gens) -> bool:
    """m in <S>_kind, by the closed-form descriptions of each closure."""
    kind = CollectionKind(kind)
    sg = _data(sg_gens)
    for k in S:
        if k > m:
            continue
        if kind is CollectionKind.CX:
            if (m - k) % sg.n == 0:
                return True
            continue
        for off in _offsets(sg, kind, k):
            if sg.in_s0(m - k - off):
                return True
    return False


def closure_upto(S: Iterable[int], kind, sg_gens, bound: int) -> List[int]:
    S = sorted(set(S))
    return [m for m in range(1, bound + 1) if closure_member(S, kind, m, sg_gens)]


def minimal_generators(lam: ValueSemimodule, kind, sg_gens, scan: Optional[int] = None) -> List[int]:
    """B = {k in Lambda : k not in <Lambda below k>_kind}.

    Scanning up to the largest class minimum suffices: those minima generate
    Lambda for every kind, and B is contained in every generator set.
    """
    kind = CollectionKind(kind)
    if scan is None:
        scan = max(c for c in lam.class_min if c is not None)
    below: List[int] = []
    out = []
    for k in range(1, scan + 1):
        if not lam.contains(k):
            continue
        if not closure_member(below, kind, k, sg_gens):
            out.append(k)
        below.append(k)
    return out


def is_c_collection(lam: ValueSemimodule, sg_gens, bound: Optional[int] = None):
    """Exhaustive check of the C-collection axioms for m <= bound.

    Returns (True, None) or (False, (m, target, rule)).
    """
    sg = _data(sg_gens)
    if bound is None:
        finite = [c for c in lam.class_min if c is not None]
        bound = max(finite) + sg.betabar(sg.g)
    for m in range(1, bound + 1):
        if not lam.contains(m):
            continue
        for j in range(1, sg.g + 1):
            if m <= sg.betabar(j):
                for k in range(j + 1, sg.g + 1):
                    t = m + sg.betabar(k) - sg.betabar(j)
                    if not lam.contains(t):
                        return False, (m, t, f"+betabar_{k}-betabar_{j}")
        for s in sg.gens:
            if not lam.contains(m + s):
                return False, (m, m + s, f"+{s}")
    return True, None


def recover_semigroup(values: Sequence[int]) -> Tuple[int, ...]:
    """(n, betabar_1, ..., betabar_g) read off the sorted C[[x]]-basis values:
    betabar_{l+1} sits at position 2 nu_l, with nu_l = n / e_l."""
    v = sorted(values)
    n = v[0]
    gens = [n]
    e = n
    while e > 1:
        bb = v[2 * (n // e) - 1]
        gens.append(bb)
        e = gcd(e, bb)
    return tuple(gens)


# ---------------------------------------------------------------------------
# Bases of forms and the JSON report


def basis_of_forms(cx, kind) -> list:
    """The C[[x]]-basis entries whose values are the kind-minimal generators."""
    kind = CollectionKind(kind)
    b = cx.branch
    gens = (b.n,) + tuple(b.sg_gens)
    lam = lambda_from_basis(cx.values(), b.n)
    chosen = set(minimal_generators(lam, kind, gens))
    return [e for e in cx.entries if e.value in chosen]


def semimodule_report(cx) -> dict:
    b = cx.branch
    gens = (b.n,) + tuple(b.sg_gens)
    lam = lambda_from_basis(cx.values(), b.n)
    out = {"n": b.n, "cx_basis": sorted(cx.values())}
    for kind, key in ((CollectionKind.S, "s_basis"), (CollectionKind.CW, "cw_basis"),
                      (CollectionKind.C, "c_basis")):
        out[key] = minimal_generators(lam, kind, gens)
    out["semigroup"] = list(gens)
    return out
