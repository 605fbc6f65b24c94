"""Brute-force value set of 1-forms by exact row echelon elimination.

Rows are the pullbacks t * Gamma^*(x^a y^b dx) and t * Gamma^*(x^a y^b dy)
truncated after the column cap. The values of linear combinations are exactly
the pivot (leading) exponents of an echelon form of the span.

Only rows whose naive order n(a+1) + b beta_1 (resp. n a + (b+1) beta_1) is
at most the bound can contribute to values up to the bound: discarding the
rest perturbs the pullback only above the bound. So the table is complete
once every such row is in; the degree-cap loop below enlarges the caps until
that happens and the pivot set has been stable for two enlargements.

This module deliberately reimplements its own pullback and calls nothing from
the engine side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from .branch import Branch
from .exactnum import ONE, ZERO, rat


@dataclass
class EchelonTable:
    cap: int
    pivots: Dict[int, list] = field(default_factory=dict)  # lead -> dense row, lead entry 1
    rows_seen: int = 0

    def insert(self, row: list) -> Optional[int]:
        """Reduce ``row`` (dense, length cap + 1) and keep it as a new pivot row
        if it survives. Returns the new pivot exponent or None."""
        self.rows_seen += 1
        cap = self.cap
        for e in range(cap + 1):
            c = row[e]
            if not c:
                continue
            piv = self.pivots.get(e)
            if piv is None:
                inv = ONE / c
                row = [ZERO] * e + [v * inv if v else ZERO for v in row[e:]]
                self.pivots[e] = row
                return e
            for k in range(e, cap + 1):
                p = piv[k]
                if p:
                    row[k] -= c * p
        return None

    def pivot_set(self) -> Set[int]:
        return set(self.pivots)


def _dense_powers(b: Branch, top: int, cap: int) -> List[list]:
    y = [ZERO] * (cap + 1)
    for e, c in b.terms:
        if e <= cap:
            y[e] = rat(c)
    support = [(e, c) for e, c in enumerate(y) if c]
    pows = [[ONE] + [ZERO] * cap]
    for _ in range(top):
        prev = pows[-1]
        nxt = [ZERO] * (cap + 1)
        for e, c in support:
            for k in range(cap + 1 - e):
                v = prev[k]
                if v:
                    nxt[k + e] += c * v
        pows.append(nxt)
    return pows


def _row(kind: str, a: int, j: int, b: Branch, pows: List[list], cap: int) -> list:
    n = b.n
    row = [ZERO] * (cap + 1)
    if kind == "dx":
        s = n * (a + 1)
        src = pows[j]
        for k in range(cap + 1 - s):
            if src[k]:
                row[k + s] = n * src[k]
    else:
        # t * y^j * y'(t) = t d/dt (y^(j+1)) / (j+1)
        s = n * a
        src = pows[j + 1]
        for k in range(cap + 1 - s):
            if src[k]:
                row[k + s] = src[k] * k / (j + 1)
    return row


def _naive(kind: str, a: int, j: int, n: int, beta1: int) -> int:
    return n * (a + 1) + j * beta1 if kind == "dx" else n * a + (j + 1) * beta1


@dataclass
class OracleResult:
    values: List[int]
    degree_cap: int
    rows: int
    enlargements: int


def oracle_lambda_report(b: Branch, bound: int) -> OracleResult:
    if bound < b.n:
        return OracleResult([], 0, 0, 0)
    n, beta1 = b.n, b.char_exponents[0]
    cap = bound
    top_j = bound // beta1 + 1
    pows = _dense_powers(b, top_j + 1, cap)
    table = EchelonTable(cap)
    done = set()
    degree_cap = 2
    history: List[Set[int]] = []
    enlargements = 0
    while True:
        pending = []
        for kind in ("dx", "dy"):
            for a in range(degree_cap + 1):
                for j in range(degree_cap + 1 - a):
                    key = (kind, a, j)
                    if key in done or _naive(kind, a, j, n, beta1) > bound:
                        continue
                    pending.append((_naive(kind, a, j, n, beta1), key))
        for _, key in sorted(pending):
            done.add(key)
            table.insert(_row(key[0], key[1], key[2], b, pows, cap))
        history.append(table.pivot_set())
        enlargements += 1
        covered = degree_cap * min(n, beta1) > bound
        stable = len(history) >= 3 and history[-1] == history[-2] == history[-3]
        if covered and stable:
            break
        degree_cap *= 2
    vals = sorted(v for v in table.pivot_set() if 1 <= v <= bound)
    return OracleResult(vals, degree_cap, table.rows_seen, enlargements)


def oracle_lambda(b: Branch, bound: int) -> List[int]:
    """Values of 1-forms on b in [1, bound]."""
    return oracle_lambda_report(b, bound).values


@dataclass
class CompareReport:
    equal: bool
    bound: int
    engine_values: List[int]
    oracle_values: List[int]
    first_discrepancy: Optional[int]

    def message(self) -> str:
        if self.equal:
            return f"OK: Lambda agrees on [1, {self.bound}]"
        return f"MISMATCH at {self.first_discrepancy} on [1, {self.bound}]"

    def to_json(self) -> dict:
        return {
            "equal": self.equal,
            "bound": self.bound,
            "first_discrepancy": self.first_discrepancy,
            "engine": self.engine_values,
            "oracle": self.oracle_values,
            "message": self.message(),
        }


def oracle_compare(b: Branch, basis_values: Optional[List[int]] = None) -> CompareReport:
    """Engine Lambda against the oracle on [1, max basis value + 2n]."""
    if basis_values is None:
        from .engine import construct_cx_basis
        basis_values = construct_cx_basis(b).values()
    from .semimodule import lambda_from_basis
    lam = lambda_from_basis(basis_values, b.n)
    bound = max(basis_values) + 2 * b.n
    mine = [m for m in range(1, bound + 1) if lam.contains(m)]
    theirs = oracle_lambda(b, bound)
    diff = sorted(set(mine) ^ set(theirs))
    return CompareReport(not diff, bound, mine, theirs, diff[0] if diff else None)
