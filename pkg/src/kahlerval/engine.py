"""Level-by-level construction of a C[[x]]-basis of 1-forms.

Level l+1 starts from the terminal family T_l (2 nu_l forms) and the
approximate root f = f_{l+1}:

    stage 0    Omega_{2 a nu_l + b} = f^a Omega_b,  0 <= a < n_{l+1}
    stage 1    each class mod n holds exactly two forms; the later one is
               reduced against the earlier one
    stage s    Upp forms whose leading coefficient moves with the coefficient
               at the current exponent are reduced against the Low form of
               their class (or swapped with it)

Level l+1 < g stops when the current exponent reaches beta_{l+2}; level g
stops once every Low value is below every Upp value.

Pullbacks are never recomputed from scratch inside a level. Each form carries
a ``Jet`` truncated at a working precision P that is updated linearly with
the form. When P turns out to be too small the whole run restarts with 2P.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .approots import approximate_root
from .branch import Branch, ExponentLadder, ParamCurve
from .exactnum import (
    INF, ZERO, OneForm, ParamScalar, Rational, Value, XYPoly, rat, rat_str, value_json,
)
from .pullback import (
    CurvePowers, Jet, beg_value, companion_curve, default_T, form_jet,
    order_on_branch,
)


class InternalConsistencyError(Exception):
    """A property guaranteed by the construction failed; signals a bug."""


class PairingViolation(InternalConsistencyError):
    pass


class NoPartner(InternalConsistencyError):
    pass


class StageCap(InternalConsistencyError):
    pass


class _PrecisionShort(Exception):
    pass


@dataclass(frozen=True)
class EngineConfig:
    stage_cap_factor: int = 4
    check_certificate: bool = True
    initial_precision: Optional[int] = None
    max_precision: int = 1 << 15


class Unresolved:
    """A value known only to be at least ``bound`` (level g Upp forms)."""

    __slots__ = ("bound",)

    def __init__(self, bound: int):
        self.bound = bound

    def __repr__(self):
        return f">={self.bound}"

    def __eq__(self, other):
        return isinstance(other, Unresolved) and other.bound == self.bound

    def __hash__(self):
        return hash(("unresolved", self.bound))


def _json_value(v):
    return repr(v) if isinstance(v, Unresolved) else value_json(v)


def _key(v) -> float:
    """Sort key where unresolved and infinite values sit above everything."""
    return float("inf") if isinstance(v, Unresolved) or v is INF else v


@dataclass(frozen=True)
class Reduction:
    target: int        # index whose form changes
    against: int       # index of the form it is reduced by
    d: int             # x-power
    c: Rational
    swapped: bool = False

    def to_json(self) -> dict:
        return {"k": self.target, "j": self.against, "d": self.d, "c": rat_str(self.c),
                "swap": self.swapped}


@dataclass(frozen=True)
class UppReport:
    generic_order: Optional[int]       # None when not reached below P
    lead: Optional[ParamScalar]
    beg_at_current: bool


@dataclass(frozen=True)
class StageFamily:
    level: int
    stage: int
    forms: Tuple[OneForm, ...]
    values: Tuple[object, ...]
    low: frozenset
    upp: frozenset
    hat_upp: frozenset
    tilde_upp: frozenset
    current_exponent: Optional[int]
    upp_reports: Dict[int, UppReport] = field(default_factory=dict, compare=False)
    reductions: Tuple[Reduction, ...] = ()

    def beg_at_current(self, k: int) -> bool:
        r = self.upp_reports.get(k)
        return bool(r and r.beg_at_current)

    def exact_values(self, b: Branch) -> Tuple[Value, ...]:
        """Values with every lower bound replaced by the exact order."""
        return tuple(order_on_branch(w, b) if isinstance(v, Unresolved) else v
                     for w, v in zip(self.forms, self.values))

    def to_json(self, n: int) -> dict:
        entries = []
        for i, (w, v) in enumerate(zip(self.forms, self.values), start=1):
            side = "low" if i in self.low else ("upp" if i in self.upp else "-")
            cls = v % n if isinstance(v, int) else None
            entries.append({
                "index": i, "form": str(w), "value": _json_value(v), "class": cls,
                "side": side, "begAtCurrent": self.beg_at_current(i),
            })
        return {
            "level": self.level,
            "stage": self.stage,
            "exponent": self.current_exponent,
            "forms": entries,
            "reductions": [r.to_json() for r in self.reductions],
        }


@dataclass(frozen=True)
class TerminalFamily:
    level: int
    forms: Tuple[OneForm, ...]
    values: Tuple[object, ...]
    final_stage: int


@dataclass
class FormReport:
    type: str                      # "1" | "2" | "3" | "trivial"
    kappa: int
    beg_value: Value
    birth_level: int
    index: int
    companion: Optional[ParamCurve] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "type": self.type,
            "kappa": self.kappa,
            "beg": value_json(self.beg_value),
            "birth_level": self.birth_level,
            "index": self.index,
            "companion": None if self.companion is None else self.companion.to_json(),
            "checks": self.checks,
        }


@dataclass
class BasisEntry:
    form: OneForm
    value: int
    class_mod_n: int
    index: int


@dataclass
class StageTrace:
    branch: Branch
    precision: int
    stages: List[StageFamily]
    terminals: List[TerminalFamily]

    def stages_at(self, level: int) -> List[StageFamily]:
        return [s for s in self.stages if s.level == level]

    def stage0(self, level: int) -> StageFamily:
        return self.stages_at(level)[0]

    def to_json(self) -> dict:
        n = self.branch.n
        return {"precision": self.precision, "stages": [s.to_json(n) for s in self.stages]}


@dataclass
class CxBasis:
    branch: Branch
    entries: List[BasisEntry]
    trace: StageTrace
    _reports: Dict[Tuple[int, bool], FormReport] = field(default_factory=dict, repr=False)

    def values(self) -> List[int]:
        return [e.value for e in self.entries]

    def forms(self) -> List[OneForm]:
        return [e.form for e in self.entries]

    def report(self, i: int, companion: bool = False, T: Optional[int] = None) -> FormReport:
        key = (i, companion)
        if key not in self._reports:
            self._reports[key] = classify_form(self.entries[i], self.trace, companion=companion, T=T)
        return self._reports[key]

    def to_json(self, companion: bool = False) -> dict:
        return {
            "n": self.branch.n,
            "values": self.values(),
            "forms": [
                {"form": str(e.form), "value": e.value, "class": e.class_mod_n,
                 "index": e.index, **self.report(i, companion).to_json()}
                for i, e in enumerate(self.entries)
            ],
        }


# ---------------------------------------------------------------------------
# Working state


class _Slot:
    __slots__ = ("form", "jet", "value", "lead", "touched")

    def __init__(self, form: OneForm, jet: Jet, touched: bool = False):
        self.form = form
        self.jet = jet
        self.touched = touched
        e = jet.order()
        self.value = e                       # None means >= P
        self.lead = None if e is None else jet.U[0][e]


class _Context:
    def __init__(self, b: Branch, prec: int, config: EngineConfig):
        self.b = b
        self.P = prec
        self.config = config
        self.powers = CurvePowers(b.terms, prec)
        self.ladder = ExponentLadder(b)

    def slot(self, form: OneForm, level: int, touched: bool = False) -> _Slot:
        return _Slot(form, form_jet(form, self.powers, self.b.n, self.b.nu(level)), touched)

    def reduce(self, s: _Slot, other: _Slot, c, d: int) -> _Slot:
        """s - c x^d other."""
        from .exactnum import form_scale
        out = _Slot.__new__(_Slot)
        out.form = s.form - form_scale(other.form, c, d)
        out.jet = s.jet.combined(other.jet, c, d)
        out.touched = True
        e = out.jet.order()
        out.value = e
        out.lead = None if e is None else out.jet.U[0][e]
        return out


def _snapshot(level, stage, slots, low, upp, hat, tilde, beta, reports=None, reductions=(),
              P=None) -> StageFamily:
    vals = tuple(Unresolved(P) if s.value is None else s.value for s in slots)
    return StageFamily(
        level=level, stage=stage, forms=tuple(s.form for s in slots), values=vals,
        low=frozenset(low), upp=frozenset(upp), hat_upp=frozenset(hat),
        tilde_upp=frozenset(tilde), current_exponent=beta,
        upp_reports=dict(reports or {}), reductions=tuple(reductions),
    )


# ---------------------------------------------------------------------------
# Free-basis certificate


def certificate(forms: Sequence[OneForm], nu: int) -> Rational:
    """Determinant of the x = 0 coefficient matrix over y^i dx, y^i dy, i < nu."""
    rows = []
    for w in forms:
        a0 = w.adx.at_x0()
        b0 = w.ady.at_x0()
        rows.append([rat(a0.get(i, 0)) for i in range(nu)] + [rat(b0.get(i, 0)) for i in range(nu)])
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise ValueError("certificate needs a square family")
    det = rat(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if rows[r][col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        for r in range(col + 1, m):
            f = rows[r][col]
            if f:
                q = f / p
                rows[r] = [x - q * y for x, y in zip(rows[r], rows[col])]
    return det


def _certify(ctx: _Context, slots, level: int, stage: int) -> None:
    if not ctx.config.check_certificate:
        return
    if certificate([s.form for s in slots], ctx.b.nu(level)) == 0:
        raise InternalConsistencyError(f"level {level} stage {stage}: family is not a free basis")


# ---------------------------------------------------------------------------
# The three stage operations


def _initial(ctx: _Context, terminal: List[_Slot], l: int):
    b = ctx.b
    level = l + 1
    nl = b.nu(l)
    nn = b.n_seq[l]  # n_{l+1}
    f = approximate_root(b, level).poly
    powers = [XYPoly.const(1)]
    for _ in range(nn - 1):
        powers.append(powers[-1] * f)
    slots: List[_Slot] = []
    for a in range(nn):
        for w in terminal:
            if a == 0:
                slots.append(ctx.slot(w.form, level, touched=w.touched))
            else:
                slots.append(ctx.slot(w.form.times(powers[a]), level))
    top = 2 * (nn - 1) * nl
    hat = {j + top for j in range(1, 2 * nl + 1)}
    beta = b.beta(level)
    e_l = b.e(l)
    tilde = set()
    for j, w in enumerate(terminal, start=1):
        if w.value is None:
            raise _PrecisionShort()
        if (w.value - beta) % e_l == 0:
            tilde.add(j + top)
    return slots, hat, tilde


def _stage_one(ctx: _Context, slots: List[_Slot], terminal: List[_Slot], l: int):
    b = ctx.b
    n = b.n
    level = l + 1
    nl = b.nu(l)
    nn = b.n_seq[l]
    classes: Dict[int, List[int]] = {}
    for i, s in enumerate(slots, start=1):
        if s.value is None:
            raise _PrecisionShort()
        classes.setdefault(s.value % n, []).append(i)
    reductions = []
    new = list(slots)
    for cls, members in sorted(classes.items()):
        if len(members) != 2:
            raise PairingViolation(
                f"level {level} stage 0: class {cls} mod {n} has {len(members)} members")
        j, k = members
        sj, sk = slots[j - 1], slots[k - 1]
        diff = sk.value - sj.value
        if diff <= 0 or diff % n:
            raise PairingViolation(f"level {level} stage 0: pair ({j}, {k}) gives d = {diff}/{n}")
        d = diff // n
        c = sk.lead / sj.lead
        new[k - 1] = ctx.reduce(sk, sj, c, d)
        reductions.append(Reduction(k, j, d, c))
    low, upp = set(), set()
    e_l = b.e(l)
    beta = b.beta(level)
    for j, w in enumerate(terminal, start=1):
        if w.value % e_l == 0:
            low.add(j)
            upp.update(j + 2 * s * nl for s in range(1, nn))
        elif (w.value - beta) % e_l == 0:
            low.update(j + 2 * s * nl for s in range(nn - 1))
            upp.add(j + 2 * (nn - 1) * nl)
        else:
            raise InternalConsistencyError(
                f"terminal value {w.value} is neither in ({e_l}) nor in [{beta}]_{e_l}")
    for r in reductions:
        if r.target not in upp or r.against not in low:
            raise PairingViolation(
                f"level {level} stage 1: reduction ({r.target}, {r.against}) crosses Low/Upp")
    return new, low, upp, reductions


def _main(ctx: _Context, slots: List[_Slot], low: set, upp: set, beta: int, level: int):
    """One Main Transformation at the current exponent ``beta``."""
    b = ctx.b
    n = b.n
    final_level = level == b.g
    a_act = b.coefficient(beta)
    reports: Dict[int, UppReport] = {}
    hits = []
    for k in sorted(upp):
        s = slots[k - 1]
        go, lead = s.jet.generic(beta, a_act)
        if go is None and not final_level:
            raise _PrecisionShort()
        at_current = s.value is not None and go == s.value
        if s.value is None and not final_level:
            raise _PrecisionShort()
        reports[k] = UppReport(go, lead, at_current)
        if at_current:
            hits.append(k)
    by_class = {}
    for j in low:
        v = slots[j - 1].value
        if v is None:
            raise _PrecisionShort()
        by_class[v % n] = j
    new = list(slots)
    new_low, new_upp = set(low), set(upp)
    reductions = []
    used = set()
    for k in hits:
        sk = slots[k - 1]
        j = by_class.get(sk.value % n)
        if j is None:
            raise NoPartner(f"level {level}, exponent {beta}: no Low partner for index {k}")
        if j in used:
            raise PairingViolation(f"level {level}, exponent {beta}: Low index {j} paired twice")
        used.add(j)
        sj = slots[j - 1]
        d, rem = divmod(sk.value - sj.value, n)
        if d >= 0:
            c = sk.lead / sj.lead
            new[k - 1] = ctx.reduce(sk, sj, c, d)
            reductions.append(Reduction(k, j, d, c))
            _check_increase(sk, new[k - 1], level, beta)
        else:
            c = sj.lead / sk.lead
            new[j - 1] = ctx.reduce(sj, sk, c, -d)
            reductions.append(Reduction(j, k, -d, c, swapped=True))
            _check_increase(sj, new[j - 1], level, beta)
            new_low.discard(j)
            new_upp.discard(k)
            new_low.add(k)
            new_upp.add(j)
    return new, new_low, new_upp, reports, reductions


def _check_increase(old: _Slot, new: _Slot, level: int, beta: int) -> None:
    if new.value is not None and new.value <= old.value:
        raise InternalConsistencyError(
            f"level {level}, exponent {beta}: value {old.value} did not increase")


def _check_low(ctx: _Context, slots, low, level: int, stage: int) -> None:
    b = ctx.b
    seen = set()
    e = b.e(level)
    for j in low:
        v = slots[j - 1].value
        if v is None:
            raise _PrecisionShort()
        if v % e or v % b.n in seen:
            raise InternalConsistencyError(
                f"level {level} stage {stage}: Low values do not realize ({e}) mod {b.n}")
        seen.add(v % b.n)
    if len(seen) != b.n // e:
        raise InternalConsistencyError(f"level {level} stage {stage}: Low misses classes")


def _separated(slots, low, upp) -> bool:
    top = max(slots[j - 1].value for j in low)
    return all(slots[k - 1].value is None or slots[k - 1].value > top for k in upp)


def _run_level(ctx: _Context, terminal: List[_Slot], l: int, trace: List[StageFamily]):
    b = ctx.b
    level = l + 1
    slots, hat, tilde = _initial(ctx, terminal, l)
    _certify(ctx, slots, level, 0)
    slots1, low, upp, reds = _stage_one(ctx, slots, terminal, l)
    trace.append(_snapshot(level, 0, slots, (), (), hat, tilde, b.beta(level),
                           reductions=reds, P=ctx.P))
    slots = slots1
    beta = ctx.ladder.next(b.beta(level))
    stop = b.beta(level + 1)
    cap = ctx.config.stage_cap_factor * (b.betabar(b.g) + b.n * b.g)
    stage = 1
    while True:
        _certify(ctx, slots, level, stage)
        _check_low(ctx, slots, low, level, stage)
        if level < b.g and beta == stop:
            trace.append(_snapshot(level, stage, slots, low, upp, hat, tilde, beta, P=ctx.P))
            break
        if level == b.g and _separated(slots, low, upp):
            trace.append(_snapshot(level, stage, slots, low, upp, hat, tilde, beta, P=ctx.P))
            break
        if stage > cap:
            raise StageCap(f"level {level}: no separated family after {cap} stages")
        new, nlow, nupp, reports, reds = _main(ctx, slots, low, upp, beta, level)
        trace.append(_snapshot(level, stage, slots, low, upp, hat, tilde, beta, reports, reds,
                               P=ctx.P))
        slots, low, upp = new, nlow, nupp
        beta = ctx.ladder.next(beta)
        stage += 1
    return slots, low, upp, stage


def _execute(b: Branch, prec: int, config: EngineConfig) -> CxBasis:
    ctx = _Context(b, prec, config)
    terminal = [ctx.slot(OneForm.dx(), 0), ctx.slot(OneForm.dy(), 0)]
    stages: List[StageFamily] = []
    terminals: List[TerminalFamily] = [
        TerminalFamily(0, (OneForm.dx(), OneForm.dy()), (b.n, b.beta(1)), 0)]
    for l in range(b.g):
        level = l + 1
        slots, low, upp, stage = _run_level(ctx, terminal, l, stages)
        if level < b.g:
            vals = [s.value for s in slots]
            if any(v is None for v in vals):
                raise _PrecisionShort()
            if len({v % b.n for v in vals}) != len(vals):
                raise InternalConsistencyError(f"terminal family of level {level} not separated")
            if max(vals) != b.betabar(level + 1):
                raise InternalConsistencyError(
                    f"terminal family of level {level} has max value {max(vals)}, "
                    f"expected {b.betabar(level + 1)}")
            terminals.append(TerminalFamily(level, tuple(s.form for s in slots), tuple(vals), stage))
            terminal = slots
        else:
            terminals.append(TerminalFamily(
                level, tuple(s.form for s in slots),
                tuple(Unresolved(prec) if s.value is None else s.value for s in slots), stage))
            chosen = sorted(low, key=lambda j: slots[j - 1].value)
            entries = [BasisEntry(slots[j - 1].form, slots[j - 1].value,
                                  slots[j - 1].value % b.n, j) for j in chosen]
            trace = StageTrace(b, prec, stages, terminals)
            return CxBasis(b, entries, trace)
    raise AssertionError("unreachable")


def initial_precision(b: Branch) -> int:
    top = max(b.n_seq[j] * b.betabar(j + 1) for j in range(b.g))
    return top + 4 * b.n + 8


def construct_cx_basis(b: Branch, config: EngineConfig = EngineConfig()) -> CxBasis:
    P = config.initial_precision or initial_precision(b)
    while True:
        try:
            return _execute(b, P, config)
        except _PrecisionShort:
            if 2 * P > config.max_precision:
                raise InternalConsistencyError(f"working precision exceeded {config.max_precision}")
            P *= 2


# ---------------------------------------------------------------------------
# Public stage-level API over a completed trace


def initial_family(b: Branch, level: int) -> StageFamily:
    """Stage-0 family of ``level`` (1-indexed)."""
    return construct_cx_basis(b).trace.stage0(level)


def run_level(b: Branch, level: int) -> TerminalFamily:
    return construct_cx_basis(b).trace.terminals[level]


# ---------------------------------------------------------------------------
# Classification


def kappa(b: Branch, v: Value) -> int:
    if v is INF:
        return b.g
    return max((k for k in range(1, b.g + 1) if b.betabar(k) < v), default=0)


def _birth_level(b: Branch, index: int) -> int:
    for L in range(1, b.g + 1):
        if index <= 2 * b.nu(L):
            return L
    raise ValueError(index)


def classify_form(entry: BasisEntry, trace: StageTrace, companion: bool = False,
                  T: Optional[int] = None) -> FormReport:
    b = trace.branch
    i = entry.index
    v = entry.value
    if i <= 2:
        return FormReport("trivial", 0, beg_value(entry.form, b), 0, i)
    L = _birth_level(b, i)
    st0 = trace.stage0(L)
    l = L - 1
    checks: Dict[str, bool] = {}
    typ = ""
    if i in st0.tilde_upp:
        typ = "2"
        prev = trace.terminals[l]
        beta = b.beta(L)
        rel = any(
            isinstance(u, int) and (u - beta) % b.e(l) == 0
            and v == u + b.betabar(L + 1) - b.betabar(L)
            for u in prev.values) if L < b.g else False
        checks["value_relation"] = rel
    beg = beg_value(entry.form, b)
    nxt = b.beta(L + 1)
    if typ == "2":
        checks["beg_equals_next"] = beg == nxt
    else:
        # Beg beyond beta_L marks the dicritical forms; the rest are f^m omega
        typ = "1" if beg > b.beta(L) else "3"
        if typ == "3":
            checks["beg_at_most_beta"] = beg <= b.beta(L)
        else:
            checks["beg_at_most_next"] = beg is not INF and (nxt is INF or beg <= nxt)
    rep = FormReport(typ, kappa(b, v), beg, L, i, checks=checks)
    if companion and typ in ("1", "2") and beg is not INF:
        if T is None:
            T = companion_T(entry.form, b, v)
        start = beg if nxt is INF else min(beg, nxt)
        rep.companion = companion_curve(entry.form, b, start, T)
        want = tuple(beta for beta in b.char_exponents if beta < start)
        checks["companion_equisingular"] = rep.companion.char_exponents() == want
    return rep


def companion_T(w: OneForm, b: Branch, v: int) -> int:
    """Default companion order: well past the value and the last characteristic
    exponent."""
    return 2 * (max(v, b.beta(b.g)) + b.n)


def basis_values(b: Branch) -> List[int]:
    return construct_cx_basis(b).values()


def decompose_form(w: OneForm, cx: CxBasis, T: Optional[int] = None):
    from .pullback import decompose
    basis = [(e.form, e.value) for e in cx.entries]
    return decompose(w, basis, cx.branch, T)


__all__ = [
    "EngineConfig", "StageFamily", "TerminalFamily", "CxBasis", "BasisEntry", "FormReport",
    "StageTrace", "Reduction", "UppReport", "Unresolved", "InternalConsistencyError",
    "PairingViolation", "NoPartner", "StageCap", "certificate", "construct_cx_basis",
    "classify_form", "initial_family", "run_level", "kappa", "default_T", "decompose_form",
]
