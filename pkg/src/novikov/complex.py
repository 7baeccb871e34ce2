"""Action-filtered chain complexes over the Novikov field.

A complex is stored on orbit classes: every orbit carries one preferred
capping, and the capped generator ``q^k x`` has action
``A(x) + k * lambda0`` and index ``mu(x) + 2N k``.  The differential is a
sparse matrix of :class:`NovikovScalar` entries, row = source orbit,
column = target orbit, and it raises action.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .scalar import ZERO, NovikovScalar, as_scalar, monomial

__all__ = [
    "RECAP_DIRECTION",
    "GlobalParams",
    "Orbit",
    "CappedGenerator",
    "Chain",
    "FilteredComplex",
    "Violation",
    "ValidationReport",
    "to_action",
    "action_of_chain",
    "validate",
    "recap_chain",
    "pairing_coefficient",
]

# +1: multiplication by q raises action by lambda0.  Flip to -1 for the
# opposite convention; every action computation goes through `level`.
RECAP_DIRECTION = 1


def to_action(value) -> tuple[Fraction, bool]:
    """Coerce an action value to a Fraction; the flag is False for floats."""
    if isinstance(value, bool):
        raise TypeError("action cannot be a bool")
    if isinstance(value, (Rational, str)):
        return Fraction(value), True
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"action must be finite, got {value}")
        return Fraction(repr(value)), False
    return Fraction(str(value)), True


@dataclass(frozen=True)
class GlobalParams:
    N: int
    lambda0: Fraction
    n: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"minimal Chern number must be a positive integer, got {self.N}")
        lam, _ = to_action(self.lambda0)
        if lam <= 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "lambda0", lam)
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class Orbit:
    label: str
    action: Fraction
    index: int


@dataclass(frozen=True, order=True)
class CappedGenerator:
    orbit: str
    recap: int = 0


class Chain(Mapping):
    """Sparse Lambda-linear combination of orbits, label -> NovikovScalar.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        self._c = {k: v for k, v in items if v}

    @classmethod
    def basis(cls, label: str, recap: int = 0) -> Chain:
        return cls({label: monomial(recap)})

    def __getitem__(self, label):
        return self._c[label]

    def get(self, label, default=ZERO):
        return self._c.get(label, default)

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, Chain):
            return self._c == other._c
        if isinstance(other, Mapping):
            return self._c == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: Chain) -> Chain:
        out = dict(self._c)
        for k, v in other.items():
            s = out.get(k, ZERO) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Chain(out)

    __sub__ = __add__

    def scale(self, lam: NovikovScalar) -> Chain:
        if not lam:
            return Chain()
        return Chain({k: v * lam for k, v in self._c.items()})

    def __rmul__(self, lam: NovikovScalar) -> Chain:
        return self.scale(lam)

    def __repr__(self):
        inner = " + ".join(f"({v})*{k}" for k, v in sorted(self._c.items()))
        return f"Chain({inner or '0'})"


@dataclass
class Violation:
    kind: str
    detail: str
    where: tuple = ()

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail, "where": list(self.where)}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, detail: str, *where) -> None:
        self.violations.append(Violation(kind, detail, tuple(where)))

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.as_dict() for v in self.violations]}


class FilteredComplex:
    """(CF, d): orbits with base action/index and a sparse differential."""

    def __init__(self, params: GlobalParams, orbits: Iterable, differential=(),
                 graded: bool = True):
        self.params = params
        self.graded = bool(graded)
        self.exact = True
        built = []
        for o in orbits:
            if isinstance(o, Orbit):
                label, action, index = o.label, o.action, o.index
            elif isinstance(o, Mapping):
                label, action, index = o["label"], o["action"], o.get("index", 0)
            else:
                label, action, index = o
            a, exact = to_action(action)
            self.exact &= exact
            built.append(Orbit(str(label), a, int(index)))
        self.orbits: tuple[Orbit, ...] = tuple(built)
        self._by_label = {o.label: o for o in self.orbits}
        if len(self._by_label) != len(self.orbits):
            seen, dup = set(), None
            for o in self.orbits:
                if o.label in seen:
                    dup = o.label
                seen.add(o.label)
            raise ValueError(f"duplicate orbit label {dup!r}")
        self.position = {o.label: i for i, o in enumerate(self.orbits)}

        rows: dict[str, dict[str, NovikovScalar]] = {}
        if isinstance(differential, Mapping):
            triples = ((s, t, e) for (s, t), e in differential.items())
        else:
            triples = differential
        for src, tgt, entry in triples:
            if src not in self._by_label or tgt not in self._by_label:
                raise KeyError(f"differential entry {src!r}->{tgt!r} names an unknown orbit")
            entry = as_scalar(entry)
            row = rows.setdefault(src, {})
            s = row.get(tgt, ZERO) + entry
            if s:
                row[tgt] = s
            else:
                row.pop(tgt, None)
        self.rows: dict[str, dict[str, NovikovScalar]] = {k: v for k, v in rows.items() if v}

    # basic views

    def __len__(self):
        return len(self.orbits)

    def __repr__(self):
        return (f"FilteredComplex({len(self.orbits)} orbits, {self.entry_count()} entries, "
                f"graded={self.graded})")

    @property
    def labels(self) -> list[str]:
        return [o.label for o in self.orbits]

    def orbit(self, label: str) -> Orbit:
        return self._by_label[label]

    def entries(self) -> Iterator[tuple[str, str, NovikovScalar]]:
        for src in self.labels:
            for tgt, entry in self.rows.get(src, {}).items():
                yield src, tgt, entry

    def entry(self, src: str, tgt: str) -> NovikovScalar:
        return self.rows.get(src, {}).get(tgt, ZERO)

    def entry_count(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def level(self, label: str, coeff: NovikovScalar):
        """Action of the term ``coeff * label``; +inf if coeff is zero."""
        if not coeff:
            return math.inf
        return self._by_label[label].action + RECAP_DIRECTION * coeff.shift * self.params.lambda0

    def capped_action(self, label: str, recap: int = 0) -> Fraction:
        return self._by_label[label].action + RECAP_DIRECTION * recap * self.params.lambda0

    def capped_index(self, label: str, recap: int = 0) -> int:
        return self._by_label[label].index + 2 * self.params.N * recap

    def gap(self, src: str, tgt: str, entry: NovikovScalar):
        """Action gap of the leading capped arrow of one matrix entry."""
        return self.level(tgt, entry) - self._by_label[src].action

    def apply(self, chain: Mapping) -> Chain:
        """The differential applied to a chain."""
        out: dict[str, NovikovScalar] = {}
        for src, lam in chain.items():
            row = self.rows.get(src)
            if not row or not lam:
                continue
            for tgt, entry in row.items():
                s = out.get(tgt, ZERO) + lam * entry
                if s:
                    out[tgt] = s
                else:
                    out.pop(tgt, None)
        return Chain(out)

    d = apply

    # derived complexes

    def with_actions(self, actions: Mapping) -> FilteredComplex:
        orbits = [Orbit(o.label, actions.get(o.label, o.action), o.index) for o in self.orbits]
        return FilteredComplex(self.params, orbits, self._entry_dict(), graded=self.graded)

    def with_differential(self, differential, graded: bool | None = None) -> FilteredComplex:
        return FilteredComplex(self.params, self.orbits, differential,
                               graded=self.graded if graded is None else graded)

    def _entry_dict(self) -> dict:
        return {(s, t): e for s, t, e in self.entries()}


def action_of_chain(xi: Mapping, C: FilteredComplex):
    """Filtration level: min over the support of A(x) + nu(lambda) * lambda0."""
    best = math.inf
    for label, lam in xi.items():
        if lam:
            a = C.level(label, lam)
            if a < best:
                best = a
    return best


def recap_chain(xi: Mapping, k: int) -> Chain:
    """Multiply every coefficient by q^k."""
    return Chain({label: lam.shifted(k) for label, lam in xi.items()})


def pairing_coefficient(x: CappedGenerator, eta: Mapping) -> int:
    """<x, eta>: the coefficient of the capped generator x inside eta."""
    lam = eta.get(x.orbit, ZERO) if isinstance(eta, Mapping) else ZERO
    if not lam:
        return 0
    if not lam.is_laurent():
        raise ValueError(f"coefficient {lam} on {x.orbit!r} is not a Laurent polynomial")
    return lam.coefficient(x.recap)


def validate(C: FilteredComplex) -> ValidationReport:
    """Check d^2 = 0, strict action increase and, if graded, the index rule."""
    report = ValidationReport()
    lam0 = C.params.lambda0
    two_n = 2 * C.params.N
    for src, tgt, entry in C.entries():
        if src == tgt:
            report.add("self-arrow", f"diagonal entry {entry} on {src!r}", src, tgt)
        g = C.gap(src, tgt, entry)
        if not g > 0:
            report.add("action", f"{src}->{tgt} entry {entry} has action gap {g} "
                       f"(lambda0={lam0}); must be > 0", src, tgt)
        if C.graded:
            if not entry.is_monomial():
                report.add("grading", f"{src}->{tgt} entry {entry} is not a monomial "
                           "in a graded complex", src, tgt)
            else:
                k = entry.shift
                lhs = C.orbit(tgt).index + two_n * k
                rhs = C.orbit(src).index + 1
                if lhs != rhs:
                    report.add("grading", f"{src}->{tgt} entry q^{k}: index "
                               f"{C.orbit(tgt).index}+{two_n}*{k} != {C.orbit(src).index}+1",
                               src, tgt)
    for label in C.labels:
        dd = C.apply(C.apply(Chain.basis(label)))
        if dd:
            report.add("d^2", f"d(d({label})) = {dd!r}", label)
    return report
