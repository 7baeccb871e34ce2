"""Equivariant complexes d_eq = d_0 + h d_1 + h^2 d_2 + ..., their h = 1
evaluation, and the group cochain complex of C (x) C.

Chains with h-polynomial coefficients are :class:`EqChain` objects keyed by
(orbit label, h-power).  The h-power of a correction entry is implied by the
index rule, so corrections are stored as separate sparse matrices d_k.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from fractions import Fraction

from .complex import (
    RECAP_DIRECTION,
    Chain,
    FilteredComplex,
    Orbit,
    ValidationReport,
    validate,
)
from .scalar import ZERO, NovikovScalar, as_scalar, monomial

__all__ = [
    "EqChain",
    "EquivariantComplex",
    "validate_equivariant",
    "evaluate_h1",
    "split_by_grading",
    "GroupCochainComplex",
    "build_group_cochain",
    "rank_window",
]


def _acc(out: dict, key, value: NovikovScalar) -> None:
    s = out.get(key, ZERO) + value
    if s:
        out[key] = s
    else:
        out.pop(key, None)


class EqChain(Mapping):
    """Sparse sum of lambda * h^p * x, keyed by (label, p)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        out: dict = {}
        for k, v in items:
            if v:
                _acc(out, k, v)
        self._c = out

    def __getitem__(self, key):
        return self._c[key]

    def get(self, key, default=ZERO):
        return self._c.get(key, default)

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._c == dict(EqChain(other)._c)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: Mapping) -> EqChain:
        out = dict(self._c)
        for k, v in other.items():
            _acc(out, k, v)
        return EqChain(out)

    __sub__ = __add__

    def scale(self, lam: NovikovScalar, hpow: int = 0) -> EqChain:
        if not lam:
            return EqChain()
        return EqChain({(x, p + hpow): v * lam for (x, p), v in self._c.items()})

    def h_shift(self, k: int) -> EqChain:
        return self.scale(monomial(0), k)

    def at_h1(self) -> Chain:
        out: dict = {}
        for (x, _), v in self._c.items():
            _acc(out, x, v)
        return Chain(out)

    def h_part(self, p: int) -> Chain:
        return Chain({x: v for (x, q), v in self._c.items() if q == p})

    def min_hpow(self) -> int:
        return min((p for _, p in self._c), default=0)

    def __repr__(self):
        inner = " + ".join(f"({v})*h^{p}*{x}" for (x, p), v in sorted(self._c.items()))
        return f"EqChain({inner or '0'})"


class EquivariantComplex:
    """Base complex (with d_0 = its differential) plus corrections {k: rows}."""

    def __init__(self, base: FilteredComplex, corrections=()):
        self.base = base
        self.corrections: dict[int, dict[str, dict[str, NovikovScalar]]] = {}
        if isinstance(corrections, Mapping):
            items = []
            for k, entries in corrections.items():
                if isinstance(entries, Mapping):
                    entries = ((s, t, e) for (s, t), e in entries.items())
                items.extend((k, s, t, e) for s, t, e in entries)
        else:
            items = corrections
        for k, src, tgt, entry in items:
            k = int(k)
            if k < 1:
                raise ValueError(f"correction degree must be >= 1, got {k}")
            for lbl in (src, tgt):
                if lbl not in base.position:
                    raise KeyError(f"correction names unknown orbit {lbl!r}")
            _acc(self.corrections.setdefault(k, {}).setdefault(src, {}), tgt, as_scalar(entry))
        for k in list(self.corrections):
            rows = {s: r for s, r in self.corrections[k].items() if r}
            if rows:
                self.corrections[k] = rows
            else:
                del self.corrections[k]

    @property
    def depth(self) -> int:
        return max(self.corrections, default=0)

    def piece(self, k: int) -> dict[str, dict[str, NovikovScalar]]:
        return self.base.rows if k == 0 else self.corrections.get(k, {})

    def correction_entries(self):
        for k in sorted(self.corrections):
            for src in self.base.labels:
                for tgt, e in self.corrections[k].get(src, {}).items():
                    yield k, src, tgt, e

    def apply_piece(self, k: int, chain: Mapping) -> Chain:
        rows = self.piece(k)
        out: dict = {}
        for src, lam in chain.items():
            for tgt, e in rows.get(src, {}).items():
                _acc(out, tgt, lam * e)
        return Chain(out)

    def d_eq(self, xi: Mapping) -> EqChain:
        """d_eq on an h-chain keyed by (label, hpow)."""
        out: dict = {}
        for k in range(self.depth + 1):
            rows = self.piece(k)
            if not rows:
                continue
            for (src, p), lam in xi.items():
                for tgt, e in rows.get(src, {}).items():
                    _acc(out, (tgt, p + k), lam * e)
        return EqChain(out)

    def action(self, xi: Mapping):
        best = math.inf
        C = self.base
        for (x, _), lam in xi.items():
            if lam:
                best = min(best, C.level(x, lam))
        return best

    def __repr__(self):
        return f"EquivariantComplex({self.base!r}, depth={self.depth})"


def validate_equivariant(E: EquivariantComplex) -> ValidationReport:
    """Base validity, index rule and action rule per d_k, and sum_{i+j=k} d_i d_j = 0."""
    report = validate(E.base)
    C = E.base
    two_n = 2 * C.params.N
    for k, src, tgt, entry in E.correction_entries():
        if src == tgt:
            report.add("self-arrow", f"d_{k} has diagonal entry {entry} on {src!r}", k, src)
        g = C.gap(src, tgt, entry)
        if g < 0:
            report.add("action", f"d_{k} entry {src}->{tgt} lowers action by {-g}", k, src, tgt)
        if not entry.is_monomial():
            report.add("grading", f"d_{k} entry {src}->{tgt} = {entry} is not a monomial",
                       k, src, tgt)
            continue
        lhs = C.orbit(tgt).index + two_n * entry.shift
        rhs = C.orbit(src).index + 1 - k
        if lhs != rhs:
            report.add("grading", f"d_{k} entry {src}->{tgt} q^{entry.shift}: index {lhs} "
                       f"!= {rhs}", k, src, tgt)
    K = E.depth
    for total in range(1, 2 * K + 1):
        for x in C.labels:
            acc = Chain()
            for i in range(max(0, total - K), min(total, K) + 1):
                j = total - i
                acc = acc + E.apply_piece(i, E.apply_piece(j, Chain.basis(x)))
            if acc:
                report.add("h-identity", f"h^{total} part of d_eq^2({x}) = {acc!r}", total, x)
    return report


def evaluate_h1(E: EquivariantComplex) -> FilteredComplex:
    """C~: same orbits, differential d_0 + d_1 + ..., ungraded."""
    diff: dict = {}
    for src, tgt, e in E.base.entries():
        _acc(diff, (src, tgt), e)
    for _, src, tgt, e in E.correction_entries():
        _acc(diff, (src, tgt), e)
    return FilteredComplex(E.base.params, E.base.orbits, diff, graded=False)


def split_by_grading(Ct: FilteredComplex, indices: Mapping | None = None) -> EquivariantComplex:
    """Recover (d_0, d_1, ...) from C~ using the index rule on each monomial."""
    idx = {o.label: o.index for o in Ct.orbits}
    if indices:
        idx.update(indices)
    two_n = 2 * Ct.params.N
    pieces: dict[int, dict] = {}
    for src, tgt, e in Ct.entries():
        if not e.is_laurent():
            raise ValueError(f"entry {src}->{tgt} = {e} is not a Laurent polynomial")
        for a in e.exponents():
            k = idx[src] + 1 - idx[tgt] - two_n * a
            if k < 0:
                raise ValueError(f"monomial q^{a} of {src}->{tgt} would sit in d_{k}")
            _acc(pieces.setdefault(k, {}), (src, tgt), monomial(a))
    orbits = [Orbit(o.label, o.action, idx[o.label]) for o in Ct.orbits]
    base = FilteredComplex(Ct.params, orbits, pieces.pop(0, {}), graded=True)
    return EquivariantComplex(base, {k: v for k, v in pieces.items()})


class GroupCochainComplex:
    """C (x) C over Lambda[h] with d = d (x) 1 + 1 (x) d + h(1 + tau).

    Chains are keyed by ((x, y), hpow).
    """

    def __init__(self, C: FilteredComplex):
        self.C = C

    def basis(self):
        labels = self.C.labels
        return [(x, y) for x in labels for y in labels]

    def action(self, chain: Mapping):
        best = math.inf
        C = self.C
        for ((x, y), _), lam in chain.items():
            if lam:
                best = min(best, C.level(x, lam) + C.orbit(y).action)
        return best

    def d(self, chain: Mapping) -> EqChain:
        C = self.C
        out: dict = {}
        for ((x, y), p), lam in chain.items():
            for x2, e in C.rows.get(x, {}).items():
                _acc(out, ((x2, y), p), lam * e)
            for y2, e in C.rows.get(y, {}).items():
                _acc(out, ((x, y2), p), lam * e)
            _acc(out, ((x, y), p + 1), lam)
            _acc(out, ((y, x), p + 1), lam)
        return EqChain(out)


def build_group_cochain(C: FilteredComplex) -> GroupCochainComplex:
    return GroupCochainComplex(C)


def rank_window(C: FilteredComplex, lo, hi) -> int:
    """F_2-dimension of the homology of capped generators with action in [lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    step = RECAP_DIRECTION * C.params.lambda0
    if step < 0:
        raise NotImplementedError("rank_window assumes q raises action")
    window: dict[str, range] = {}
    gens: dict[tuple[str, int], int] = {}
    for o in C.orbits:
        ks = range(math.ceil((lo - o.action) / step), math.ceil((hi - o.action) / step))
        window[o.label] = ks
        for k in ks:
            gens[(o.label, k)] = len(gens)
    pivots: dict[int, int] = {}
    rank = 0
    for (x, k) in gens:
        v = 0
        for y, e in C.rows.get(x, {}).items():
            ks = window[y]
            if not ks:
                continue
            if e.is_laurent():
                exps = e.exponents()
            else:
                terms = ks.stop - k - e.shift
                bits = e.series(terms) if terms > 0 else []
                exps = [e.shift + i for i, b in enumerate(bits) if b]
            for a in exps:
                j = gens.get((y, k + a))
                if j is not None:
                    v ^= 1 << j
        while v:
            low = (v & -v).bit_length() - 1
            if low in pivots:
                v ^= pivots[low]
            else:
                pivots[low] = v
                rank += 1
                break
    return len(gens) - 2 * rank
