"""Floer graphs: one arrow per nonzero capped-level coefficient of the differential.

Graphs are stored in reduced form (vertices are orbits, each arrow carries
the recap offset of its target).  The unreduced graph on capped generators
is the lift of every arrow along simultaneous recapping; see :meth:`FloerGraph.lift`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import RECAP_DIRECTION, FilteredComplex

__all__ = [
    "Arrow",
    "FloerGraph",
    "build_graph",
    "build_equivariant_graph",
    "shortest_arrows",
    "export_dot",
    "arrows_json",
]


@dataclass(frozen=True, order=True)
class Arrow:
    length: Fraction
    source: str
    target: str
    recap: int = 0
    hpow: int | None = None

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.source, self.target, self.recap)


@dataclass
class FloerGraph:
    vertices: list[str]
    arrows: list[Arrow] = field(default_factory=list)
    equivariant: bool = False

    def lift(self, source_recap: int = 0):
        """Arrows of the unreduced graph leaving capped generators with the given recap."""
        for a in self.arrows:
            yield (a.source, source_recap), (a.target, source_recap + a.recap), a

    def __len__(self):
        return len(self.arrows)


def _arrows_of(C: FilteredComplex, rows, hpow):
    lam0 = C.params.lambda0
    for src, row in rows.items():
        a_src = C.orbit(src).action
        for tgt, entry in row.items():
            if not entry.is_laurent():
                raise ValueError(f"entry {src}->{tgt} is not a Laurent polynomial")
            a_tgt = C.orbit(tgt).action
            for k in entry.exponents():
                yield Arrow(a_tgt + RECAP_DIRECTION * k * lam0 - a_src, src, tgt, k, hpow)


def build_graph(C: FilteredComplex) -> FloerGraph:
    return FloerGraph(C.labels, sorted(_arrows_of(C, C.rows, None)))


def build_equivariant_graph(E) -> FloerGraph:
    """Arrows of d_eq = d_0 + h d_1 + ...; each arrow records its h-power."""
    C = E.base
    arrows = list(_arrows_of(C, C.rows, 0))
    for k, rows in sorted(E.corrections.items()):
        arrows.extend(_arrows_of(C, rows, k))
    arrows.sort(key=lambda a: (a.length, a.source, a.target, a.recap, a.hpow))
    return FloerGraph(C.labels, arrows, equivariant=True)


def shortest_arrows(G: FloerGraph) -> list[Arrow]:
    if not G.arrows:
        return []
    best = min(a.length for a in G.arrows)
    return [a for a in G.arrows if a.length == best]


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    f = float(x)
    return repr(f) if Fraction(repr(f)) == x else f"{x.numerator}/{x.denominator}"


def export_dot(G: FloerGraph) -> str:
    lines = ["digraph {"]
    for v in G.vertices:
        lines.append(f'  "{v}";')
    for a in G.arrows:
        label = _fmt(a.length)
        if a.recap:
            label += f" q^{a.recap}"
        if a.hpow:
            label = f"h^{a.hpow} {label}"
        lines.append(f'  "{a.source}" -> "{a.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def arrows_json(G: FloerGraph) -> list[dict]:
    out = []
    for a in G.arrows:
        d = {"from": a.source, "to": a.target, "recap": a.recap,
             "length": float(a.length), "length_exact": str(a.length)}
        if a.hpow is not None:
            d["hpow"] = a.hpow
        out.append(d)
    return out
