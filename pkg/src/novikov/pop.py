"""The equivariant pair-of-pants map as data, its axioms, and synthetic triples.

A :class:`PairOfPantsMap` stores P(x (x) y) for orbit pairs only; values on
capped generators follow from P(q^a x (x) q^b y) = q^(a+b) P(x (x) y).

Synthetic triples (C, E, P) come in two models:

``pseudo-rotation``
    zero differentials; P(x (x) x) = h^m x^2 and nothing else.
``frobenius-double``
    E is C with coefficients squared (q^k -> q^2k) and actions doubled,
    split into d_0, d_1, ... by an index assignment mu(x^2) = 2 mu(x) + n - m_x.
    P is transported through a singular decomposition B of C: with
    sq(b) = sum h^(m_z) lambda_z^2 z^2 we have d_eq sq = h^-1 sq d, so
    P(b (x) b) = sq(b) plus one of P(eta (x) gamma), P(gamma (x) eta) equal to
    h^-1 sq(gamma) gives a chain map, and expanding in B recovers P on orbits.
"""

from __future__ import annotations

import random
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .complex import Chain, FilteredComplex, GlobalParams, Orbit
from .equivariant import EqChain, EquivariantComplex, build_group_cochain
from .persistence import singular_decomposition
from .scalar import ONE, ZERO, NovikovScalar, monomial
from .synthetic import random_actions, random_graded_complex

__all__ = [
    "PairOfPantsMap",
    "AxiomReport",
    "Triple",
    "Unsatisfiable",
    "check_chain_map",
    "check_filtration",
    "check_seidel",
    "check_h0_reduction",
    "check_all",
    "seidel_potentials",
    "frobenius_double",
    "generate_synthetic",
    "square_label",
]


class Unsatisfiable(ValueError):
    """No Seidel exponents fit the requested complex (an orbit-level cycle)."""


def square_label(label: str) -> str:
    return f"{label}^2"


@dataclass
class PairOfPantsMap:
    squaring: dict[str, str]
    values: dict[tuple[str, str], EqChain] = field(default_factory=dict)

    def image(self, x: str, y: str) -> EqChain:
        return self.values.get((x, y), EqChain())

    def capped_image(self, x: str, a: int, y: str, b: int) -> EqChain:
        return self.image(x, y).scale(monomial(a + b))

    def apply(self, chain: Mapping) -> EqChain:
        """P on a group-cochain chain keyed by ((x, y), hpow)."""
        out = EqChain()
        for ((x, y), p), lam in chain.items():
            img = self.values.get((x, y))
            if img:
                out = out + img.scale(lam, p)
        return out

    def bilinear(self, xi: Mapping, zeta: Mapping) -> EqChain:
        """P(xi (x) zeta) for chains of C."""
        acc: dict = {}
        for x, a in xi.items():
            for y, b in zeta.items():
                img = self.values.get((x, y))
                if not img:
                    continue
                ab = a * b
                for key, v in img.items():
                    s = acc.get(key, ZERO) + ab * v
                    if s:
                        acc[key] = s
                    else:
                        acc.pop(key, None)
        return EqChain(acc)

    def copy(self) -> PairOfPantsMap:
        return PairOfPantsMap(dict(self.squaring), dict(self.values))


@dataclass
class AxiomReport:
    axiom: str
    status: str = "pass"
    failures: list[dict] = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def fail(self, **detail) -> None:
        self.status = "fail"
        self.failures.append(detail)

    def as_dict(self) -> dict:
        d = {"axiom": self.axiom, "status": self.status, "failures": self.failures}
        if self.note:
            d["note"] = self.note
        return d


def check_chain_map(P: PairOfPantsMap, C: FilteredComplex, E: EquivariantComplex) -> AxiomReport:
    """P o d_Z2 = d_eq o P on every orbit pair."""
    report = AxiomReport("chain-map")
    G = build_group_cochain(C)
    for x in C.labels:
        for y in C.labels:
            lhs = P.apply(G.d({((x, y), 0): ONE}))
            rhs = E.d_eq(P.image(x, y))
            if lhs != rhs:
                report.fail(pair=[x, y], difference=repr(lhs + rhs))
    return report


def check_filtration(P: PairOfPantsMap, C: FilteredComplex, E: EquivariantComplex) -> AxiomReport:
    """A(P(x (x) y)) >= A(x) + A(y)."""
    report = AxiomReport("filtration")
    for (x, y), img in sorted(P.values.items()):
        if x not in C.position or y not in C.position:
            report.fail(pair=[x, y], detail="unknown orbit")
            continue
        bound = C.orbit(x).action + C.orbit(y).action
        try:
            a = E.action(img)
        except KeyError as exc:
            report.fail(pair=[x, y], detail=f"image names unknown orbit {exc}")
            continue
        if a < bound:
            report.fail(pair=[x, y], action=str(a), bound=str(bound))
    return report


def check_seidel(P: PairOfPantsMap, C: FilteredComplex, E: EquivariantComplex) -> AxiomReport:
    """P(x (x) x) = h^m x^2 + (action > 2A(x)), m = 2 mu(x) - mu(x^2) + n >= 0."""
    report = AxiomReport("seidel")
    n = C.params.n
    for x in C.labels:
        sq = P.squaring.get(x)
        if sq is None or sq not in E.base.position:
            report.fail(orbit=x, detail=f"no squared orbit for {x!r}")
            continue
        m = 2 * C.orbit(x).index - E.base.orbit(sq).index + n
        two_a = 2 * C.orbit(x).action
        if m < 0:
            report.fail(orbit=x, detail=f"required h-power {m} is negative")
            continue
        if E.base.orbit(sq).action != two_a:
            report.fail(orbit=x, detail=f"A({sq}) != 2A({x})")
            continue
        img = P.image(x, x)
        low = {key: lam for key, lam in img.items() if E.base.level(key[0], lam) <= two_a}
        lead = low.get((sq, m))
        if lead is None or E.base.level(sq, lead) != two_a:
            found = sorted(p for (z, p) in low if z == sq)
            report.fail(orbit=x, expected_m=m, found_m=found,
                        detail="leading term h^m x^2 missing")
        extra = sorted(f"{z}*h^{p}" for (z, p) in low if (z, p) != (sq, m))
        if extra:
            report.fail(orbit=x, detail=f"terms of action <= 2A(x): {extra}")
    return report


def check_h0_reduction(P: PairOfPantsMap, table: Mapping | None = None) -> AxiomReport:
    """The h^0 part of P matches a classical product table, if one is supplied."""
    report = AxiomReport("h0-reduction")
    if table is None:
        report.status = "skipped"
        report.note = "no classical product table supplied"
        return report
    keys = set(table) | {k for k, v in P.values.items() if v.h_part(0)}
    for key in sorted(keys):
        want = Chain(table.get(key, {}))
        got = P.image(*key).h_part(0)
        if got != want:
            report.fail(pair=list(key), expected=repr(want), actual=repr(got))
    return report


def check_all(P, C, E, table=None) -> list[AxiomReport]:
    return [check_chain_map(P, C, E), check_filtration(P, C, E), check_seidel(P, C, E),
            check_h0_reduction(P, table)]


# --- synthetic triples ------------------------------------------------------------

@dataclass
class Triple:
    C: FilteredComplex
    E: EquivariantComplex
    P: PairOfPantsMap
    model: str
    seidel: dict[str, int]


def seidel_potentials(C: FilteredComplex, rng: random.Random | None = None,
                      slack: int = 0) -> dict[str, int]:
    """m >= 0 with m_y >= m_x + 1 along every arrow x -> y (longest paths)."""
    succ: dict[str, set[str]] = {x: set() for x in C.labels}
    indeg = {x: 0 for x in C.labels}
    for src, tgt, _ in C.entries():
        if tgt not in succ[src]:
            succ[src].add(tgt)
            indeg[tgt] += 1
    m = {x: 0 for x in C.labels}
    ready = [x for x in C.labels if indeg[x] == 0]
    seen = 0
    while ready:
        x = ready.pop()
        seen += 1
        if rng is not None and slack:
            m[x] += rng.randint(0, slack)
        for y in sorted(succ[x]):
            m[y] = max(m[y], m[x] + 1)
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    if seen != len(C.labels):
        raise Unsatisfiable("orbit-level arrows contain a cycle; no Seidel exponents exist")
    return m


def frobenius_double(C: FilteredComplex, m: Mapping[str, int]) -> EquivariantComplex:
    """Square coefficients, double actions, and grade by mu(x^2) = 2 mu(x) + n - m_x."""
    n = C.params.n
    orbits = [Orbit(square_label(o.label), 2 * o.action, 2 * o.index + n - m[o.label])
              for o in C.orbits]
    d0, corrections = {}, []
    for src, tgt, e in C.entries():
        if not e.is_monomial():
            raise ValueError("frobenius_double expects a graded complex")
        j = m[tgt] - m[src] - 1
        if j < 0:
            raise Unsatisfiable(f"m({tgt}) < m({src}) + 1")
        s, t, e2 = square_label(src), square_label(tgt), e.square()
        if j == 0:
            d0[(s, t)] = e2
        else:
            corrections.append((j, s, t, e2))
    base = FilteredComplex(C.params, orbits, d0, graded=True)
    return EquivariantComplex(base, corrections)


def _sq(chain: Mapping, m: Mapping[str, int]) -> EqChain:
    return EqChain({(square_label(z), m[z]): lam.square() for z, lam in chain.items()})


def _coordinates(vectors, labels) -> dict[str, dict[int, NovikovScalar]]:
    """c[x][i] with x = sum_i c[x][i] * vectors[i] (Gauss-Jordan over F_2(q))."""
    n = len(labels)
    col = {lbl: i for i, lbl in enumerate(labels)}
    # augmented rows: vector coordinates | identity
    rows = []
    for i, v in enumerate(vectors):
        left = {col[z]: lam for z, lam in v.items()}
        rows.append((left, {i: ONE}))
    inv_rows: list = [None] * n
    remaining = list(range(len(rows)))
    for j in range(n):
        piv = next((r for r in remaining if j in rows[r][0]), None)
        if piv is None:
            raise ValueError("decomposition vectors are not a basis")
        remaining.remove(piv)
        left, right = rows[piv]
        s = left[j].inv()
        left = {k: v * s for k, v in left.items()}
        right = {k: v * s for k, v in right.items()}
        rows[piv] = (left, right)
        for r in range(len(rows)):
            if r == piv or j not in rows[r][0]:
                continue
            f = rows[r][0][j]
            l2, r2 = dict(rows[r][0]), dict(rows[r][1])
            for k, v in left.items():
                t = l2.get(k, ZERO) + f * v
                if t:
                    l2[k] = t
                else:
                    l2.pop(k, None)
            for k, v in right.items():
                t = r2.get(k, ZERO) + f * v
                if t:
                    r2[k] = t
                else:
                    r2.pop(k, None)
            rows[r] = (l2, r2)
        inv_rows[j] = piv
    return {labels[j]: rows[inv_rows[j]][1] for j in range(n)}


def transported_pop(C: FilteredComplex, m: Mapping[str, int], rng: random.Random,
                    decomposition=None) -> PairOfPantsMap:
    B = decomposition if decomposition is not None else singular_decomposition(C)
    vectors = B.vectors()
    coords = _coordinates(vectors, C.labels)
    sqs = [_sq(v, m) for v in vectors]
    a = len(B.cycles)
    cross = []   # (i, j, value): P(b_i (x) b_j) for off-diagonal pairs
    for p in range(len(B.pairs)):
        i_eta, i_gamma = a + 2 * p, a + 2 * p + 1
        val = sqs[i_gamma].h_shift(-1)
        if rng.random() < 0.5:
            cross.append((i_eta, i_gamma, val))
        else:
            cross.append((i_gamma, i_eta, val))
    P = PairOfPantsMap({x: square_label(x) for x in C.labels})
    for x in C.labels:
        cx = coords[x]
        for y in C.labels:
            cy = coords[y]
            acc = EqChain()
            for i, ci in cx.items():
                cj = cy.get(i)
                if cj:
                    acc = acc + sqs[i].scale(ci * cj)
            for i, j, val in cross:
                ci, cj = cx.get(i), cy.get(j)
                if ci and cj:
                    acc = acc + val.scale(ci * cj)
            if acc:
                P.values[(x, y)] = acc
    return P


def _planted_complex(rng, count, bar_lengths, N, lam0, n, denominator):
    bars = [Fraction(b) for b in bar_lengths]
    if 2 * len(bars) > count:
        raise ValueError(f"{len(bars)} bars need at least {2 * len(bars)} orbits")
    actions = random_actions(rng, count, lam0, denominator)
    orbits, diff = [], {}
    for i, L in enumerate(bars):
        mu = rng.randrange(2 * N)
        orbits.append(Orbit(f"x{2 * i}", actions[2 * i], mu))
        orbits.append(Orbit(f"x{2 * i + 1}", actions[2 * i] + L, mu + 1))
        diff[(f"x{2 * i}", f"x{2 * i + 1}")] = ONE
    for i in range(2 * len(bars), count):
        orbits.append(Orbit(f"x{i}", actions[i], rng.randrange(2 * N)))
    return FilteredComplex(GlobalParams(N, lam0, n), orbits, diff)


def generate_synthetic(orbit_count: int, bar_lengths=None, seed=0,
                       model: str = "frobenius-double", *, N: int | None = None,
                       lambda0=None, n: int | None = None, denominator: int = 10**4,
                       max_entries: int | None = 60, slack: int = 1) -> Triple:
    """A (C, E, P) triple that passes every axiom check.

    Raises :class:`Unsatisfiable` when the random complex has an orbit-level
    cycle of arrows; retry with another seed.
    """
    if orbit_count < 1:
        raise ValueError("orbit_count must be >= 1")
    rng = random.Random(seed)
    N = N if N is not None else rng.choice([1, 2, 3])
    lam0 = Fraction(lambda0) if lambda0 is not None else Fraction(rng.randint(5, 20))
    n = n if n is not None else rng.randint(0, 3)

    if model == "pseudo-rotation":
        actions = random_actions(rng, orbit_count, lam0, denominator)
        orbits = [Orbit(f"x{i}", actions[i], rng.randrange(-2 * N, 2 * N))
                  for i in range(orbit_count)]
        C = FilteredComplex(GlobalParams(N, lam0, n), orbits)
        m = {o.label: rng.randint(0, 3) for o in orbits}
        E = frobenius_double(C, m)
        P = PairOfPantsMap({x: square_label(x) for x in C.labels})
        for x in C.labels:
            P.values[(x, x)] = EqChain({(square_label(x), m[x]): ONE})
        return Triple(C, E, P, model, m)

    if model != "frobenius-double":
        raise ValueError(f"unknown model {model!r}")
    if bar_lengths is not None:
        C = _planted_complex(rng, orbit_count, bar_lengths, N, lam0, n, denominator)
    else:
        C = random_graded_complex(rng, orbit_count, N=N, lambda0=lam0, n=n,
                                  denominator=denominator, max_entries=max_entries).complex
    m = seidel_potentials(C, rng, slack)
    E = frobenius_double(C, m)
    P = transported_pop(C, m, rng)
    return Triple(C, E, P, model, m)
