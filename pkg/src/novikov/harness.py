"""Replay the squaring argument on concrete triples (C, E, P).

Pipeline for one triple: check genericity of the actions, take a singular
decomposition B of C, push it through P to an equivariant family (the hat
basis), evaluate at h = 1 (the tilde basis), and confirm the tilde family is a
singular decomposition of C~ whose bars are exactly twice those of B.  The
graph side compares the shortest arrows of C and of E under squaring.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .complex import Chain, FilteredComplex, action_of_chain, to_action
from .equivariant import EqChain, EquivariantComplex, evaluate_h1
from .graph import Arrow, build_equivariant_graph, build_graph, shortest_arrows
from .persistence import SingularDecomposition, barcode, is_orthogonal, singular_decomposition
from .pop import PairOfPantsMap, frobenius_double, seidel_potentials

__all__ = [
    "ACTION_TOLERANCE",
    "check_background_assumption",
    "HatBasis",
    "TildeBasis",
    "ClaimReport",
    "MainTheoremReport",
    "TowerReport",
    "hat_basis",
    "tilde_basis",
    "check_claim",
    "check_main_theorem",
    "perturb_actions",
    "doubling_tower",
]

ACTION_TOLERANCE = Fraction(1, 10**9)


def _distinct_mod(values, lam0, tol) -> bool:
    res = sorted(v % lam0 for v in values)
    for a, b in zip(res, res[1:]):
        if b - a <= tol:
            return False
    if len(res) > 1 and res[0] + lam0 - res[-1] <= tol:
        return False
    return True


def _generic(C: FilteredComplex, tol) -> bool:
    actions = [o.action for o in C.orbits]
    lam0 = C.params.lambda0
    diffs = [b - a for i, a in enumerate(actions) for j, b in enumerate(actions) if i != j]
    return _distinct_mod(actions, lam0, tol) and _distinct_mod(diffs, lam0, tol)


def check_background_assumption(C: FilteredComplex, E: EquivariantComplex | None = None) -> bool:
    """Actions, and differences of actions, pairwise distinct mod lambda0 (for C and E).

    Exact comparison for rational inputs; complexes built from floats are
    compared with tolerance ``ACTION_TOLERANCE``.
    """
    exact = C.exact and (E is None or E.base.exact)
    tol = 0 if exact else ACTION_TOLERANCE
    if not _generic(C, tol):
        return False
    return E is None or _generic(E.base, tol)


@dataclass
class HatBasis:
    alpha: list[EqChain]
    eta: list[EqChain]
    gamma: list[EqChain]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class TildeBasis:
    alpha: list[Chain]
    eta: list[Chain]
    gamma: list[Chain]

    def vectors(self) -> list[Chain]:
        out = list(self.alpha)
        for e, g in zip(self.eta, self.gamma):
            out += [e, g]
        return out


@dataclass
class ClaimReport:
    ok: bool
    problems: list[str]
    bars: list[Fraction]


def hat_basis(B: SingularDecomposition, P: PairOfPantsMap, E: EquivariantComplex) -> HatBasis:
    """alpha^ = P(a(x)a), eta^ = h P(eta(x)eta) + P(eta(x)gamma), gamma^ = P(gamma(x)gamma)."""
    alpha = [P.bilinear(a, a) for a in B.cycles]
    eta, gamma = [], []
    for p in B.pairs:
        eta.append(P.bilinear(p.eta, p.eta).h_shift(1) + P.bilinear(p.eta, p.gamma))
        gamma.append(P.bilinear(p.gamma, p.gamma))
    hat = HatBasis(alpha, eta, gamma)
    for i, a in enumerate(alpha):
        if E.d_eq(a):
            hat.failures.append(f"d_eq(alpha^_{i}) != 0")
    for j, (e, g) in enumerate(zip(eta, gamma)):
        if E.d_eq(e) != g:
            hat.failures.append(f"d_eq(eta^_{j}) != gamma^_{j}")
    return hat


def tilde_basis(hat: HatBasis) -> TildeBasis:
    """Evaluate the hat family at h = 1."""
    return TildeBasis([a.at_h1() for a in hat.alpha], [e.at_h1() for e in hat.eta],
                      [g.at_h1() for g in hat.gamma])


def check_claim(tilde: TildeBasis, Ct: FilteredComplex, orthogonality: str = "auto") -> ClaimReport:
    """Is the tilde family a singular decomposition of C~?"""
    problems = []
    for i, a in enumerate(tilde.alpha):
        if Ct.apply(a):
            problems.append(f"d~(alpha~_{i}) != 0")
    bars = []
    for j, (e, g) in enumerate(zip(tilde.eta, tilde.gamma)):
        if Ct.apply(e) != g:
            problems.append(f"d~(eta~_{j}) != gamma~_{j}")
        if e and g:
            bars.append(action_of_chain(g, Ct) - action_of_chain(e, Ct))
    vecs = tilde.vectors()
    if len(vecs) != len(Ct.orbits):
        problems.append(f"{len(vecs)} vectors for a {len(Ct.orbits)}-dimensional complex")
    if any(not v for v in vecs):
        problems.append("zero vector in tilde family")
    elif vecs and not is_orthogonal(vecs, Ct, method=orthogonality):
        problems.append("tilde family is not orthogonal")
    return ClaimReport(not problems, problems, sorted(bars))


def _arrow_dict(a: Arrow | None):
    if a is None:
        return None
    d = {"from": a.source, "to": a.target, "recap": a.recap, "length": float(a.length),
         "length_exact": str(a.length)}
    if a.hpow is not None:
        d["hpow"] = a.hpow
    return d


def _num(x):
    if x is None:
        return None
    if x == math.inf:
        return "inf"
    return float(x)


@dataclass
class MainTheoremReport:
    background_assumption_ok: bool
    stopped: str | None = None
    no_arrow_case: bool = False
    shortest_arrows_c: list[Arrow] = field(default_factory=list)
    shortest_arrows_eq: list[Arrow] = field(default_factory=list)
    correspondence_holds: bool = False
    hat_failures: list[str] = field(default_factory=list)
    claim_problems: list[str] = field(default_factory=list)
    bar_doubling_ok: bool = False
    beta_min_c: object = math.inf
    beta_min_eq: object = math.inf
    beta_min_tilde: object = math.inf
    beta_min_eq_base: object = math.inf
    inequality_ok: bool = False

    @property
    def shortest_arrow_c(self):
        return self.shortest_arrows_c[0] if self.shortest_arrows_c else None

    @property
    def shortest_arrow_eq(self):
        return self.shortest_arrows_eq[0] if self.shortest_arrows_eq else None

    @property
    def ok(self) -> bool:
        return (self.stopped is None and self.correspondence_holds and self.bar_doubling_ok
                and self.inequality_ok and not self.hat_failures and not self.claim_problems)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "backgroundAssumptionOk": self.background_assumption_ok,
            "stopped": self.stopped,
            "noArrowCase": self.no_arrow_case,
            "shortestArrowC": _arrow_dict(self.shortest_arrow_c),
            "shortestArrowEq": _arrow_dict(self.shortest_arrow_eq),
            "shortestArrowsC": [_arrow_dict(a) for a in self.shortest_arrows_c],
            "shortestArrowsEq": [_arrow_dict(a) for a in self.shortest_arrows_eq],
            "correspondenceHolds": self.correspondence_holds,
            "hatTildeDiagnostics": {"hat": self.hat_failures, "claim": self.claim_problems},
            "barDoublingOk": self.bar_doubling_ok,
            "betaMinC": _num(self.beta_min_c),
            "betaMinEq": _num(self.beta_min_eq),
            "betaMinTilde": _num(self.beta_min_tilde),
            "betaMinEqBase": _num(self.beta_min_eq_base),
            "inequalityOk": self.inequality_ok,
        }


def check_main_theorem(C: FilteredComplex, E: EquivariantComplex, P: PairOfPantsMap,
                       decomposition: SingularDecomposition | None = None) -> MainTheoremReport:
    ok_bg = check_background_assumption(C, E)
    report = MainTheoremReport(background_assumption_ok=ok_bg)
    if not ok_bg:
        report.stopped = ("actions or action differences coincide mod lambda0; "
                          "perturb the actions (perturb_actions) and retry")
        return report

    sa_c = shortest_arrows(build_graph(C))
    sa_eq = shortest_arrows(build_equivariant_graph(E))
    report.shortest_arrows_c, report.shortest_arrows_eq = sa_c, sa_eq
    report.no_arrow_case = not sa_c and not sa_eq
    image = {(P.squaring.get(a.source), P.squaring.get(a.target), 2 * a.recap, 2 * a.length)
             for a in sa_c}
    report.correspondence_holds = image == {(a.source, a.target, a.recap, a.length) for a in sa_eq}

    B = decomposition if decomposition is not None else singular_decomposition(C)
    hat = hat_basis(B, P, E)
    report.hat_failures = hat.failures
    Ct = evaluate_h1(E)
    claim = check_claim(tilde_basis(hat), Ct)
    report.claim_problems = claim.problems

    bars_c = barcode(C)
    bars_t = barcode(Ct)
    doubled = sorted(2 * p.length for p in B.pairs)
    report.bar_doubling_ok = claim.bars == doubled and list(bars_t.finite) == doubled

    report.beta_min_c = bars_c.beta_min
    report.beta_min_eq = sa_eq[0].length if sa_eq else math.inf
    report.beta_min_tilde = bars_t.beta_min
    report.beta_min_eq_base = barcode(E.base).beta_min
    report.inequality_ok = (2 * report.beta_min_c == report.beta_min_eq
                            and report.beta_min_eq <= report.beta_min_tilde
                            and report.beta_min_eq <= report.beta_min_eq_base)
    return report


def perturb_actions(C: FilteredComplex, delta, seed=0) -> FilteredComplex:
    """Shift every action by an independent amount in (-delta, delta)."""
    delta, _ = to_action(delta)
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if delta == 0:
        return C
    rng = random.Random(seed)
    scale = 10**6
    shifts = {o.label: o.action + delta * Fraction(rng.randrange(1 - scale, scale), scale)
              for o in C.orbits}
    return C.with_actions(shifts)


@dataclass
class TowerLevel:
    level: int
    beta_min: object
    beta_min_eq: object


@dataclass
class TowerReport:
    levels: list[TowerLevel]
    bound_ok: bool
    cap: object = None
    first_exceeding: int | None = None
    predicted_exceeding: int | None = None

    @property
    def sequence(self):
        return [lv.beta_min for lv in self.levels]

    def as_dict(self) -> dict:
        return {
            "levels": [{"level": lv.level, "betaMin": _num(lv.beta_min),
                        "betaMinExact": str(lv.beta_min), "betaMinEq": _num(lv.beta_min_eq)}
                       for lv in self.levels],
            "boundOk": self.bound_ok,
            "cap": None if self.cap is None else _num(self.cap),
            "firstLevelExceedingCap": self.first_exceeding,
            "predictedLevelExceedingCap": self.predicted_exceeding,
        }


def doubling_tower(C0: FilteredComplex, k: int, cap=None) -> TowerReport:
    """Iterate the Frobenius double k times, recording beta_min at every level.

    Level j+1 is the h^0 part of the doubled complex of level j, with Seidel
    exponents from longest paths in the orbit-level arrow graph.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    levels = []
    C = C0
    for j in range(k + 1):
        b = barcode(C).beta_min
        if j < k:
            E = frobenius_double(C, seidel_potentials(C))
            sa = shortest_arrows(build_equivariant_graph(E))
            b_eq = sa[0].length if sa else math.inf
            levels.append(TowerLevel(j, b, b_eq))
            C = E.base
        else:
            levels.append(TowerLevel(j, b, None))
    base = levels[0].beta_min
    bound_ok = all(lv.beta_min >= 2**lv.level * base for lv in levels)
    report = TowerReport(levels, bound_ok)
    if cap is not None:
        cap, _ = to_action(cap)
        report.cap = cap
        report.first_exceeding = next((lv.level for lv in levels if lv.beta_min > cap), None)
        if 0 < base < math.inf:
            j = 0
            while 2**j * base <= cap:
                j += 1
            report.predicted_exceeding = j
    return report
