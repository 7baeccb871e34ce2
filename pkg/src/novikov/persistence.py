"""Orthogonality, singular decompositions and barcodes.

Two elimination routes produce a singular decomposition:

* ``graded``: a graded complex over Lambda is, degree by degree, a filtered
  map of F_2 vector spaces (capped generators of index j -> index j+1).
  Each map is reduced with bitset column operations, processing sources by
  decreasing action, with clearing of columns that are already known to be
  cycles.  Fast; used for the large benchmarks.
* ``greedy``: works for any complex over F_2(q), graded or not.  Repeatedly
  pivots on the entry with the smallest action gap, eliminating that
  column from every other row, and splits the pivot pair off.  All
  arithmetic is exact in F_2(q); entries may become genuine rational
  functions along the way.

Both routes return pairs sorted by (bar length, source label).
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .complex import (
    RECAP_DIRECTION,
    Chain,
    FilteredComplex,
    action_of_chain,
)
from .scalar import ONE, ZERO, NovikovScalar, monomial

__all__ = [
    "Pair",
    "SingularDecomposition",
    "Barcode",
    "ProbeReport",
    "leading_terms",
    "is_orthogonal",
    "singular_decomposition",
    "check_decomposition",
    "barcode",
    "beta",
    "beta_min",
    "beta_min_entry_oracle",
    "beta_min_chain_probe",
]

EXACT_ORTHOGONALITY_LIMIT = 16


@dataclass
class Pair:
    eta: Chain
    gamma: Chain
    length: Fraction
    source: str
    target: str


@dataclass
class SingularDecomposition:
    cycles: list[Chain]
    pairs: list[Pair]
    method: str = ""

    def vectors(self) -> list[Chain]:
        out = list(self.cycles)
        for p in self.pairs:
            out.append(p.eta)
            out.append(p.gamma)
        return out

    def __len__(self):
        return len(self.cycles) + 2 * len(self.pairs)


@dataclass(frozen=True)
class Barcode:
    finite: tuple[Fraction, ...]
    infinite: int

    @property
    def beta(self):
        return self.finite[-1] if self.finite else 0

    @property
    def beta_min(self):
        return self.finite[0] if self.finite else math.inf

    def doubled(self) -> Barcode:
        return Barcode(tuple(2 * b for b in self.finite), self.infinite)


@dataclass
class ProbeReport:
    trials: int
    checked: int = 0
    beta_min: object = math.inf
    violations: list[tuple[Chain, Fraction]] = field(default_factory=list)
    witness: Chain | None = None
    witness_gap: object = None

    @property
    def ok(self) -> bool:
        if self.violations:
            return False
        return self.witness is None or self.witness_gap == self.beta_min


# --- orthogonality -------------------------------------------------------------

def leading_terms(xi: Mapping, C: FilteredComplex) -> tuple[object, list[tuple[str, int]]]:
    """Filtration level of xi and its capped generators attaining it."""
    level = action_of_chain(xi, C)
    terms = []
    if level == math.inf:
        return level, terms
    for label, lam in xi.items():
        if C.level(label, lam) == level:
            terms.append((label, lam.shift))
    terms.sort()
    return level, terms


def _residue_groups(levels, lam0):
    step = RECAP_DIRECTION * lam0
    groups = defaultdict(list)
    for i, lv in enumerate(levels):
        groups[lv % lam0].append(i)
    out = []
    for members in groups.values():
        base = levels[members[0]]
        out.append([(i, int((levels[i] - base) / step)) for i in members])
    return out


def _orthogonal_by_symbols(vectors, C) -> bool:
    data = [leading_terms(v, C) for v in vectors]
    lam0 = C.params.lambda0
    for group in _residue_groups([lv for lv, _ in data], lam0):
        index: dict[tuple[str, int], int] = {}
        pivots: dict[int, int] = {}
        for i, t in group:
            bits = 0
            for label, k in data[i][1]:
                key = (label, k - t)
                bits |= 1 << index.setdefault(key, len(index))
            while bits:
                low = (bits & -bits).bit_length() - 1
                if low in pivots:
                    bits ^= pivots[low]
                else:
                    pivots[low] = bits
                    break
            if not bits:
                return False
    return True


def _orthogonal_by_search(vectors, C) -> bool:
    """Exhaustive search for a cancelling monomial combination.

    A failure of A(sum lambda_i xi_i) = min A(lambda_i xi_i) is witnessed by
    the leading monomials of the lambda_i that reach the minimum, so it is
    enough to try coefficients q^{k_i} on subsets whose members can be
    brought to a common action level.
    """
    levels = [action_of_chain(v, C) for v in vectors]
    lam0 = C.params.lambda0
    for group in _residue_groups(levels, lam0):
        base = levels[group[0][0]]
        shifted = [Chain({lbl: lam.shifted(-t) for lbl, lam in vectors[i].items()})
                   for i, t in group]
        m = len(shifted)
        for mask in range(1, 1 << m):
            total: dict[str, NovikovScalar] = {}
            for j in range(m):
                if mask >> j & 1:
                    for lbl, lam in shifted[j].items():
                        total[lbl] = total.get(lbl, ZERO) + lam
            if action_of_chain(total, C) > base:
                return False
    return True


def is_orthogonal(vectors: Sequence[Mapping], C: FilteredComplex, method: str = "auto") -> bool:
    """Whether A(sum lambda_i xi_i) = min A(lambda_i xi_i) for all lambda_i.

    ``method`` is ``"search"`` (exhaustive monomial search, exponential in
    the number of vectors), ``"symbols"`` (F_2 rank of the leading parts,
    aligned to a common action level) or ``"auto"``.
    """
    vectors = list(vectors)
    for v in vectors:
        if not any(v.values()):
            raise ValueError("is_orthogonal needs nonzero vectors")
    if method == "auto":
        method = "search" if len(vectors) <= 12 else "symbols"
    if method == "search":
        if len(vectors) > EXACT_ORTHOGONALITY_LIMIT:
            raise ValueError(f"exhaustive search over {len(vectors)} vectors is too large")
        return _orthogonal_by_search(vectors, C)
    if method == "symbols":
        return _orthogonal_by_symbols(vectors, C)
    raise ValueError(f"unknown method {method!r}")


# --- graded route ----------------------------------------------------------------

def _rank_map(C: FilteredComplex, tiebreak) -> dict[str, int]:
    if tiebreak is None:
        return dict(C.position)
    if isinstance(tiebreak, Mapping):
        return {lbl: tiebreak[lbl] for lbl in C.labels}
    perm = list(C.labels)
    random.Random(tiebreak).shuffle(perm)
    return {lbl: i for i, lbl in enumerate(perm)}


class _Degree:
    """Capped generators of one index, ordered by (action, tiebreak)."""

    def __init__(self, C, labels, j, rank):
        two_n = 2 * C.params.N
        gens = []
        for lbl in labels:
            k, rem = divmod(j - C.orbit(lbl).index, two_n)
            assert rem == 0
            gens.append((C.capped_action(lbl, k), rank[lbl], lbl, k))
        gens.sort()
        self.actions = [g[0] for g in gens]
        self.labels = [g[2] for g in gens]
        self.recaps = [g[3] for g in gens]
        self.pos = {g[2]: i for i, g in enumerate(gens)}

    def chain(self, bits: int) -> Chain:
        out = {}
        while bits:
            low = bits & -bits
            i = low.bit_length() - 1
            out[self.labels[i]] = monomial(self.recaps[i])
            bits ^= low
        return Chain(out)


def _graded_reduction(C: FilteredComplex, tiebreak=None, track: bool = True):
    two_n = 2 * C.params.N
    rank = _rank_map(C, tiebreak)
    by_res: dict[int, list[str]] = defaultdict(list)
    for o in C.orbits:
        by_res[o.index % two_n].append(o.label)

    degrees = {r: _Degree(C, lbls, r, rank) for r, lbls in by_res.items()}
    raw_pairs = []            # (length, source label, eta, gamma)
    lows_into: dict[int, set[str]] = {}   # residue -> orbits that are leading terms of gammas
    kernel: dict[int, dict[str, int]] = {}  # residue -> orbit -> V bits (cycles)

    for r in sorted(by_res):
        src = degrees[r]
        r1 = (r + 1) % two_n
        if r1 not in by_res:
            kernel[r] = {lbl: 1 << i for i, lbl in enumerate(src.labels)} if track else {
                lbl: 0 for lbl in src.labels}
            continue
        tgt = _Degree(C, by_res[r1], r + 1, rank)
        cleared = lows_into.get(r, set())
        pivots: dict[int, tuple[int, int]] = {}
        ker: dict[str, int] = {}
        lows: set[str] = set()
        for i in range(len(src.labels) - 1, -1, -1):
            lbl = src.labels[i]
            if lbl in cleared:
                continue
            v = 0
            k_src = src.recaps[i]
            for y, entry in C.rows.get(lbl, {}).items():
                p = tgt.pos[y]
                if k_src + entry.shift != tgt.recaps[p]:
                    raise ValueError(f"entry {lbl}->{y} is inconsistent with the grading")
                v ^= 1 << p
            V = 1 << i if track else 0
            while v:
                low = (v & -v).bit_length() - 1
                piv = pivots.get(low)
                if piv is None:
                    break
                v ^= piv[0]
                if track:
                    V ^= piv[1]
            if v:
                pivots[low] = (v, V)
                y = tgt.labels[low]
                lows.add(y)
                length = tgt.actions[low] - src.actions[i]
                eta = src.chain(V) if track else None
                gamma = tgt.chain(v) if track else None
                raw_pairs.append((length, lbl, y, eta, gamma))
            else:
                ker[lbl] = V
        kernel[r] = ker
        lows_into[r1] = lows

    cycles = []
    for r in sorted(kernel):
        prev = lows_into.get(r, set())
        deg = degrees[r]
        for lbl in deg.labels:
            if lbl in kernel[r] and lbl not in prev:
                cycles.append(deg.chain(kernel[r][lbl]) if track else None)
    return raw_pairs, cycles


# --- greedy route -------------------------------------------------------------------

def _greedy_reduction(C: FilteredComplex, tiebreak=None):
    rank = _rank_map(C, tiebreak)
    lam0 = C.params.lambda0
    action = {o.label: o.action for o in C.orbits}
    rows: dict[str, dict[str, NovikovScalar]] = {x: dict(C.rows.get(x, {})) for x in C.labels}
    cols: dict[str, set[str]] = defaultdict(set)
    for x, row in rows.items():
        for y in row:
            cols[y].add(x)
    chains: dict[str, dict[str, NovikovScalar]] = {x: {x: ONE} for x in C.labels}
    alive = set(C.labels)
    raw_pairs = []

    def gap(x, y, e):
        return action[y] + RECAP_DIRECTION * e.shift * lam0 - action[x]

    while True:
        best = None
        for x in alive:
            for y, e in rows[x].items():
                if x == y:
                    raise ValueError(f"diagonal entry on {x!r}; cannot eliminate")
                key = (gap(x, y, e), rank[x], rank[y])
                if best is None or key < best[0]:
                    best = (key, x, y, e)
        if best is None:
            break
        (g, _, _), x, y, c = best
        row_x = rows[x]
        chain_x = chains[x]
        for x2 in list(cols[y]):
            if x2 == x:
                continue
            mu = rows[x2][y] / c
            # x2 -> x2 + mu x changes the x-coordinate of everything hitting x2
            for w in list(cols[x2]):
                row_w = rows[w]
                s = row_w.get(x, ZERO) + row_w[x2] * mu
                if s:
                    if x not in row_w:
                        cols[x].add(w)
                    row_w[x] = s
                else:
                    row_w.pop(x, None)
                    cols[x].discard(w)
            row2 = rows[x2]
            for z, e in row_x.items():
                s = row2.get(z, ZERO) + mu * e
                if s:
                    if z not in row2:
                        cols[z].add(x2)
                    row2[z] = s
                else:
                    row2.pop(z, None)
                    cols[z].discard(x2)
            ch2 = chains[x2]
            for z, e in chain_x.items():
                s = ch2.get(z, ZERO) + mu * e
                if s:
                    ch2[z] = s
                else:
                    ch2.pop(z, None)
        if cols[x]:
            raise ValueError(f"orbit {x!r} is hit by the differential after pivoting; is d^2 = 0?")
        for z in rows[x]:
            cols[z].discard(x)
        for z in rows[y]:
            cols[z].discard(y)
        rows[x] = {}
        rows[y] = {}
        alive.discard(x)
        alive.discard(y)
        eta = Chain(chain_x)
        gamma = C.apply(eta)
        raw_pairs.append((g, x, y, eta, gamma))
    cycles = [Chain(chains[z]) for z in C.labels if z in alive]
    return raw_pairs, cycles


# --- public API ------------------------------------------------------------------------

def _choose(C: FilteredComplex, method: str) -> str:
    if method == "auto":
        return "graded" if C.graded else "greedy"
    if method == "graded" and not C.graded:
        raise ValueError("graded elimination needs a graded complex")
    if method not in ("graded", "greedy"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _sorted_pairs(raw_pairs, rank):
    raw_pairs.sort(key=lambda p: (p[0], p[1], p[2]))
    return [Pair(eta=eta, gamma=gamma, length=length, source=s, target=t)
            for length, s, t, eta, gamma in raw_pairs]


def singular_decomposition(C: FilteredComplex, method: str = "auto",
                           tiebreak=None) -> SingularDecomposition:
    """An orthogonal basis {alpha_i, eta_j, gamma_j} with d alpha = 0, d eta = gamma.

    ``tiebreak`` orders generators of equal action: None (orbit order), a
    mapping label -> rank, or an int seed for a random permutation.
    """
    method = _choose(C, method)
    if method == "graded":
        raw, cycles = _graded_reduction(C, tiebreak, track=True)
    else:
        raw, cycles = _greedy_reduction(C, tiebreak)
    return SingularDecomposition(cycles=cycles, pairs=_sorted_pairs(raw, None), method=method)


def check_decomposition(B: SingularDecomposition, C: FilteredComplex,
                        orthogonality: str = "auto") -> list[str]:
    """Problems with B as a singular decomposition of C (empty list = fine)."""
    problems = []
    for i, a in enumerate(B.cycles):
        if C.apply(a):
            problems.append(f"cycle {i} is not closed")
    for j, p in enumerate(B.pairs):
        if C.apply(p.eta) != p.gamma:
            problems.append(f"d(eta_{j}) != gamma_{j}")
        if not p.gamma:
            problems.append(f"gamma_{j} is zero")
        elif action_of_chain(p.gamma, C) - action_of_chain(p.eta, C) != p.length:
            problems.append(f"bar {j} length does not match its actions")
    if len(B) != len(C.orbits):
        problems.append(f"{len(B)} vectors for a {len(C.orbits)}-dimensional complex")
    lengths = [p.length for p in B.pairs]
    if lengths != sorted(lengths):
        problems.append("pairs are not sorted by bar length")
    vecs = B.vectors()
    if any(not v for v in vecs):
        problems.append("zero vector in decomposition")
    elif vecs and not is_orthogonal(vecs, C, method=orthogonality):
        problems.append("decomposition is not orthogonal")
    return problems


def barcode(C: FilteredComplex, method: str = "auto", tiebreak=None) -> Barcode:
    method = _choose(C, method)
    if method == "graded":
        raw, cycles = _graded_reduction(C, tiebreak, track=False)
    else:
        raw, cycles = _greedy_reduction(C, tiebreak)
    return Barcode(tuple(sorted(p[0] for p in raw)), len(cycles))


def beta(C: FilteredComplex):
    """Longest finite bar (boundary depth); 0 when there are no finite bars."""
    return barcode(C).beta


def beta_min(C: FilteredComplex):
    """Shortest finite bar; +inf when the differential vanishes."""
    return barcode(C).beta_min


def beta_min_entry_oracle(C: FilteredComplex):
    """Smallest A(y) - A(x) over capped pairs with <d x, y> = 1.

    Reads the matrix directly: for each entry, the lowest power of q that
    occurs gives the shortest capped arrow between those two orbits.
    """
    lam0 = C.params.lambda0
    best = math.inf
    for src, tgt, entry in C.entries():
        if entry.is_laurent():
            k = min(entry.exponents())
        else:
            bits = entry.series(1)
            assert bits[0] == 1
            k = entry.shift
        g = C.orbit(tgt).action + RECAP_DIRECTION * k * lam0 - C.orbit(src).action
        if g < best:
            best = g
    return best


def _random_chain(rng: random.Random, labels, max_terms=4, spread=2) -> Chain:
    picked = rng.sample(labels, rng.randint(1, min(max_terms, len(labels))))
    coeffs = {}
    for lbl in picked:
        low = rng.randint(-spread, spread)
        bits = rng.getrandbits(3) | 1
        coeffs[lbl] = NovikovScalar.laurent(bits, low)
    return Chain(coeffs)


def beta_min_chain_probe(C: FilteredComplex, trials: int, seed=0,
                         decomposition: SingularDecomposition | None = None) -> ProbeReport:
    """Check A(d xi) - A(xi) >= beta_min on random chains and exhibit a witness."""
    if trials <= 0:
        return ProbeReport(trials=0)
    B = decomposition if decomposition is not None else singular_decomposition(C)
    bmin = B.pairs[0].length if B.pairs else math.inf
    report = ProbeReport(trials=trials, beta_min=bmin)
    rng = random.Random(seed)
    labels = C.labels
    for _ in range(trials):
        xi = _random_chain(rng, labels)
        dxi = C.apply(xi)
        if not dxi:
            continue
        report.checked += 1
        g = action_of_chain(dxi, C) - action_of_chain(xi, C)
        if g < bmin:
            report.violations.append((xi, g))
    if B.pairs:
        w = B.pairs[0].eta
        report.witness = w
        report.witness_gap = action_of_chain(C.apply(w), C) - action_of_chain(w, C)
    return report
