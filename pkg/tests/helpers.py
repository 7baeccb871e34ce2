"""Independent oracles and instance builders shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from novikov.complex import Chain, FilteredComplex, GlobalParams, action_of_chain, validate
from novikov.equivariant import EqChain, EquivariantComplex, evaluate_h1, validate_equivariant
from novikov.harness import check_claim, hat_basis, tilde_basis
from novikov.persistence import singular_decomposition
from novikov.pop import (
    PairOfPantsMap,
    Unsatisfiable,
    check_chain_map,
    check_filtration,
    check_seidel,
    generate_synthetic,
)
from novikov.scalar import ZERO, NovikovScalar, monomial
from novikov.synthetic import random_graded_complex


def four_orbit() -> FilteredComplex:
    params = GlobalParams(N=5, lambda0=10)
    orbits = [("a", "0", 0), ("b", "0.2", 0), ("c", "1.0", 1), ("d", "1.3", 1)]
    return FilteredComplex(params, orbits, [("a", "c", "1"), ("a", "d", "1"), ("b", "d", "1")])


def random_complex(seed: int, max_orbits: int = 40, max_entries: int = 120, **kw):
    rng = random.Random(seed)
    return random_graded_complex(rng, rng.randint(1, max_orbits), max_entries=max_entries, **kw)


def triple(seed: int, orbits: int | None = None, model: str = "frobenius-double", **kw):
    """generate_synthetic, retrying past unsatisfiable seeds deterministically."""
    for attempt in range(50):
        s = seed * 1000 + attempt
        count = orbits if orbits is not None else random.Random(s).randint(1, 10)
        try:
            return generate_synthetic(count, seed=s, model=model, **kw)
        except Unsatisfiable:
            continue
    raise RuntimeError("no satisfiable instance")


# --- F_2 pairing lemma oracle ------------------------------------------------------

def _rank(rows: list[int]) -> int:
    pivots: dict[int, int] = {}
    r = 0
    for v in rows:
        while v:
            low = v.bit_length() - 1
            if low in pivots:
                v ^= pivots[low]
            else:
                pivots[low] = v
                r += 1
                break
    return r


def pairing_lemma_bars(C: FilteredComplex) -> tuple[list[Fraction], int]:
    """Barcode of a graded complex from ranks of corner submatrices.

    For each index r, order sources and targets by decreasing capped action
    (ties by label); (i, j) is a pair iff the 2x2 alternating sum of ranks of
    the lower-left corner submatrices equals 1.  No column reduction involved.
    """
    two_n = 2 * C.params.N
    lam0 = C.params.lambda0
    gens: dict[int, list] = {}
    for o in C.orbits:
        gens.setdefault(o.index % two_n, []).append(o)

    def degree(j):
        out = []
        for o in gens.get(j % two_n, []):
            k = (j - o.index) // two_n
            out.append((o.action + k * lam0, o.label, k))
        out.sort(key=lambda g: (g[0], g[1]), reverse=True)
        return out

    bars = []
    paired = set()
    for r in range(two_n):
        src, tgt = degree(r), degree(r + 1)
        tpos = {(g[1], g[2]): i for i, g in enumerate(tgt)}
        cols = []
        for a, x, k in src:
            v = 0
            for y, e in C.rows.get(x, {}).items():
                v ^= 1 << tpos[(y, k + e.shift)]
            cols.append(v)

        def rk(i, j):
            # rows >= i (lower actions), columns < j
            mask = ~((1 << i) - 1)
            return _rank([c & mask for c in cols[:j]])

        for j in range(len(src)):
            for i in range(len(tgt)):
                s = rk(i, j + 1) - rk(i + 1, j + 1) - rk(i, j) + rk(i + 1, j)
                if s == 1:
                    bars.append(tgt[i][0] - src[j][0])
                    paired.add(src[j][1])
                    paired.add(tgt[i][1])
    return sorted(bars), len(C.orbits) - len(paired)


def lambda_rank(vectors) -> int:
    """Rank over F_2(q) by plain Gaussian elimination on coefficient dicts."""
    rows = [dict(v) for v in vectors]
    rank = 0
    while rows:
        row = rows.pop()
        if not row:
            continue
        rank += 1
        piv = next(iter(sorted(row)))
        c = row[piv]
        for other in rows:
            f = other.get(piv)
            if f:
                mu = f / c
                for k, v in row.items():
                    s = other.get(k, ZERO) + mu * v
                    if s:
                        other[k] = s
                    else:
                        other.pop(k, None)
    return rank


# --- monomial-window brute force -------------------------------------------------------

def window_coefficients(lo: int, hi: int) -> list[NovikovScalar]:
    out = []
    width = hi - lo + 1
    for bits in range(1, 1 << width):
        out.append(NovikovScalar.laurent(bits, lo))
    return out


def brute_force_orthogonal(vectors, C, lo: int = -1, hi: int = 1) -> bool:
    """Try every coefficient tuple with exponents in [lo, hi] (zero allowed)."""
    coeffs = [None] + window_coefficients(lo, hi)
    for combo in itertools.product(coeffs, repeat=len(vectors)):
        if all(c is None for c in combo):
            continue
        total = Chain()
        lowest = None
        for c, v in zip(combo, vectors):
            if c is None:
                continue
            term = v.scale(c)
            total = total + term
            a = action_of_chain(term, C)
            lowest = a if lowest is None else min(lowest, a)
        if action_of_chain(total, C) != lowest:
            return False
    return True


def brute_force_beta_min(C: FilteredComplex, lo: int = 0, hi: int = 0):
    """min over nonzero F_2 combinations xi of capped generators of A(d xi) - A(xi)."""
    gens = [(x, k) for x in C.labels for k in range(lo, hi + 1)]
    best = None
    for mask in range(1, 1 << len(gens)):
        xi = Chain()
        for i, (x, k) in enumerate(gens):
            if mask >> i & 1:
                xi = xi + Chain({x: monomial(k)})
        dxi = C.apply(xi)
        if not dxi or not xi:
            continue
        g = action_of_chain(dxi, C) - action_of_chain(xi, C)
        best = g if best is None else min(best, g)
    return best


# --- mutations ------------------------------------------------------------------------

def _bump(entry: NovikovScalar | None, rng: random.Random) -> NovikovScalar:
    """A wrong value for one coefficient: delete it, move its exponent, or insert q^j."""
    if entry is None or not entry:
        return monomial(rng.randint(-1, 2))
    choice = rng.choice([None, -1, 1, 2])
    if choice is None:
        return ZERO
    return monomial(entry.shift + choice)


def _stored(T):
    """Every stored coefficient of the triple, as (object, location, value)."""
    out = [("C", (s, t), e) for s, t, e in T.C.entries()]
    out += [("E", (0, s, t), e) for s, t, e in T.E.base.entries()]
    out += [("E", (k, s, t), e) for k, s, t, e in T.E.correction_entries()]
    out += [("P", (pair, key), v) for pair, img in sorted(T.P.values.items())
            for key, v in sorted(img.items())]
    return out


def _rebuild(T, obj, loc, value):
    C, E, P = T.C, T.E, T.P
    if obj == "C":
        diff = C._entry_dict()
        diff[loc] = value
        return C.with_differential(diff), E, P
    if obj == "E":
        k, s, t = loc
        base = E.base._entry_dict()
        corr = [(kk, ss, tt, ee) for kk, ss, tt, ee in E.correction_entries()
                if (kk, ss, tt) != (k, s, t)]
        if k == 0:
            base[(s, t)] = value
        elif value:
            corr.append((k, s, t, value))
        return C, EquivariantComplex(E.base.with_differential(base), corr), P
    pair, key = loc
    values = dict(P.values)
    img = dict(values.get(pair) or {})
    img[key] = value
    values[pair] = EqChain(img)
    return C, E, PairOfPantsMap(dict(P.squaring), values)


def corrupt(T, rng: random.Random):
    """Change one stored coefficient: delete it or move its exponent.

    Returns (C, E, P, where).
    """
    obj, loc, value = rng.choice(_stored(T))
    return (*_rebuild(T, obj, loc, _bump(value, rng)), (obj, loc))


def insert_spurious(T, rng: random.Random):
    """Write a monomial into a location that currently holds zero."""
    while True:
        obj = rng.choice(["C", "E", "P"])
        if obj == "C":
            loc = (rng.choice(T.C.labels), rng.choice(T.C.labels))
            old = T.C.entry(*loc)
        elif obj == "E":
            loc = (rng.randint(0, 2), rng.choice(T.E.base.labels), rng.choice(T.E.base.labels))
            old = T.E.piece(loc[0]).get(loc[1], {}).get(loc[2])
        else:
            pair = (rng.choice(T.C.labels), rng.choice(T.C.labels))
            key = (rng.choice(T.E.base.labels), rng.randint(0, 3))
            loc = (pair, key)
            old = T.P.image(*pair).get(key)
        if not old:
            return (*_rebuild(T, obj, loc, monomial(rng.randint(-1, 2))), (obj, loc))


def detectors(C, E, P) -> list[str]:
    """Names of the checks that flag (C, E, P)."""
    flagged = []
    if not validate(C).ok:
        flagged.append("validate")
    if not validate_equivariant(E).ok:
        flagged.append("validate_equivariant")
    if not check_chain_map(P, C, E).ok:
        flagged.append("check_chain_map")
    if not check_filtration(P, C, E).ok:
        flagged.append("check_filtration")
    if not check_seidel(P, C, E).ok:
        flagged.append("check_seidel")
    if "validate" not in flagged and "validate_equivariant" not in flagged:
        B = singular_decomposition(C)
        hat = hat_basis(B, P, E)
        claim = check_claim(tilde_basis(hat), evaluate_h1(E))
        if hat.failures or not claim.ok:
            flagged.append("check_claim")
    return flagged
