"""Random valid complexes with a barcode known by construction.

A graded complex over Lambda is determined by its F_2 maps D_r between
capped generators of index r and r+1, for r = 0..2N-1 (index 2N is q times
index 0).  We pick, in every index, a unitriangular basis b_x = x + (terms of
strictly higher action), pair some basis vectors eta -> gamma across
adjacent indices, and set D = B P B^{-1}.  The planted pairs are then a
singular decomposition, so the barcode is known without running any
elimination.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .complex import FilteredComplex, GlobalParams, Orbit
from .scalar import monomial

__all__ = ["Planted", "random_graded_complex", "performance_complex", "random_actions"]


@dataclass
class Planted:
    complex: FilteredComplex
    bars: list[Fraction]
    infinite: int


def random_actions(rng: random.Random, count: int, lam0: Fraction, denominator: int) -> list[Fraction]:
    span = int(lam0 * denominator)
    return [Fraction(rng.randrange(span), denominator) for _ in range(count)]


class _Index:
    def __init__(self, gens):
        # gens: (capped action, label, recap), sorted ascending
        self.gens = sorted(gens)
        self.pos = {g[1]: i for i, g in enumerate(self.gens)}


def _unitriangular(rng, size, density):
    """Rows b_i = e_i + random e_j for j > i (bitsets)."""
    rows = []
    for i in range(size):
        v = 1 << i
        for j in range(i + 1, size):
            if rng.random() < density:
                v |= 1 << j
        rows.append(v)
    return rows


def _invert_unitriangular(rows):
    """Inverse of an upper unitriangular F_2 matrix given by row bitsets."""
    n = len(rows)
    inv = [0] * n
    for i in range(n - 1, -1, -1):
        v = 1 << i
        rest = rows[i] & ~(1 << i)
        while rest:
            low = rest & -rest
            j = low.bit_length() - 1
            v ^= inv[j]
            rest ^= low
        inv[i] = v
    return inv


def random_graded_complex(
    rng: random.Random,
    orbits: int,
    *,
    N: int | None = None,
    lambda0: Fraction | None = None,
    n: int = 0,
    denominator: int | None = None,
    pair_fraction: float | None = None,
    density: float | None = None,
    max_entries: int | None = None,
    attempts: int = 50,
) -> Planted:
    """A random valid graded complex with its planted barcode."""
    for _ in range(attempts):
        planted = _attempt(rng, orbits, N, lambda0, n, denominator, pair_fraction, density)
        if max_entries is None or planted.complex.entry_count() <= max_entries:
            return planted
    raise RuntimeError(f"no complex with <= {max_entries} entries after {attempts} attempts")


def _attempt(rng, count, N, lam0, n, denominator, pair_fraction, density) -> Planted:
    N = N if N is not None else rng.choice([1, 1, 2, 3])
    lam0 = Fraction(lam0) if lam0 is not None else Fraction(rng.randint(2, 12))
    denominator = denominator if denominator is not None else rng.choice([1, 2, 10, 1000])
    pair_fraction = pair_fraction if pair_fraction is not None else rng.random()
    density = density if density is not None else rng.choice([0.0, 0.1, 0.3])
    two_n = 2 * N

    actions = random_actions(rng, count, lam0, denominator)
    orbit_list = []
    for i in range(count):
        mu = rng.randrange(-two_n, 2 * two_n)
        orbit_list.append(Orbit(f"x{i}", actions[i], mu))

    by_res: dict[int, list[Orbit]] = {}
    for o in orbit_list:
        by_res.setdefault(o.index % two_n, []).append(o)

    def index_of(j):
        res = j % two_n
        gens = []
        for o in by_res.get(res, []):
            k = (j - o.index) // two_n
            gens.append((o.action + k * lam0, o.label, k))
        return _Index(gens)

    degrees = {r: index_of(r) for r in range(two_n)}
    bases = {r: _unitriangular(rng, len(degrees[r].gens), density) for r in range(two_n)}

    used: dict[int, set[int]] = {r: set() for r in range(two_n)}
    pairs = []   # (r, i_eta, i_gamma)
    bars = []
    for r in rng.sample(range(two_n), two_n):
        src, r1 = degrees[r], (r + 1) % two_n
        tgt = degrees[r1]
        shift = lam0 if r + 1 == two_n else 0
        free_src = [i for i in range(len(src.gens)) if i not in used[r]]
        rng.shuffle(free_src)
        for i in free_src:
            if rng.random() > pair_fraction:
                continue
            a_src = src.gens[i][0]
            options = [j for j in range(len(tgt.gens))
                       if j not in used[r1] and tgt.gens[j][0] + shift > a_src
                       and not (r1 == r and j == i)]
            if not options:
                continue
            j = rng.choice(options)
            used[r].add(i)
            used[r1].add(j)
            pairs.append((r, i, j))
            bars.append(tgt.gens[j][0] + shift - a_src)

    inverses = {r: _invert_unitriangular(bases[r]) for r in range(two_n)}
    diff = {}
    for r, i, j in pairs:
        r1 = (r + 1) % two_n
        src, tgt = degrees[r], degrees[r1]
        wrap = 1 if r + 1 == two_n else 0
        image = bases[r1][j]
        # generators x whose expansion x = sum c b uses b_i receive d(b_i) = b_j
        for xi in range(len(src.gens)):
            if not inverses[r][xi] >> i & 1:
                continue
            _, x_label, x_recap = src.gens[xi]
            bits = image
            while bits:
                low = bits & -bits
                yj = low.bit_length() - 1
                _, y_label, y_recap = tgt.gens[yj]
                key = (x_label, y_label)
                e = monomial(y_recap + wrap - x_recap)
                diff[key] = diff[key] + e if key in diff else e
                bits ^= low
    params = GlobalParams(N=N, lambda0=lam0, n=n)
    C = FilteredComplex(params, orbit_list, diff, graded=True)
    return Planted(C, sorted(bars), count - 2 * len(pairs))


def performance_complex(rng: random.Random, orbits: int = 5000, entries: int = 20000) -> FilteredComplex:
    """Two adjacent indices, random entries from index 0 up to index 1."""
    half = orbits // 2
    lam0 = Fraction(10**6)
    low = [Orbit(f"a{i}", Fraction(rng.randrange(10**6), 10**3), 0) for i in range(half)]
    high = [Orbit(f"b{i}", Fraction(rng.randrange(10**6), 10**3), 1) for i in range(orbits - half)]
    diff = {}
    while len(diff) < entries:
        x = rng.choice(low)
        y = rng.choice(high)
        if y.action > x.action:
            diff[(x.label, y.label)] = monomial(0)
    return FilteredComplex(GlobalParams(N=10**6, lambda0=lam0), low + high, diff)
