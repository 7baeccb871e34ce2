import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import four_orbit, random_complex, triple
from novikov.complex import FilteredComplex, GlobalParams, validate
from novikov.equivariant import (
    EqChain,
    EquivariantComplex,
    build_group_cochain,
    evaluate_h1,
    rank_window,
    split_by_grading,
    validate_equivariant,
)
from novikov.persistence import singular_decomposition
from novikov.scalar import ONE, parse_scalar

seeds = st.integers(0, 10**6)


def test_zero_corrections_valid_and_h1_is_base():
    C = four_orbit()
    E = EquivariantComplex(C)
    assert validate_equivariant(E).ok
    Ct = evaluate_h1(E)
    assert not Ct.graded and Ct._entry_dict() == C._entry_dict()


def test_d1_index_violation():
    P = GlobalParams(N=5, lambda0=10)
    base = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1)])
    E = EquivariantComplex(base, [(1, "x", "y", "1")])
    assert "grading" in validate_equivariant(E).kinds()


def test_h1_identity_violation():
    # d0: x -> y, d1: y -> z; d0 d1 + d1 d0 sends x to z
    P = GlobalParams(N=5, lambda0=10)
    base = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1), ("z", 2, 1)], {("x", "y"): "1"})
    E = EquivariantComplex(base, [(1, "y", "z", "1")])
    assert validate_equivariant(E).kinds() == {"h-identity"}


def test_evaluate_h1_sums_pieces():
    P = GlobalParams(N=1, lambda0=10)
    base = FilteredComplex(P, [("x^2", 0, 3), ("y^2", 1, 2)], {("x^2", "y^2"): "q"})
    E = EquivariantComplex(base, [(2, "x^2", "y^2", "1")])
    Ct = evaluate_h1(E)
    assert Ct.entry("x^2", "y^2") == parse_scalar("1+q")


def test_split_examples():
    P = GlobalParams(N=1, lambda0=10)
    Ct = FilteredComplex(P, [("x^2", 0, 3), ("y^2", 1, 2)], {("x^2", "y^2"): "1+q"},
                         graded=False)
    E = split_by_grading(Ct)
    assert E.base.entry("x^2", "y^2") == parse_scalar("q")
    assert E.corrections == {2: {"x^2": {"y^2": ONE}}}
    bad = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1)], {("x", "y"): "1"}, graded=False)
    with pytest.raises(ValueError):
        split_by_grading(bad, {"x": 0, "y": 2})
    zero = FilteredComplex(P, [("x", 0, 0)], graded=False)
    assert split_by_grading(zero).corrections == {}


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_h1_round_trip_and_d_squared(seed):
    T = triple(seed)
    Ct = evaluate_h1(T.E)
    assert validate(Ct).ok
    E2 = split_by_grading(Ct)
    assert E2.corrections == T.E.corrections
    assert E2.base._entry_dict() == T.E.base._entry_dict()
    assert evaluate_h1(E2)._entry_dict() == Ct._entry_dict()


def test_group_cochain_examples():
    P = GlobalParams(N=5, lambda0=10)
    C = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1)], {("x", "y"): "1"})
    G = build_group_cochain(C)
    assert G.d({(("x", "x"), 0): ONE}) == EqChain({(("y", "x"), 0): ONE, (("x", "y"), 0): ONE})
    Z = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1)])
    assert build_group_cochain(Z).d({(("x", "y"), 0): ONE}) == \
        EqChain({(("x", "y"), 1): ONE, (("y", "x"), 1): ONE})
    assert G.action({(("x", "y"), 0): ONE}) == 1


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_group_cochain_squares_to_zero(seed):
    C = random_complex(seed, max_orbits=6).complex
    G = build_group_cochain(C)
    for pair in G.basis():
        assert not G.d(G.d({(pair, 0): ONE}))


def window_oracle(C, lo, hi):
    """Count capped cycles and half-inside bars of a decomposition within [lo, hi)."""
    lo, hi = Fraction(lo), Fraction(hi)
    lam0 = C.params.lambda0
    B = singular_decomposition(C)
    from novikov.complex import action_of_chain

    def count(level):
        # recaps k with lo <= level + k lam0 < hi
        import math
        return max(0, math.ceil((hi - level) / lam0) - math.ceil((lo - level) / lam0))

    total = sum(count(action_of_chain(a, C)) for a in B.cycles)
    for p in B.pairs:
        s = action_of_chain(p.eta, C)
        t = action_of_chain(p.gamma, C)
        total += count(s) + count(t) - 2 * _both(s, t, lo, hi, lam0)
    return total


def _both(s, t, lo, hi, lam0):
    import math
    k_lo = max(math.ceil((lo - s) / lam0), math.ceil((lo - t) / lam0))
    k_hi = min(math.ceil((hi - s) / lam0), math.ceil((hi - t) / lam0))
    return max(0, k_hi - k_lo)


def test_rank_window_examples():
    P = GlobalParams(N=5, lambda0=10)
    Z = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1), ("z", 2, 2)])
    assert rank_window(Z, 0, 3) == 3
    C = FilteredComplex(P, [("x", 0, 0), ("y", 1, 1)], {("x", "y"): "1"})
    assert rank_window(C, 0, 2) == 0
    assert rank_window(C, 0, 1) == 1     # straddles: only x inside
    assert rank_window(C, "0.5", 2) == 1  # only y inside


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 1000))
def test_rank_window_matches_decomposition(seed, wseed):
    C = random_complex(seed, max_orbits=12).complex
    rng = random.Random(wseed)
    lam0 = C.params.lambda0
    lo = Fraction(rng.randrange(-20, 20), 4)
    hi = lo + Fraction(rng.randrange(0, int(3 * lam0 * 4) + 1), 4)
    assert rank_window(C, lo, hi) == window_oracle(C, lo, hi)


def test_rank_window_on_rational_entries():
    P = GlobalParams(N=1, lambda0=1)
    C = FilteredComplex(P, [("x", 0, 0), ("y", "0.5", 1)], {("x", "y"): "1/(1+q)"},
                        graded=False)
    # one bar of length 1/2, repeated every lambda0
    assert rank_window(C, 0, 1) == 0
    assert rank_window(C, 0, "0.5") == 1
