"""Sparse integer polynomials and the subtraction-free expansion check."""

from fractions import Fraction
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorcut import (
    DomainError,
    IntPoly,
    complete_diagonal,
    enumerate_facets,
    evaluate,
    full_from_facet,
    named_ratio,
    poly_from_entry,
    subfree_check,
)
from lorcut.matrices import Rank2Params, rank2_hessian
from lorcut.ratios import ReducedRatio
from lorcut.subfree import subfree_difference


def test_entry_polynomials():
    p12 = poly_from_entry(1, 2, 3)
    assert p12.terms == {(1, 0, 0, 0, 1, 0): 1, (0, 1, 0, 1, 0, 0): 1}
    p11 = poly_from_entry(1, 1, 3)
    assert p11.terms == {(1, 0, 0, 1, 0, 0): 2}
    prod = poly_from_entry(2, 3, 3) * poly_from_entry(1, 1, 3)
    assert prod.terms == {(1, 1, 0, 1, 0, 1): 2, (1, 0, 1, 1, 1, 0): 2}


def test_identity_and_cancellation():
    p = poly_from_entry(1, 2, 2)
    one = IntPoly.constant(4, 1)
    assert p * one == p
    assert (p - p).is_zero


def test_square_expansion():
    p = poly_from_entry(1, 2, 2)
    sq = p**2
    assert sq.terms == {(2, 0, 0, 2): 1, (1, 1, 1, 1): 2, (0, 2, 2, 0): 1}


def _poly_strategy(nvars=4):
    term = st.tuples(
        st.tuples(*[st.integers(0, 2) for _ in range(nvars)]),
        st.integers(-5, 5),
    )
    return st.lists(term, max_size=5).map(
        lambda ts: sum((IntPoly.monomial(nvars, e, c) for e, c in ts if c),
                       IntPoly.zero(nvars)))


@settings(max_examples=200, deadline=None)
@given(_poly_strategy(), _poly_strategy(), _poly_strategy())
def test_ring_axioms(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p + q == q + p


def test_triangular_difference_identity():
    # p11 p23 / (p12 p13): the difference is 2 a1^2 b2 b3 + 2 a2 a3 b1^2
    diff, flags = subfree_difference(named_ratio("triangular", (2, 3, 1), 3))
    expected = IntPoly(6, {(2, 0, 0, 0, 1, 1): 2, (0, 1, 1, 2, 0, 0): 2})
    assert diff == expected
    assert not flags


def test_pentagonal_subfree_holds():
    report = subfree_check(named_ratio("pentagonal", (1, 2, 3, 4, 5), 5))
    assert report.holds
    assert not report.negative_terms


def test_zero_ratio_vacuous():
    zero = complete_diagonal(ReducedRatio.from_coords(3, (0, 0, 0)))
    report = subfree_check(zero)
    assert report.holds and report.term_count == 0


def test_facets_n3_n4_subfree():
    for n in (3, 4):
        for facet in enumerate_facets(n):
            assert subfree_check(full_from_facet(facet)).holds


def test_difference_matches_direct_evaluation():
    rng = random.Random(19)
    facets = enumerate_facets(4)
    for _ in range(100):
        r = full_from_facet(facets[rng.randrange(len(facets))])
        diff, _ = subfree_difference(r)
        a = [rng.randint(1, 20) for _ in range(4)]
        b = [rng.randint(1, 20) for _ in range(4)]
        m = rank2_hessian(Rank2Params(tuple(a), tuple(b)))
        neg = Fraction(1)
        pos = Fraction(1)
        for i in range(1, 5):
            for j in range(i, 5):
                e = r.exponent(i, j)
                if e > 0:
                    pos *= Fraction(m.entry(i, j)) ** int(e)
                elif e < 0:
                    neg *= Fraction(m.entry(i, j)) ** int(-e)
        direct = 2 ** int(sum(r.diag)) * neg - pos
        value = diff.evaluate(a + b)
        assert value == direct
        assert value >= 0  # nonnegativity follows whenever the check holds


def test_subfree_rejects_non_integral_and_unbounded():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    half = complete_diagonal(ReducedRatio(5, tuple(x / 2 for x in penta.offdiag)))
    with pytest.raises(DomainError):
        subfree_check(half)
    with pytest.raises(DomainError):
        subfree_check(complete_diagonal(ReducedRatio.from_coords(3, (1, 0, 0))))


def test_serialization_roundtrip_graded_lex():
    diff, _ = subfree_difference(named_ratio("pentagonal", (1, 2, 3, 4, 5), 5))
    data = diff.to_json()
    assert IntPoly.from_json(data) == diff
    degrees = [sum(t["exps"]) for t in data["terms"]]
    assert degrees == sorted(degrees)
