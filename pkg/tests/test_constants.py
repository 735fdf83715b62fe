"""Optimal bounding constants: closed form vs numeric, triangle-class
constants, the strict product inequality, empirical suprema."""

from fractions import Fraction
import itertools
import math
import random

import pytest

from lorcut import (
    BarycentricRatio,
    DomainError,
    ReducedRatio,
    complete_diagonal,
    estimate_sup,
    named_ratio,
    numeric_constant_n3,
    optimal_constant_n3,
    tp_constant_n3,
    tp_constant_n3_by_vertices,
    xyz_product_check,
    xyz_quantities,
)


def random_barycentric(rng):
    u, v = sorted((rng.random(), rng.random()))
    return BarycentricRatio(u, v - u, 1.0 - v)


def test_vertex_midpoint_centroid_values():
    assert optimal_constant_n3(BarycentricRatio(1, 0, 0)) == 2.0
    assert optimal_constant_n3(BarycentricRatio(0, 1, 0)) == 2.0
    assert optimal_constant_n3(BarycentricRatio(0.5, 0.5, 0)) == 1.0
    assert optimal_constant_n3(BarycentricRatio(1 / 3, 1 / 3, 1 / 3)) == 1.0


def test_constant_permutation_invariant():
    rng = random.Random(3)
    for _ in range(100):
        q = random_barycentric(rng)
        values = {optimal_constant_n3(BarycentricRatio(*p))
                  for p in itertools.permutations((q.a, q.b, q.c))}
        assert max(values) - min(values) <= 1e-12


def test_constant_at_least_one_and_one_inside_circle():
    rng = random.Random(5)
    for _ in range(300):
        q = random_barycentric(rng)
        value = optimal_constant_n3(q)
        assert value >= 1.0
        disc = q.a**2 + q.b**2 + q.c**2 - 2 * (q.a * q.b + q.a * q.c + q.b * q.c)
        if disc < -1e-12:
            assert value == 1.0


def test_closed_form_matches_numeric():
    rng = random.Random(7)
    points = [random_barycentric(rng) for _ in range(20)]
    points += [BarycentricRatio(0.8, 0.1, 0.1), BarycentricRatio(0.6, 0.4, 0.0)]
    for q in points:
        assert abs(optimal_constant_n3(q) - numeric_constant_n3(q)) <= 1e-6


def test_barycentric_validation():
    with pytest.raises(DomainError):
        BarycentricRatio(0.5, 0.5, 0.5)
    with pytest.raises(DomainError):
        BarycentricRatio(-0.1, 0.6, 0.5)


def test_tp_constant_examples():
    assert tp_constant_n3(1, 0, 0, 2) == 4.0
    assert tp_constant_n3(1 / 3, 1 / 3, 1 / 3, 2) == 2.0
    assert tp_constant_n3(0.2, 0.5, 0.1, 0) == 1.0
    with pytest.raises(DomainError):
        tp_constant_n3(1, 0, 0, -1)
    with pytest.raises(DomainError):
        tp_constant_n3(-1, 0, 0, 1)


def test_tp_constant_continuous_across_regions():
    rng = random.Random(11)
    for _ in range(100):
        b, c, p = rng.random(), rng.random(), 4 * rng.random()
        a = b + c  # boundary between the dominant and balanced cases
        assert math.isclose(2.0 ** (a * p), 2.0 ** (p * (a + b + c) / 2.0))
        assert math.isclose(tp_constant_n3(a, b, c, p), 2.0 ** (a * p))


def test_tp_constant_matches_vertex_enumeration():
    rng = random.Random(13)
    for _ in range(200):
        a, b, c, p = rng.random(), rng.random(), rng.random(), 4 * rng.random()
        assert abs(tp_constant_n3(a, b, c, p) - tp_constant_n3_by_vertices(a, b, c, p)) <= 1e-9


def test_xyz_quantities_examples():
    q = xyz_quantities((1, 1, 1), (1, 1, 1))
    assert (q.X, q.Y, q.Z) == (3, 3, 3)
    check = xyz_product_check((1, 1, 1), (1, 1, 1))
    assert check.applicable and check.holds  # 27 < 32

    check = xyz_product_check((6, 1, 1), (1, 1, 6))
    assert check.quantities.X == -12
    assert not check.applicable and check.holds  # vacuous

    q = xyz_quantities((1, 1, 2), (1, 1, 2))
    assert (q.X, q.Y, q.Z) == (4, 4, 4)
    assert xyz_product_check((1, 1, 2), (1, 1, 2)).holds  # 64 < 128


def test_xyz_rejects_nonpositive():
    with pytest.raises(DomainError):
        xyz_product_check((1, 0, 1), (1, 1, 1))


def test_xyz_strict_on_random_applicable():
    rng = random.Random(17)
    found = 0
    while found < 1000:
        x = [Fraction(rng.randint(1, 1000), rng.randint(1, 100)) for _ in range(3)]
        y = [Fraction(rng.randint(1, 1000), rng.randint(1, 100)) for _ in range(3)]
        check = xyz_product_check(x, y)
        if not check.applicable:
            continue
        found += 1
        assert check.holds


def test_estimate_sup_triangular_at_most_two():
    tri = named_ratio("triangular", (1, 2, 3), 3)
    est = estimate_sup(tri, iterations=100_000, seed=1)
    assert est.empirical_sup <= 2
    assert float(est.empirical_sup) > 1.99  # epsilon family approaches 2


def test_estimate_sup_pentagonal_at_most_four():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    est = estimate_sup(penta, iterations=100_000, seed=1)
    assert est.empirical_sup <= 4
    assert est.empirical_sup >= Fraction(39999, 10000)  # witness sweep


def test_estimate_sup_normalized_pentagonal_at_most_two():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    half = complete_diagonal(ReducedRatio(5, tuple(x / 2 for x in penta.offdiag)))
    est = estimate_sup(half, iterations=2000, seed=3)
    assert float(est.empirical_sup) <= 2.0 + 1e-9


def test_estimate_sup_deterministic_and_rejects_unbounded():
    tri = named_ratio("triangular", (1, 2, 3), 3)
    a = estimate_sup(tri, iterations=500, seed=9)
    b = estimate_sup(tri, iterations=500, seed=9)
    assert a.empirical_sup == b.empirical_sup and a.argmax == b.argmax
    unbounded = complete_diagonal(ReducedRatio.from_coords(3, (1, 0, 0)))
    with pytest.raises(DomainError):
        estimate_sup(unbounded, iterations=10, seed=0)
