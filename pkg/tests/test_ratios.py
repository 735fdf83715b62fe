"""Ratio algebra: completion, named families, evaluation, certification,
normalization, decomposition."""

from fractions import Fraction
import random

import pytest

from lorcut import (
    DomainError,
    FullRatio,
    InvariantViolation,
    ReducedRatio,
    StructuralError,
    SymMatrix,
    complete_diagonal,
    decompose,
    enumerate_facets,
    evaluate,
    evaluate_with_flags,
    full_from_facet,
    is_bounded,
    named_ratio,
    normalize_ratio,
    sample_rank2,
    scale,
    witness_pentagonal,
)
from lorcut.matrices import draw_rank2_params, rank2_hessian
from lorcut.ratios import decompose_sum, ratio_from_json, ratio_to_json


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_complete_diagonal_alexandrov_fenchel():
    full = complete_diagonal(ReducedRatio.from_coords(2, (-2,)))
    assert full.diag == F(1, 1)
    assert full == named_ratio("alexandrov_fenchel", (1, 2), 2)


def test_complete_diagonal_triangular():
    full = complete_diagonal(ReducedRatio.from_coords(3, (-1, -1, 1)))
    assert full.diag == F(1, 0, 0)  # the ratio p11 p23 / (p12 p13)


def test_complete_diagonal_zero():
    full = complete_diagonal(ReducedRatio.from_coords(3, (0, 0, 0)))
    assert full.diag == F(0, 0, 0)
    assert complete_diagonal(full.reduced()) == full


def test_full_ratio_balance_enforced():
    with pytest.raises(StructuralError):
        FullRatio(2, F(-2), F(1, 0))


def test_named_triangular():
    t = named_ratio("triangular", (1, 2, 3), 3)
    assert t.offdiag == F(1, -1, -1)
    assert t.diag == F(0, 0, 1)


def test_named_degenerations():
    assert named_ratio("pentagonal", (1, 2, 3, 3, 3), 3) == named_ratio("triangular", (1, 2, 3), 3)
    assert named_ratio("triangular", (1, 1, 2), 2) == named_ratio("alexandrov_fenchel", (1, 2), 2)


def test_named_rejects_degenerate_multiplicity():
    with pytest.raises(DomainError):
        named_ratio("triangular", (1, 2, 2), 3)
    with pytest.raises(DomainError):
        named_ratio("alexandrov_fenchel", (1, 1), 2)
    with pytest.raises(DomainError):
        named_ratio("pentagonal", (1, 2, 3, 1, 2), 3)
    with pytest.raises(DomainError):
        named_ratio("triangular", (1, 2, 4), 3)


def test_evaluate_witness_value():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    value, flags = evaluate_with_flags(penta, witness_pentagonal(1))
    assert value == Fraction(32, 9)
    assert any(f.startswith("zero_base_zero_exponent") for f in flags)


def test_evaluate_trivial_cases():
    ones = SymMatrix.from_rows([[1] * 3 for _ in range(3)])
    assert evaluate(named_ratio("triangular", (1, 2, 3), 3), ones) == 1
    af = named_ratio("alexandrov_fenchel", (1, 2), 2)
    assert evaluate(af, SymMatrix.from_rows([[1, 2], [2, 1]])) == Fraction(1, 4)


def test_evaluate_zero_base_negative_exponent():
    t = named_ratio("triangular", (1, 2, 3), 3)
    m = SymMatrix.from_rows([[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    with pytest.raises(DomainError):
        evaluate(t, m)


def test_evaluate_float_path_rational_exponents():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    half = FullRatio(5, tuple(x / 2 for x in penta.offdiag), tuple(x / 2 for x in penta.diag))
    m = sample_rank2(5, 7)
    exact = evaluate(penta, m)
    approx = evaluate(half, m)
    assert abs(approx - float(exact) ** 0.5) <= 1e-9 * approx


def test_scaling_invariance_exact():
    rng = random.Random(23)
    for _ in range(1000):
        n = rng.randint(2, 5)
        # even off-diagonal exponents keep the completed diagonal integral,
        # so both evaluations stay on the exact rational path
        coords = [Fraction(2 * rng.randint(-3, 3)) for _ in range(n * (n - 1) // 2)]
        r = complete_diagonal(ReducedRatio(n, tuple(coords)))
        m = sample_rank2(n, rng.getrandbits(32))
        c = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
        assert evaluate(r, scale(m, c)) == evaluate(r, m)


def test_scaling_invariance_float_path():
    rng = random.Random(29)
    for _ in range(200):
        n = rng.randint(2, 5)
        coords = [Fraction(rng.randint(-3, 3), 2) for _ in range(n * (n - 1) // 2)]
        r = complete_diagonal(ReducedRatio(n, tuple(coords)))
        m = sample_rank2(n, rng.getrandbits(32))
        c = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
        a, b = evaluate(r, scale(m, c)), evaluate(r, m)
        assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1.0)


def test_is_bounded_examples():
    cert = is_bounded(ReducedRatio.from_coords(3, (-1, -1, 1)))
    assert cert.bounded
    assert [sorted(s) for s in cert.tight_subsets] == [[2], [3]]

    cert = is_bounded(ReducedRatio.from_coords(3, (1, 0, 0)))
    assert not cert.bounded
    assert sorted(cert.violating_subset) == [2]

    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    assert is_bounded(penta.reduced()).bounded


def test_violation_certificates_recompute_positive():
    from lorcut.cutcone import cut_vector

    rng = random.Random(41)
    found = 0
    while found < 200:
        n = rng.randint(3, 6)
        coords = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n * (n - 1) // 2))
        cert = is_bounded(ReducedRatio(n, coords))
        if cert.bounded:
            continue
        found += 1
        dot = sum(c * d for c, d in zip(coords, cut_vector(n, cert.violating_subset).coords))
        assert dot > 0


def test_normalize_examples():
    tri = named_ratio("triangular", (1, 2, 3), 3).reduced()
    assert normalize_ratio(tri) == tri  # sum already -1
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5).reduced()
    assert normalize_ratio(penta).coords == tuple(x / 2 for x in penta.coords)
    scaled = ReducedRatio(3, tuple(5 * x for x in tri.coords))
    assert normalize_ratio(scaled) == tri


def test_normalize_errors():
    with pytest.raises(DomainError):
        normalize_ratio(ReducedRatio.from_coords(3, (0, 0, 0)))
    with pytest.raises(InvariantViolation):
        normalize_ratio(ReducedRatio.from_coords(3, (1, 0, 0)))


def test_decompose_alexandrov_fenchel_identities():
    basis = list(enumerate_facets(3))
    t231 = named_ratio("triangular", (2, 3, 1), 3)
    t132 = named_ratio("triangular", (1, 3, 2), 3)
    t123 = named_ratio("triangular", (1, 2, 3), 3)

    for af_indices, parts in (((1, 2), (t231, t132)), ((1, 3), (t231, t123))):
        target = named_ratio("alexandrov_fenchel", af_indices, 3)
        found = decompose(target, basis)
        assert found is not None
        assert decompose_sum(found, basis, 3) == target
        picked = sorted(tuple(int(x) for x in basis[i].coords) for i, k in found for _ in range(k))
        expected = sorted(tuple(int(x) for x in p.offdiag) for p in parts)
        assert picked == expected


def test_decompose_basis_element_is_itself():
    basis = list(enumerate_facets(3))
    tri = named_ratio("triangular", (1, 2, 3), 3)
    found = decompose(tri, basis)
    assert found is not None and sum(k for _, k in found) == 1


def test_decompose_rejects_unbounded():
    r = complete_diagonal(ReducedRatio.from_coords(3, (1, 0, 0)))
    with pytest.raises(DomainError):
        decompose(r, list(enumerate_facets(3)))


def test_soundness_sweep_cut5_facets():
    """Every facet of the n=5 cone stays at or below the largest optimal
    constant (4) on rank-2 samples, in exact arithmetic."""
    facets = [full_from_facet(f) for f in enumerate_facets(5)]
    rng = random.Random(47)
    for _ in range(10_000):
        m = rank2_hessian(draw_rank2_params(5, rng))
        for r in facets:
            assert evaluate(r, m) <= 4


def test_ratio_json_roundtrip():
    penta = named_ratio("pentagonal", (1, 2, 3, 4, 5), 5)
    data = ratio_to_json(penta)
    assert ratio_from_json(data) == penta
    data.pop("diag")  # diagonal is reconstructed when absent
    assert ratio_from_json(data) == penta
