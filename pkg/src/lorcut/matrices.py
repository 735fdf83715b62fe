"""Symmetric matrices with exact-rational or float entries, Lorentzian testing,
the diagonal scaling action, the rank-2 parametrization, explicit witness
families, and seeded random sampling.

A matrix is Lorentzian when all entries are nonnegative and at most one
eigenvalue is positive.  Certification always runs on the exact rational path;
floats exist for sampling and estimation only.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
import random
from typing import NamedTuple

import numpy as np

from ._util import clear_denominators, frac_to_str, int_rank, scalar_from_json, scalar_to_json
from .errors import DomainError, StructuralError

FLOAT_ZERO_EIGENVALUE_REL_TOL = 1e-9


def _classify_scalar(x):
    if isinstance(x, bool):
        raise StructuralError("boolean matrix entry")
    if isinstance(x, float):
        return "float"
    if isinstance(x, (int, Fraction)):
        return "rational"
    raise StructuralError(f"unsupported scalar type {type(x).__name__}")


@dataclass(frozen=True)
class SymMatrix:
    """An n-by-n symmetric matrix, homogeneous in scalar kind.

    `entries` is a tuple of row tuples; rationals are `Fraction`, floats are
    `float`.  Labels in the public accessors are 1-based.
    """

    n: int
    entries: tuple
    kind: str

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise StructuralError("matrix must be square and nonempty")
        kinds = {_classify_scalar(x) for row in rows for x in row}
        if len(kinds) != 1:
            raise StructuralError("matrix mixes rational and float entries")
        kind = kinds.pop()
        if kind == "rational":
            rows = [[Fraction(x) for x in row] for row in rows]
        else:
            if any(not math.isfinite(x) for row in rows for x in row):
                raise DomainError("matrix entries must be finite")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise StructuralError(f"asymmetric at ({i + 1},{j + 1})")
        return cls(n, tuple(tuple(r) for r in rows), kind)

    def entry(self, i, j):
        """Entry p_ij with 1-based labels."""
        return self.entries[i - 1][j - 1]

    @property
    def is_rational(self):
        return self.kind == "rational"

    def nonnegative(self):
        return all(x >= 0 for row in self.entries for x in row)

    def positive(self):
        return all(x > 0 for row in self.entries for x in row)

    def to_float_array(self):
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def to_float(self):
        return SymMatrix.from_rows([[float(x) for x in row] for row in self.entries])

    def to_json(self):
        if self.is_rational:
            body = [[frac_to_str(x) for x in row] for row in self.entries]
        else:
            body = [list(row) for row in self.entries]
        return {"n": self.n, "scalar": self.kind, "entries": body}

    @classmethod
    def from_json(cls, data):
        try:
            n = data["n"]
            scalar = data["scalar"]
            body = data["entries"]
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"matrix JSON missing field: {exc}")
        if scalar not in ("rational", "float"):
            raise StructuralError(f"unknown scalar kind {scalar!r}")
        if len(body) != n:
            raise StructuralError("matrix JSON size mismatch")
        if scalar == "rational":
            rows = [[scalar_from_json(x if isinstance(x, str) else int(x)) for x in row] for row in body]
        else:
            rows = [[float(x) for x in row] for row in body]
        return cls.from_rows(rows)


@dataclass(frozen=True)
class EigenSignature:
    """Inertia of a symmetric matrix: counts of positive/negative/zero eigenvalues."""

    n_pos: int
    n_neg: int
    n_zero: int

    @property
    def rank(self):
        return self.n_pos + self.n_neg

    def as_tuple(self):
        return (self.n_pos, self.n_neg, self.n_zero)


class LorentzianResult(NamedTuple):
    lorentzian: bool
    signature: EigenSignature


@dataclass(frozen=True)
class Rank2Params:
    """Nonnegative coefficient vectors (a_i), (b_i) of a product of two linear forms."""

    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise StructuralError("coefficient vectors differ in length")
        if any(x < 0 for x in self.a) or any(x < 0 for x in self.b):
            raise DomainError("coefficients must be nonnegative")


def charpoly_int(rows):
    """Coefficients [1, c1, ..., cn] of det(tI - M) for an integer matrix M.

    Uses the trace recursion with exact integer divisions; every division below
    is exact because the coefficients of a monic integer charpoly are integers.
    """
    n = len(rows)
    coeffs = [1]
    a = [list(r) for r in rows]
    work = [row[:] for row in a]
    c = -sum(work[i][i] for i in range(n))
    coeffs.append(c)
    for k in range(2, n + 1):
        for i in range(n):
            work[i][i] += c
        nxt = [[sum(a[i][t] * work[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        work = nxt
        tr = sum(work[i][i] for i in range(n))
        assert tr % k == 0
        c = -tr // k
        coeffs.append(c)
    return coeffs


def signature_from_charpoly(coeffs):
    """Inertia counts from det(tI - M): Descartes' sign rule is exact because
    all roots of a real symmetric matrix are real."""
    n = len(coeffs) - 1
    n_zero = 0
    while n_zero < n and coeffs[n - n_zero] == 0:
        n_zero += 1
    signs = [c for c in coeffs if c != 0]
    n_pos = sum(1 for s, t in zip(signs, signs[1:]) if (s > 0) != (t > 0))
    return EigenSignature(n_pos, n - n_pos - n_zero, n_zero)


def _exact_signature(m):
    ints, _ = clear_denominators([list(row) for row in m.entries])
    return signature_from_charpoly(charpoly_int(ints))


def _float_signature(m):
    arr = m.to_float_array()
    if not np.isfinite(arr).all():
        raise DomainError("matrix entries must be finite")
    eigs = np.linalg.eigvalsh(arr)
    norm_est = max(1.0, float(np.abs(arr).sum(axis=1).max()))
    tol = FLOAT_ZERO_EIGENVALUE_REL_TOL * norm_est
    n_pos = int((eigs > tol).sum())
    n_neg = int((eigs < -tol).sum())
    return EigenSignature(n_pos, n_neg, m.n - n_pos - n_neg)


def is_lorentzian(m: SymMatrix) -> LorentzianResult:
    """Test nonnegative entries plus at-most-one positive eigenvalue.

    Exact for rational matrices; float matrices use a scale-aware zero
    threshold on the eigenvalues.
    """
    signature = _exact_signature(m) if m.is_rational else _float_signature(m)
    return LorentzianResult(m.nonnegative() and signature.n_pos <= 1, signature)


def exact_rank(m: SymMatrix) -> int:
    """Rank by fraction-free elimination; exact path only."""
    if not m.is_rational:
        raise DomainError("exact rank requires a rational matrix")
    ints, _ = clear_denominators([list(row) for row in m.entries])
    return int_rank(ints)


def rank2_hessian(params: Rank2Params) -> SymMatrix:
    """Hessian of (sum a_i x_i)(sum b_i x_i): p_ij = a_i b_j + a_j b_i."""
    a, b = params.a, params.b
    n = len(a)
    if n == 0:
        raise StructuralError("empty coefficient vectors")
    rows = [[a[i] * b[j] + a[j] * b[i] for j in range(n)] for i in range(n)]
    return SymMatrix.from_rows(rows)


def witness_pentagonal(t) -> SymMatrix:
    """One-parameter 5x5 Lorentzian family of rank 3 whose pentagonal ratio is
    16(1+t)/(2+t)^2, approaching the optimal constant 4 as t -> 0."""
    t = Fraction(t)
    if t < 0:
        raise DomainError("parameter t must be nonnegative")
    rows = [
        [0, 1, 1, t, 2 + t],
        [1, 0, 1, 2, 2],
        [1, 1, 0, 2 + t, t],
        [t, 2, 2 + t, 4 * t, 4 + 4 * t],
        [2 + t, 2, t, 4 + 4 * t, 4 * t],
    ]
    return SymMatrix.from_rows(rows)


def pentagonal_witness_value(t) -> Fraction:
    """Closed-form pentagonal ratio of witness_pentagonal(t) for t > 0."""
    t = Fraction(t)
    if t <= 0:
        raise DomainError("closed-form value needs t > 0")
    return 16 * (1 + t) / (2 + t) ** 2


def witness_tp(p) -> SymMatrix:
    """5x5 equality witness for the pentagonal bound 8^p on the T_p triangle class.

    Exact rational when p is an even integer (entries are powers of 2), float
    otherwise.
    """
    p = Fraction(p)
    if p <= 0:
        raise DomainError("parameter p must be positive")
    half = p / 2
    if half.denominator == 1:
        s = Fraction(2) ** half.numerator
    else:
        s = 2.0 ** float(half)
    one = type(s)(1)
    zero = type(s)(0)
    rows = [
        [zero, s, s, one, one],
        [s, zero, s, one, one],
        [s, s, zero, one, one],
        [one, one, one, s, s],
        [one, one, one, s, s],
    ]
    return SymMatrix.from_rows(rows)


def scale(m: SymMatrix, c) -> SymMatrix:
    """Diagonal scaling action: entry (i, j) becomes c_i * c_j * p_ij."""
    c = list(c)
    if len(c) != m.n:
        raise StructuralError("scaling vector length mismatch")
    if any(x <= 0 for x in c):
        raise DomainError("scaling factors must be positive")
    rows = [[c[i] * c[j] * m.entries[i][j] for j in range(m.n)] for i in range(m.n)]
    return SymMatrix.from_rows(rows)


def normalize_diagonal(m: SymMatrix) -> SymMatrix:
    """Scale so every diagonal entry is 1 (float output; needs positive diagonal)."""
    if any(m.entries[i][i] <= 0 for i in range(m.n)):
        raise DomainError("normalization needs a positive diagonal")
    c = [1.0 / math.sqrt(float(m.entries[i][i])) for i in range(m.n)]
    return scale(m.to_float(), c)


@dataclass(frozen=True)
class SampleConfig:
    """Rank-2 sampler distribution: coefficients exp(U[log_low, log_high]),
    rounded to dyadic rationals with denom_bits fractional bits."""

    log_low: float = -3.0
    log_high: float = 3.0
    denom_bits: int = 20


def draw_rank2_params(n, rng, config: SampleConfig = SampleConfig()) -> Rank2Params:
    """Draw coefficient vectors from an existing RNG (for batched sampling)."""
    if n < 2:
        raise DomainError("sampler needs n >= 2")
    scale_denom = 1 << config.denom_bits

    def draw():
        u = rng.uniform(config.log_low, config.log_high)
        num = max(1, round(math.exp(u) * scale_denom))
        return Fraction(num, scale_denom)

    a = tuple(draw() for _ in range(n))
    b = tuple(draw() for _ in range(n))
    return Rank2Params(a, b)


def sample_rank2_params(n, seed, config: SampleConfig = SampleConfig()) -> Rank2Params:
    return draw_rank2_params(n, random.Random(seed), config)


def sample_rank2(n, seed, config: SampleConfig = SampleConfig()) -> SymMatrix:
    """Seeded random rank-<=2 Lorentzian matrix with positive rational entries."""
    return rank2_hessian(sample_rank2_params(n, seed, config))


def permute(m: SymMatrix, perm) -> SymMatrix:
    """Relabel vertices: entry (i, j) of the result is p_{perm(i), perm(j)}."""
    perm = list(perm)
    if sorted(perm) != list(range(1, m.n + 1)):
        raise DomainError("not a permutation of 1..n")
    rows = [[m.entry(perm[i], perm[j]) for j in range(m.n)] for i in range(m.n)]
    return SymMatrix.from_rows(rows)
