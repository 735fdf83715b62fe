"""Optimal bounding constants: the closed-form constant over the 3x3 ratio
cone with its independent numerical cross-check, the piecewise constant on the
T_p triangle class, the strict product inequality behind the pentagonal bound,
and empirical supremum estimation for arbitrary bounded ratios.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import random

import numpy as np

from ._util import derive_seed
from .errors import DomainError, InvariantViolation
from .matrices import (
    SampleConfig,
    SymMatrix,
    draw_rank2_params,
    permute,
    rank2_hessian,
    witness_pentagonal,
)
from .ratios import FullRatio, evaluate_with_flags, is_bounded

BRANCH_AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class BarycentricRatio:
    """Coefficients (a, b, c) on the three triangular ratios, summing to 1."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c)
        if any(float(v) < -1e-12 for v in vals):
            raise DomainError("barycentric coefficients must be nonnegative")
        if abs(float(self.a) + float(self.b) + float(self.c) - 1.0) > 1e-12:
            raise DomainError("barycentric coefficients must sum to 1")

    def sorted_desc(self):
        return tuple(sorted((float(self.a), float(self.b), float(self.c)), reverse=True))


def _pow_conv(x, y):
    """x**y with the 0**0 := 1 convention; tiny negative bases are clamped."""
    x = max(float(x), 0.0)
    if x == 0.0:
        return 1.0 if y == 0.0 else 0.0
    return x**y


def _discriminant(a, b, c):
    return a * a + b * b + c * c - 2 * a * b - 2 * a * c - 2 * b * c


def _entropy_value(a, b, c):
    """Region-2 closed form, stated for a >= b and a >= c."""
    return (2.0 * _pow_conv(a, a) * _pow_conv(b, b) * _pow_conv(c, c)
            * _pow_conv(2 * a - 1, 2 * a - 1)
            * _pow_conv(1 - 2 * b, 2 * b - 1)
            * _pow_conv(1 - 2 * c, 2 * c - 1))


def optimal_constant_n3(q: BarycentricRatio) -> float:
    """Optimal bounding constant for a*alpha^{23|1} + b*alpha^{13|2} + c*alpha^{12|3}.

    Equals 1 on and inside the inscribed circle of the barycentric triangle;
    outside, an entropy-like product with the largest coefficient in the
    leading role.  Invariant under coordinate permutations by construction.
    """
    a, b, c = q.sorted_desc()
    disc = _discriminant(a, b, c)
    if abs(disc) <= 1e-12:
        # both branches must agree on the circle; check rather than choose silently
        v = _entropy_value(a, b, c)
        if abs(v - 1.0) > BRANCH_AGREEMENT_TOL:
            raise InvariantViolation("branch disagreement on the inscribed circle",
                                     value=v, point=[a, b, c])
        return 1.0
    if disc < 0:
        return 1.0
    return _entropy_value(a, b, c)


def _objective_grid(a, b, c, grid):
    x = np.linspace(0.0, 1.0, grid)
    y = np.linspace(0.0, 1.0, grid)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    m = a - b - c
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sqrt((1.0 - xx) * (1.0 - yy))
        r = np.power(xx, b) * np.power(yy, c) * np.power(1.0 + s, m)
    r = np.nan_to_num(r, nan=0.0, posinf=0.0)
    return x, y, r


def _objective_at(a, b, c, x, y):
    m = a - b - c
    s = math.sqrt(max((1.0 - x) * (1.0 - y), 0.0))
    return _pow_conv(x, b) * _pow_conv(y, c) * (1.0 + s) ** m


def _newton_refine(a, b, c, x, y, steps):
    """Newton iteration on log r; returns the best objective value seen."""
    m = a - b - c
    best = _objective_at(a, b, c, x, y)
    lo, hi = 1e-12, 1.0 - 1e-12
    for _ in range(steps):
        u, v = 1.0 - x, 1.0 - y
        s = math.sqrt(max(u * v, 0.0))
        if s <= 0 or x <= 0 or y <= 0:
            break
        t = 2.0 * s * (1.0 + s)
        gx = b / x - m * v / t
        gy = c / y - m * u / t
        gxx = -b / x**2 - m * v * v * (1 + 2 * s) / (s * t * t)
        gyy = -c / y**2 - m * u * u * (1 + 2 * s) / (s * t * t)
        gxy = m * s / (t * t)
        det = gxx * gyy - gxy * gxy
        if not math.isfinite(det) or abs(det) < 1e-30:
            break
        dx = -(gx * gyy - gy * gxy) / det
        dy = -(gy * gxx - gx * gxy) / det
        x = min(max(x + dx, lo), hi)
        y = min(max(y + dy, lo), hi)
        val = _objective_at(a, b, c, x, y)
        if val > best:
            best = val
        if abs(dx) + abs(dy) < 1e-15:
            break
    return best


def numeric_constant_n3(q: BarycentricRatio, grid=2001, newton_steps=50) -> float:
    """Independent numerical maximization of the boundary-restricted objective
    r(x, y) = x^b y^c (1 + sqrt((1-x)(1-y)))^(a-b-c) over the unit square,
    with the largest coefficient in the leading role; 1 inside the circle.

    Agrees with the closed form to within 1e-6.
    """
    a, b, c = q.sorted_desc()
    if _discriminant(a, b, c) <= 0:
        return 1.0
    _, _, r = _objective_grid(a, b, c, grid)
    flat = int(np.argmax(r))
    gx, gy = divmod(flat, grid)
    best = float(r[gx, gy])
    step = 1.0 / (grid - 1)
    x_best, y_best = gx * step, gy * step

    # closed-form critical point of the smooth problem, evaluated directly
    denom1 = (a + b - c) ** 2
    denom2 = (a - b + c) ** 2
    if denom1 > 0 and denom2 > 0:
        x0 = min(max(4 * a * b / denom1, 0.0), 1.0)
        y0 = min(max(4 * a * c / denom2, 0.0), 1.0)
        v0 = _objective_at(a, b, c, x0, y0)
        if v0 > best:
            best, x_best, y_best = v0, x0, y0

    if 0.0 < x_best < 1.0 and 0.0 < y_best < 1.0 and b > 0 and c > 0:
        best = max(best, _newton_refine(a, b, c, x_best, y_best, newton_steps))
    return best


# ---------------------------------------------------------------------------
# the T_p triangle-class constant for n = 3


def tp_constant_n3(a, b, c, p) -> float:
    """Piecewise optimal constant for a barycentric ratio on the T_p class:
    2^(ap) when a dominates (similarly b, c), else 2^(p(a+b+c)/2)."""
    if min(a, b, c) < 0:
        raise DomainError("coefficients must be nonnegative")
    if p < 0:
        raise DomainError("p must be nonnegative")
    a, b, c, p = float(a), float(b), float(c), float(p)
    if a > b + c:
        return 2.0 ** (a * p)
    if b > a + c:
        return 2.0 ** (b * p)
    if c > a + b:
        return 2.0 ** (c * p)
    return 2.0 ** (p * (a + b + c) / 2.0)


def tp_constant_n3_by_vertices(a, b, c, p) -> float:
    """Independent check: maximize the log-objective over the four vertices of
    the feasible log-coordinate region (base-2 logs scaled by -p/2)."""
    if min(a, b, c) < 0 or p < 0:
        raise DomainError("coefficients and p must be nonnegative")
    half = -float(p) / 2.0
    vertices = [(0.0, half, half), (half, 0.0, half), (half, half, 0.0), (half, half, half)]
    best = -math.inf
    for q12, q13, q23 in vertices:
        obj = (a * (q23 - q12 - q13) + b * (q13 - q12 - q23) + c * (q12 - q13 - q23))
        best = max(best, obj)
    return 2.0**best


# ---------------------------------------------------------------------------
# the strict product inequality behind the pentagonal bound


@dataclass(frozen=True)
class XYZQuantities:
    X: Fraction
    Y: Fraction
    Z: Fraction


@dataclass(frozen=True)
class XYZCheck:
    quantities: XYZQuantities
    applicable: bool
    holds: bool


def xyz_quantities(x, y) -> XYZQuantities:
    x1, x2, x3 = (Fraction(v) for v in x)
    y1, y2, y3 = (Fraction(v) for v in y)
    X = 2 * x1 * x2 + 2 * x1 * x3 + 2 * x2 * x3 - x1 * x1 - x2 * x2 - x3 * x3
    Y = 2 * y1 * y2 + 2 * y1 * y3 + 2 * y2 * y3 - y1 * y1 - y2 * y2 - y3 * y3
    Z = x1 * (y2 + y3 - y1) + x2 * (y1 + y3 - y2) + x3 * (y1 + y2 - y3)
    return XYZQuantities(X, Y, Z)


def xyz_product_check(x, y) -> XYZCheck:
    """For positive triples: when X, Y, Z are all nonnegative, verify the
    strict bound X*Y*Z < 32 * x1 x2 x3 y1 y2 y3 in exact arithmetic."""
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    if len(x) != 3 or len(y) != 3 or min(x) <= 0 or min(y) <= 0:
        raise DomainError("inputs must be positive triples")
    q = xyz_quantities(x, y)
    applicable = q.X >= 0 and q.Y >= 0 and q.Z >= 0
    holds = (not applicable) or (q.X * q.Y * q.Z < 32 * x[0] * x[1] * x[2] * y[0] * y[1] * y[2])
    return XYZCheck(q, applicable, holds)


# ---------------------------------------------------------------------------
# empirical supremum estimation


@dataclass(frozen=True)
class SupEstimate:
    """Best observed ratio value with its witness matrix; never an optimality claim."""

    empirical_sup: object
    argmax: SymMatrix
    evaluations: int


def _epsilon_family(eps) -> SymMatrix:
    """Boundary family with triangular ratio p12 p33 / (p13 p23) = 2/(1+eps)."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise DomainError("epsilon must lie in (0, 1]")
    return SymMatrix.from_rows([
        [eps, 1, 1],
        [1, eps, 1],
        [1, 1, Fraction(2, 1 + eps)],
    ])


def deterministic_probes(n):
    """Known Lorentzian families worth probing for any ratio of matching size."""
    probes = [SymMatrix.from_rows([[Fraction(1)] * n for _ in range(n)])]
    base = []
    if n == 5:
        base = [witness_pentagonal(t) for t in (1, Fraction(1, 10), Fraction(1, 100),
                                                Fraction(1, 1000), Fraction(1, 10000))]
    elif n == 3:
        base = [_epsilon_family(e) for e in (Fraction(1, 10), Fraction(1, 100),
                                             Fraction(1, 1000))]
    for m in base:
        for perm in itertools.permutations(range(1, n + 1)):
            probes.append(permute(m, perm))
    return probes


def estimate_sup(r: FullRatio, iterations, seed, config: SampleConfig = SampleConfig()) -> SupEstimate:
    """Maximize the ratio over seeded rank-2 samples plus deterministic witness
    families; returns the best value and its witness."""
    cert = is_bounded(r.reduced())
    if not cert.bounded:
        raise DomainError("supremum estimation requires a bounded ratio",
                          violating_subset=sorted(cert.violating_subset))
    best_val = None
    best_mat = None
    count = 0

    def consider(m):
        nonlocal best_val, best_mat, count
        value, _ = evaluate_with_flags(r, m)
        count += 1
        if best_val is None or value > best_val:
            best_val, best_mat = value, m

    for m in deterministic_probes(r.n):
        consider(m)
    rng = random.Random(derive_seed(seed, "estimate_sup"))
    for _ in range(int(iterations)):
        consider(rank2_hessian(draw_rank2_params(r.n, rng, config)))
    return SupEstimate(best_val, best_mat, count)
