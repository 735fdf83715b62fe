"""Ratio algebra: exponent vectors over matrix entries, diagonal completion,
the named families (Alexandrov-Fenchel, triangular, pentagonal), exact
evaluation, boundedness certification against cut vectors, normalization, and
integral decomposition into primitive ratios.

A full ratio alpha satisfies the scaling balance 2*alpha_ii = -sum_j alpha_ij,
which makes its monomial invariant under the diagonal scaling action, so the
off-diagonal (reduced) part determines it.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

from ._util import fraction_rank, pair_index, pair_list
from .cutcone import FacetNormal, canonical_subsets, cut_vector
from .errors import CapabilityError, DomainError, InvariantViolation, StructuralError
from .matrices import SymMatrix


@dataclass(frozen=True)
class ReducedRatio:
    """Off-diagonal exponent vector over pairs (i, j), i < j, lex order."""

    n: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.n * (self.n - 1) // 2:
            raise StructuralError("reduced ratio length mismatch")

    @classmethod
    def from_coords(cls, n, coords):
        return cls(n, tuple(Fraction(x) for x in coords))

    @property
    def is_integral(self):
        return all(x.denominator == 1 for x in self.coords)

    def coordinate_sum(self):
        return sum(self.coords, Fraction(0))


@dataclass(frozen=True)
class FullRatio:
    """Exponent vector with diagonal entries, balanced for scaling invariance."""

    n: int
    offdiag: tuple
    diag: tuple

    def __post_init__(self):
        if len(self.offdiag) != self.n * (self.n - 1) // 2 or len(self.diag) != self.n:
            raise StructuralError("full ratio length mismatch")
        idx = pair_index(self.n)
        for i in range(1, self.n + 1):
            row = sum((self.offdiag[idx[(i, j)]] for j in range(1, self.n + 1) if j != i),
                      Fraction(0))
            if 2 * self.diag[i - 1] != -row:
                raise StructuralError(f"diagonal balance violated at index {i}")

    @property
    def is_integral(self):
        return (all(x.denominator == 1 for x in self.offdiag)
                and all(x.denominator == 1 for x in self.diag))

    def reduced(self) -> ReducedRatio:
        return ReducedRatio(self.n, self.offdiag)

    def exponent(self, i, j):
        """Exponent alpha_ij with 1-based labels."""
        if i == j:
            return self.diag[i - 1]
        return self.offdiag[pair_index(self.n)[(i, j)]]


def complete_diagonal(r: ReducedRatio) -> FullRatio:
    """Reconstruct the diagonal from the balance identity 2a_ii = -sum a_ij."""
    idx = pair_index(r.n)
    diag = []
    for i in range(1, r.n + 1):
        row = sum((r.coords[idx[(i, j)]] for j in range(1, r.n + 1) if j != i), Fraction(0))
        diag.append(-row / 2)
    return FullRatio(r.n, tuple(r.coords), tuple(diag))


def reduced_from_facet(f: FacetNormal) -> ReducedRatio:
    return ReducedRatio.from_coords(f.n, f.coords)


def full_from_facet(f: FacetNormal) -> FullRatio:
    return complete_diagonal(reduced_from_facet(f))


def full_from_h(h, n=None) -> FullRatio:
    """Full hypermetric-style ratio for an integer vector h with sum 1:
    offdiag alpha_ij = h_i h_j, diagonal alpha_ii = (h_i^2 - h_i)/2."""
    h = [int(x) for x in h]
    if n is None:
        n = len(h)
    if len(h) < n:
        h = h + [0] * (n - len(h))
    if sum(h) != 1:
        raise DomainError("exponent-generating vector must sum to 1")
    off = tuple(Fraction(h[i - 1] * h[j - 1]) for i, j in pair_list(n))
    diag = tuple(Fraction(h[i] * h[i] - h[i], 2) for i in range(n))
    return FullRatio(n, off, diag)


def named_ratio(kind, indices, n) -> FullRatio:
    """Named exponent families.

    kind 'alexandrov_fenchel' with (i, j); 'triangular' with (i, j, k) for the
    ratio p_ij p_kk / (p_ik p_jk); 'pentagonal' with (i, j, k, l, m) for
    p_ij p_ik p_jk p_ll p_lm p_mm / (p_il p_jl p_kl p_im p_jm p_km).
    Degenerate index multisets collapse along the family tower, e.g.
    pentagonal(i,j,k,k,k) equals triangular(i,j,k) and triangular(i,i,j)
    equals alexandrov_fenchel(i,j).
    """
    indices = [int(x) for x in indices]
    if any(x < 1 or x > n for x in indices):
        raise DomainError(f"indices must lie in 1..{n}")
    h = [0] * n
    if kind == "alexandrov_fenchel":
        i, j = indices
        h[i - 1] += 2
        h[j - 1] -= 1
    elif kind == "triangular":
        i, j, k = indices
        h[i - 1] += 1
        h[j - 1] += 1
        h[k - 1] -= 1
    elif kind == "pentagonal":
        i, j, k, l, m = indices
        for x in (i, j, k):
            h[x - 1] += 1
        for x in (l, m):
            h[x - 1] -= 1
    else:
        raise DomainError(f"unknown ratio kind {kind!r}")
    ratio = full_from_h(h, n)
    if all(x == 0 for x in ratio.offdiag):
        raise DomainError(f"index multiplicity {indices} degenerates to the zero ratio")
    return ratio


# ---------------------------------------------------------------------------
# evaluation


def evaluate_with_flags(r: FullRatio, m: SymMatrix):
    """Product of p_ij^alpha_ij over i <= j, diagonal included.

    Exact rational for integral exponents on rational matrices; float
    exponentials otherwise.  0^0 evaluates to 1 and is flagged.
    """
    if m.n != r.n:
        raise StructuralError("ratio and matrix sizes differ")
    flags = []
    entries = []
    for i in range(1, r.n + 1):
        for j in range(i, r.n + 1):
            a = r.exponent(i, j)
            if a == 0:
                if m.entry(i, j) == 0:
                    flags.append(f"zero_base_zero_exponent:{i},{j}")
                continue
            entries.append((i, j, a, m.entry(i, j)))

    if r.is_integral and m.is_rational:
        num = 1
        den = 1
        for i, j, a, p in entries:
            k = int(a)
            if p == 0:
                if k < 0:
                    raise DomainError(f"zero entry ({i},{j}) raised to negative power")
                return Fraction(0), flags
            if k > 0:
                num *= p.numerator**k
                den *= p.denominator**k
            else:
                num *= p.denominator**(-k)
                den *= p.numerator**(-k)
        return Fraction(num, den), flags

    log_sum = 0.0
    for i, j, a, p in entries:
        if p < 0 or (p == 0 and a < 0):
            raise DomainError(f"entry ({i},{j}) invalid for exponent {a}")
        if p == 0:
            return 0.0, flags
        log_sum += float(a) * math.log(float(p))
    return math.exp(log_sum), flags


def evaluate(r: FullRatio, m: SymMatrix):
    value, _ = evaluate_with_flags(r, m)
    return value


# ---------------------------------------------------------------------------
# boundedness certification (cut-cone duality)


@dataclass(frozen=True)
class BoundednessCertificate:
    bounded: bool
    violating_subset: frozenset | None
    tight_subsets: tuple

    def __post_init__(self):
        if self.bounded == (self.violating_subset is not None):
            raise StructuralError("certificate must carry a violation exactly when unbounded")


def is_bounded(r: ReducedRatio) -> BoundednessCertificate:
    """alpha is a reduced bounded ratio iff alpha . delta(S) <= 0 for every cut
    vector; a violating subset is returned as the certificate otherwise."""
    if r.n > 20:
        raise CapabilityError("boundedness check enumerates 2^(n-1)-1 cuts; n <= 20 only")
    tight = []
    for s in canonical_subsets(r.n):
        dot = sum((c * d for c, d in zip(r.coords, cut_vector(r.n, s).coords)), Fraction(0))
        if dot > 0:
            return BoundednessCertificate(False, s, ())
        if dot == 0:
            tight.append(s)
    tight.sort(key=lambda s: (len(s), sorted(s)))
    return BoundednessCertificate(True, None, tuple(tight))


def tight_set_rank(r: ReducedRatio, cert: BoundednessCertificate) -> int:
    rows = [cut_vector(r.n, s).coords for s in cert.tight_subsets]
    return fraction_rank(rows) if rows else 0


def normalize_ratio(r: ReducedRatio) -> ReducedRatio:
    """Scale so the coordinate sum is -1 (well-defined: nonzero bounded ratios
    have negative coordinate sum)."""
    total = r.coordinate_sum()
    if all(x == 0 for x in r.coords):
        raise DomainError("zero ratio cannot be normalized")
    if total >= 0:
        raise InvariantViolation(
            "nonzero bounded ratio with nonnegative coordinate sum", coordinate_sum=str(total))
    return ReducedRatio(r.n, tuple(x / -total for x in r.coords))


# ---------------------------------------------------------------------------
# integral decomposition into primitives


def decompose(r: FullRatio, basis):
    """Nonnegative integer combination of basis ratios reproducing r exactly.

    Depth-first search over coefficients with residual feasibility pruning:
    the residual must stay in the dual cut cone at every step.  The total
    coefficient budget is the L1 weight of r.  Returns [(basis_index, coeff)]
    or None when no combination exists within the budget.
    """
    if not r.is_integral:
        raise DomainError("decomposition requires an integral ratio")
    if not is_bounded(r.reduced()).bounded:
        raise DomainError("decomposition requires a bounded ratio")
    cuts = [cut_vector(r.n, s).coords for s in canonical_subsets(r.n)]
    basis_vecs = [tuple(int(x) for x in b.coords) for b in basis]
    target = tuple(int(x) for x in r.offdiag)
    budget = int(sum(abs(x) for x in r.offdiag) + sum(abs(x) for x in r.diag))

    def feasible(vec):
        return all(sum(c * d for c, d in zip(vec, cut)) <= 0 for cut in cuts)

    def search(pos, residual, budget_left, picked):
        if all(x == 0 for x in residual):
            return picked
        if pos == len(basis_vecs) or budget_left == 0:
            return None
        b = basis_vecs[pos]
        # try the largest usable coefficient first to reach exact matches fast
        k = 0
        candidates = [0]
        vec = residual
        while k < budget_left:
            vec = tuple(x - y for x, y in zip(vec, b))
            k += 1
            if not feasible(vec):
                break
            candidates.append(k)
        for k in reversed(candidates):
            vec = tuple(x - k * y for x, y in zip(residual, b))
            found = search(pos + 1, vec, budget_left - k,
                           picked + ([(pos, k)] if k else []))
            if found is not None:
                return found
        return None

    return search(0, target, budget, [])


def decompose_sum(result, basis, n) -> FullRatio:
    """Re-sum a decomposition as a full ratio (used to verify exactness)."""
    coords = [Fraction(0)] * (n * (n - 1) // 2)
    for idx, k in result:
        coords = [c + k * b for c, b in zip(coords, basis[idx].coords)]
    return complete_diagonal(ReducedRatio(n, tuple(coords)))


# ---------------------------------------------------------------------------
# JSON forms


def ratio_to_json(r: FullRatio):
    from ._util import frac_to_str

    off = {}
    for (i, j), x in zip(pair_list(r.n), r.offdiag):
        if x != 0:
            off[f"{i},{j}"] = frac_to_str(x)
    return {"n": r.n, "offdiag": off, "diag": [frac_to_str(x) for x in r.diag]}


def ratio_from_json(data) -> FullRatio:
    from ._util import frac_from_str

    n = data["n"]
    idx = pair_index(n)
    coords = [Fraction(0)] * (n * (n - 1) // 2)
    for key, val in data.get("offdiag", {}).items():
        i, j = (int(x) for x in key.split(","))
        coords[idx[(i, j)]] = frac_from_str(val) if isinstance(val, str) else Fraction(val)
    reduced = ReducedRatio(n, tuple(coords))
    if "diag" in data and data["diag"] is not None:
        diag = tuple(frac_from_str(x) if isinstance(x, str) else Fraction(x) for x in data["diag"])
        return FullRatio(n, reduced.coords, diag)
    return complete_diagonal(reduced)
