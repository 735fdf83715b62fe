"""Exact sparse multivariate polynomials over arbitrary-precision integers and
the subtraction-free check for integral bounded ratios under the rank-2
substitution p_ij = a_i b_j + a_j b_i.

Variables are ordered a_1..a_n, b_1..b_n; exponent vectors have length 2n.
Terms live in a hash map keyed by exponent tuples; graded-lex ordering is used
only for serialization.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, StructuralError
from .ratios import FullRatio, is_bounded


class IntPoly:
    """Immutable sparse polynomial with integer coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, coef in (terms or {}).items():
            if coef == 0:
                continue
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise StructuralError("bad exponent vector")
            clean[tuple(exps)] = int(coef)
        self.terms = clean

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        if value == 0:
            return cls.zero(nvars)
        return cls(nvars, {(0,) * nvars: int(value)})

    @classmethod
    def monomial(cls, nvars, exps, coef=1):
        return cls(nvars, {tuple(exps): coef})

    @property
    def is_zero(self):
        return not self.terms

    @property
    def term_count(self):
        return len(self.terms)

    def _check_universe(self, other):
        if self.nvars != other.nvars:
            raise StructuralError("polynomials over different variable universes")

    def __eq__(self, other):
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check_universe(other)
        out = dict(self.terms)
        for exps, coef in other.terms.items():
            s = out.get(exps, 0) + coef
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return IntPoly(self.nvars, out)

    def __neg__(self):
        return IntPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_universe(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(key, 0) + c1 * c2
                if s:
                    out[key] = s
                else:
                    del out[key]
        return IntPoly(self.nvars, out)

    def __pow__(self, k):
        if k < 0:
            raise DomainError("polynomial powers must be nonnegative")
        result = IntPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, k):
        return IntPoly(self.nvars, {e: c * int(k) for e, c in self.terms.items()})

    def sorted_terms(self):
        """Terms in graded-lex order (total degree, then exponent vector)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def evaluate(self, values):
        if len(values) != self.nvars:
            raise StructuralError("evaluation point length mismatch")
        total = Fraction(0)
        for exps, coef in self.terms.items():
            term = Fraction(coef)
            for v, e in zip(values, exps):
                if e:
                    term *= Fraction(v) ** e
            total += term
        return total

    def to_json(self):
        return {"nvars": self.nvars,
                "terms": [{"exps": list(e), "coef": str(c)} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data):
        return cls(data["nvars"], {tuple(t["exps"]): int(t["coef"]) for t in data["terms"]})

    def __repr__(self):
        if self.is_zero:
            return "IntPoly(0)"
        bits = []
        for exps, coef in self.sorted_terms():
            factors = []
            for k, e in enumerate(exps):
                if not e:
                    continue
                name = f"a{k + 1}" if k < self.nvars // 2 else f"b{k + 1 - self.nvars // 2}"
                factors.append(name if e == 1 else f"{name}^{e}")
            bits.append(f"{coef}*{'*'.join(factors)}" if factors else str(coef))
        return "IntPoly(" + " + ".join(bits) + ")"


def poly_from_entry(i, j, n) -> IntPoly:
    """Rank-2 Hessian entry as a polynomial: a_i b_j + a_j b_i (2 a_i b_i when i = j)."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"entry indices must lie in 1..{n}")
    nv = 2 * n

    def mono(ai, bj):
        e = [0] * nv
        e[ai - 1] += 1
        e[n + bj - 1] += 1
        return tuple(e)

    if i == j:
        return IntPoly(nv, {mono(i, i): 2})
    return IntPoly(nv, {mono(i, j): 1, mono(j, i): 1})


def poly_mul(p: IntPoly, q: IntPoly) -> IntPoly:
    return p * q


def poly_sub(p: IntPoly, q: IntPoly) -> IntPoly:
    return p - q


def poly_scale(p: IntPoly, k) -> IntPoly:
    return p.scale(k)


@dataclass(frozen=True)
class SubfreeReport:
    """Outcome of the subtraction-free expansion; negative terms are the
    full counterexample certificate when the check fails."""

    holds: bool
    negative_terms: tuple
    term_count: int
    flags: tuple

    def to_json(self):
        return {
            "holds": self.holds,
            "negative_terms": [{"exps": list(e), "coef": str(c)} for e, c in self.negative_terms],
            "term_count": self.term_count,
            "flags": list(self.flags),
        }


def subfree_difference(r: FullRatio):
    """The expanded polynomial 2^(sum alpha_ii) * prod_{alpha_ij<0} p_ij^(-alpha_ij)
    - prod_{alpha_ij>0} p_ij^(alpha_ij), with flags describing rearrangements."""
    n = r.n
    nv = 2 * n
    flags = []
    neg = IntPoly.constant(nv, 1)
    pos = IntPoly.constant(nv, 1)
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            a = r.exponent(i, j)
            if a == 0:
                continue
            k = int(a)
            entry = poly_from_entry(i, j, n)
            if k > 0:
                pos = pos * entry**k
            else:
                neg = neg * entry**(-k)
    diag_sum = int(sum(r.diag))
    if diag_sum >= 0:
        diff = neg.scale(2**diag_sum) - pos
    else:
        # negative power of two: multiply the positive side instead
        flags.append("negative_diagonal_sum_rearranged")
        diff = neg - pos.scale(2**(-diag_sum))
    return diff, flags


def subfree_check(r: FullRatio) -> SubfreeReport:
    """Expand the difference for a certified integral bounded ratio and report
    the sign status of every coefficient."""
    if not r.is_integral:
        raise DomainError("subtraction-free check requires integral exponents")
    cert = is_bounded(r.reduced())
    if not cert.bounded:
        raise DomainError("subtraction-free check requires a bounded ratio",
                          violating_subset=sorted(cert.violating_subset))
    diff, flags = subfree_difference(r)
    negative = tuple((e, c) for e, c in diff.sorted_terms() if c < 0)
    return SubfreeReport(not negative, negative, diff.term_count, tuple(flags))
