"""Cut vectors, exact facet enumeration of the cut cone by the double
description method, symmetry-orbit classification, and hypermetric vectors.

Facet normals are oriented so that alpha . delta(S) <= 0 for every cut vector
delta(S): each facet normal doubles as a primitive bounded ratio without a
sign flip.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import os

import numpy as np

from ._util import (
    int_rank,
    pair_index,
    pair_list,
    parallel_map,
    primitive_vector,
    solve_unit_columns,
)
from .errors import CapabilityError, DomainError, ResourceLimitError, StructuralError

RESOURCE_LIMIT_ENV = "LR_RESOURCE_LIMIT_MB"


@dataclass(frozen=True)
class CutVector:
    """delta(S) over pairs (i, j), i < j; subset stored complement-normalized
    (the representative never contains label 1)."""

    n: int
    subset: frozenset
    coords: tuple

    @property
    def is_zero(self):
        return not self.subset


def cut_vector(n, subset) -> CutVector:
    s = frozenset(int(x) for x in subset)
    if any(x < 1 or x > n for x in s):
        raise DomainError(f"subset not within 1..{n}")
    if 1 in s:
        s = frozenset(range(1, n + 1)) - s
    coords = tuple(int((i in s) != (j in s)) for i, j in pair_list(n))
    return CutVector(n, s, coords)


def canonical_subsets(n):
    """Nonempty subsets of {2..n}, one per nonzero cut vector, in bitmask order."""
    ground = list(range(2, n + 1))
    for mask in range(1, 1 << (n - 1)):
        yield frozenset(ground[k] for k in range(n - 1) if mask >> k & 1)


def cut_cone_rays(n):
    """The 2^(n-1) - 1 canonical nonzero cut vectors generating the cut cone."""
    if not 2 <= n <= 8:
        raise CapabilityError(f"cut vectors supported for 2 <= n <= 8, got {n}")
    return [cut_vector(n, s) for s in canonical_subsets(n)]


@dataclass(frozen=True)
class FacetNormal:
    """Integer vector over pairs; enumerate_facets emits primitive vectors that
    are facet-defining for the cut cone."""

    n: int
    coords: tuple

    def primitive(self):
        return FacetNormal(self.n, primitive_vector(self.coords))


@dataclass(frozen=True)
class Orbit:
    representative: FacetNormal
    size: int


@dataclass(frozen=True)
class OrbitReport:
    orbits: tuple
    total: int


def _resource_limit_bytes():
    raw = os.environ.get(RESOURCE_LIMIT_ENV)
    if not raw:
        return None
    try:
        return int(raw) * 1024 * 1024
    except ValueError:
        raise StructuralError(f"{RESOURCE_LIMIT_ENV} must be an integer (megabytes)")


class _DoubleDescription:
    """Incremental double description for {x : a.x <= 0 for all rows a}.

    Rays are primitive integer vectors; zero sets are bitmasks over the
    inequalities processed so far.  Adjacency uses the combinatorial
    no-third-ray test behind a popcount prefilter, valid because the cone is
    pointed from the initial simplicial basis onward.
    """

    def __init__(self, dim, inequalities, limit_bytes=None):
        self.dim = dim
        self.ineqs = [tuple(a) for a in inequalities]
        self.limit_bytes = limit_bytes
        self.rays = []
        self.zerosets = []
        self.processed = []

    def _check_limit(self):
        if self.limit_bytes is None:
            return
        per_ray = 28 * (self.dim + 2) + 64
        used = len(self.rays) * per_ray + len(self.values) * len(self.rays) * 28
        if used > self.limit_bytes:
            raise ResourceLimitError(
                "enumeration memory limit exceeded",
                processed_inequalities=len(self.processed),
                total_inequalities=len(self.ineqs),
                current_rays=len(self.rays),
            )

    def _initial_basis(self):
        basis = []
        rows = []
        for idx, a in enumerate(self.ineqs):
            if int_rank(rows + [list(a)]) > len(rows):
                rows.append(list(a))
                basis.append(idx)
                if len(basis) == self.dim:
                    return basis
        raise StructuralError("inequalities do not span the ambient space")

    def run(self):
        basis = self._initial_basis()
        inv = solve_unit_columns([[Fraction(x) for x in self.ineqs[i]] for i in basis])
        for j in range(self.dim):
            col = [-inv[r][j] for r in range(self.dim)]
            denom_lcm = 1
            for x in col:
                denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
            ray = primitive_vector([int(x * denom_lcm) for x in col])
            self.rays.append(ray)
            self.zerosets.append(((1 << self.dim) - 1) ^ (1 << j))
        self.processed = list(basis)

        remaining = [i for i in range(len(self.ineqs)) if i not in basis]
        # cache a.r for every remaining inequality and current ray
        self.values = {i: [self._dot(self.ineqs[i], r) for r in self.rays] for i in remaining}

        while remaining:
            # dynamic ordering: fewest tight rays first, ties by input index
            nxt = min(remaining, key=lambda i: (sum(1 for v in self.values[i] if v == 0), i))
            remaining.remove(nxt)
            self._insert(nxt, self.values.pop(nxt), remaining)
            self._check_limit()
        return [primitive_vector(r) for r in self.rays]

    @staticmethod
    def _dot(a, r):
        return sum(x * y for x, y in zip(a, r))

    def _insert(self, ineq_idx, vals, remaining):
        bit = 1 << len(self.processed)
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        pos = [k for k, v in enumerate(vals) if v > 0]
        if not pos:
            for k in zero:
                self.zerosets[k] |= bit
            self.processed.append(ineq_idx)
            return

        mindim = self.dim - 2
        new_rays = []
        new_zero = []
        for p in pos:
            zp = self.zerosets[p]
            vp = vals[p]
            for q in neg:
                t = zp & self.zerosets[q]
                if t.bit_count() < mindim:
                    continue
                if not self._adjacent(t, p, q):
                    continue
                vq = vals[q]
                combo = [vp * rq - vq * rp for rp, rq in zip(self.rays[p], self.rays[q])]
                new_rays.append(primitive_vector(combo))
                new_zero.append(t | bit)

        keep = zero + neg
        self.rays = [self.rays[k] for k in keep] + new_rays
        zs = []
        for k in zero:
            zs.append(self.zerosets[k] | bit)
        for k in neg:
            zs.append(self.zerosets[k])
        self.zerosets = zs + new_zero
        for i in remaining:
            old = self.values[i]
            vals_i = [old[k] for k in keep]
            a = self.ineqs[i]
            vals_i.extend(self._dot(a, r) for r in new_rays)
            self.values[i] = vals_i
        self.processed.append(ineq_idx)

    def _adjacent(self, common, p, q):
        for k, z in enumerate(self.zerosets):
            if k != p and k != q and common & z == common:
                return False
        return True


def enumerate_facets(n, limit_mb=None):
    """Primitive facet normals of the cut cone, sorted lexicographically.

    Computes the extreme rays of {alpha : alpha . delta(S) <= 0 for all S} over
    exact rationals.  n = 7 is supported but long-running.
    """
    if not 3 <= n <= 7:
        raise CapabilityError(f"facet enumeration supported for 3 <= n <= 7, got {n}")
    limit_bytes = limit_mb * 1024 * 1024 if limit_mb is not None else _resource_limit_bytes()
    cuts = [c.coords for c in cut_cone_rays(n)]
    dd = _DoubleDescription(n * (n - 1) // 2, cuts, limit_bytes)
    rays = dd.run()
    rays.sort()
    return [FacetNormal(n, tuple(r)) for r in rays]


def rank_adjacency_check(n, zeroset_a, zeroset_b, inequalities):
    """Algebraic adjacency test: the common tight inequalities have rank dim-2."""
    common = zeroset_a & zeroset_b
    rows = [list(inequalities[k]) for k in range(len(inequalities)) if common >> k & 1]
    return int_rank(rows) == n * (n - 1) // 2 - 2


# ---------------------------------------------------------------------------
# orbit classification under the vertex-permutation action


_MAX_NUMPY_COORD = 2**31


def _permutation_gather(n):
    """Index arrays mapping pair positions under every vertex permutation."""
    pairs = pair_list(n)
    idx = pair_index(n)
    perms = list(itertools.permutations(range(1, n + 1)))
    gather = np.empty((len(perms), len(pairs)), dtype=np.int64)
    for r, perm in enumerate(perms):
        # position k of the permuted vector reads alpha at the preimage pair
        inv = {perm[k - 1]: k for k in range(1, n + 1)}
        for k, (i, j) in enumerate(pairs):
            gather[r, k] = idx[(inv[i], inv[j])]
    return gather


_GATHER_CACHE = {}


def _gather(n):
    if n not in _GATHER_CACHE:
        _GATHER_CACHE[n] = _permutation_gather(n)
    return _GATHER_CACHE[n]


def canonical_pair_vector(n, coords):
    """Lexicographic minimum of an integer pair-vector over all n! vertex
    permutations (brute force; n <= 7 keeps this trivial)."""
    coords = tuple(coords)
    if max((abs(c) for c in coords), default=0) < _MAX_NUMPY_COORD:
        arr = np.asarray(coords, dtype=np.int64)
        images = arr[_gather(n)]
        order = np.lexsort(images.T[::-1])
        return tuple(int(x) for x in images[order[0]])
    best = None
    m = len(coords)
    for row in _gather(n):
        img = tuple(coords[row[k]] for k in range(m))
        if best is None or img < best:
            best = img
    return best


def orbit_classify(normals, threads=None) -> OrbitReport:
    """Partition pair-vectors into vertex-permutation orbits.

    Orbit sizes count input members; representatives are the lex-minimal
    canonical forms, so the report is invariant under input shuffling.
    """
    normals = list(normals)
    if not normals:
        return OrbitReport((), 0)
    ns = {f.n for f in normals}
    if len(ns) != 1:
        raise StructuralError("orbit classification needs a single matrix size")
    n = ns.pop()
    forms = parallel_map(lambda f: canonical_pair_vector(n, f.coords), normals, threads)
    groups = {}
    for form in forms:
        groups[form] = groups.get(form, 0) + 1
    orbits = [Orbit(FacetNormal(n, rep), size) for rep, size in groups.items()]
    orbits.sort(key=lambda o: (-o.size, o.representative.coords))
    return OrbitReport(tuple(orbits), len(normals))


# ---------------------------------------------------------------------------
# hypermetric vectors


def hypermetric_ratio(h) -> FacetNormal:
    """The pair-vector (h_i h_j) for integer h with sum 1; always a reduced
    bounded ratio.  Validity against every cut vector is asserted, not assumed.
    """
    h = [int(x) for x in h]
    n = len(h)
    if sum(h) != 1:
        raise DomainError("hypermetric vector must have coordinate sum 1")
    coords = tuple(h[i - 1] * h[j - 1] for i, j in pair_list(n))
    for s in canonical_subsets(n):
        hs = sum(h[x - 1] for x in s)
        value = hs * (1 - hs)
        dot = sum(c * d for c, d in zip(coords, cut_vector(n, s).coords))
        assert dot == value and dot <= 0, "hypermetric validity failed"
    return FacetNormal(n, coords)


# ---------------------------------------------------------------------------
# JSON forms


def facets_to_json(n, facets):
    return {
        "n": n,
        "pairs": [f"{i},{j}" for i, j in pair_list(n)],
        "facets": [list(f.coords) for f in facets],
    }


def facets_from_json(data):
    n = data["n"]
    return [FacetNormal(n, tuple(int(x) for x in row)) for row in data["facets"]]


def orbit_report_to_json(report: OrbitReport):
    return {
        "total": report.total,
        "orbits": [
            {"representative": list(o.representative.coords), "size": o.size}
            for o in report.orbits
        ],
    }
