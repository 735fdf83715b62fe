"""Shared helpers: pair indexing, exact linear algebra, scalar JSON codecs, seeding."""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import functools
import hashlib
import math

from .errors import StructuralError


@functools.lru_cache(maxsize=None)
def pair_list(n):
    """Unordered pairs (i, j), 1-based, i < j, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


@functools.lru_cache(maxsize=None)
def pair_index(n):
    """Map (i, j) -> position in pair_list(n); accepts either orientation."""
    idx = {}
    for k, (i, j) in enumerate(pair_list(n)):
        idx[(i, j)] = k
        idx[(j, i)] = k
    return idx


def n_from_pair_count(m):
    n = int((1 + math.isqrt(1 + 8 * m)) // 2)
    if n * (n - 1) // 2 != m:
        raise StructuralError(f"{m} is not a binomial coefficient C(n,2)")
    return n


def ceil_log2(n):
    return max(0, (int(n) - 1).bit_length())


# ---------------------------------------------------------------------------
# scalar codecs: rationals as "p/q" strings, floats as JSON numbers


def frac_to_str(x):
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def frac_from_str(s):
    if "/" in s:
        num, den = s.split("/")
        f = Fraction(int(num), int(den))
    else:
        f = Fraction(int(s))
    return f


def scalar_to_json(x):
    if isinstance(x, float):
        return x
    return frac_to_str(x)


def scalar_from_json(v):
    if isinstance(v, str):
        return frac_from_str(v)
    if isinstance(v, bool):
        raise StructuralError("boolean is not a scalar")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise StructuralError(f"cannot parse scalar {v!r}")


# ---------------------------------------------------------------------------
# exact integer/rational linear algebra (desk-scale sizes)


def primitive_vector(vec):
    """Divide an integer vector by the gcd of its entries (zero vector unchanged)."""
    g = 0
    for v in vec:
        g = math.gcd(g, abs(v))
    if g <= 1:
        return tuple(vec)
    return tuple(v // g for v in vec)


def clear_denominators(rows):
    """Scale a matrix of Fractions to integers by the lcm of all denominators."""
    lcm = 1
    for row in rows:
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return [[int(x * lcm) for x in row] for row in rows], lcm


def int_rank(rows):
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(ncols):
        pivot = None
        for r in range(row, nrows):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        for r in range(row + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[r][c] * m[row][col] - m[r][col] * m[row][c]) // prev
            m[r][col] = 0
        prev = m[row][col]
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def fraction_rank(rows):
    ints, _ = clear_denominators([[Fraction(x) for x in row] for row in rows])
    return int_rank(ints)


def solve_unit_columns(a_rows):
    """Invert a square Fraction matrix via Gauss-Jordan; returns the inverse rows.

    Raises StructuralError when the matrix is singular.
    """
    n = len(a_rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a_rows)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if aug[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise StructuralError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# seeding and parallel sections


def derive_seed(root_seed, label):
    """Stable child seed derived from a root seed and a label string."""
    digest = hashlib.sha256(f"{root_seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def parallel_map(fn, items, threads=None):
    """Order-preserving map over items; threaded when threads > 1.

    Results are independent of the thread count.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
