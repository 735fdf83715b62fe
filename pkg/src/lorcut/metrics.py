"""Triangle-class membership for matrices, delta-hyperbolicity of log-metrics,
four-point testing, tree approximation via Gromov products, phylogenetic tree
reconstruction, and cut decompositions of tree metrics.

Log-metrics live over pairs (i, j), i < j, with implicit zero diagonal.  The
exact rational path is used for every certification; float paths carry an
absolute tolerance of 1e-9 on four-point slack.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

from ._util import frac_to_str, pair_index, pair_list, scalar_from_json
from .errors import DomainError, InvariantViolation, StructuralError
from .matrices import SymMatrix

FLOAT_SLACK_TOL = 1e-9


@dataclass(frozen=True)
class LogMetric:
    """Nonnegative pair-indexed distances (log-coordinates of a normalized matrix)."""

    n: int
    d: tuple
    kind: str

    @classmethod
    def from_values(cls, n, values):
        values = list(values)
        if len(values) != n * (n - 1) // 2:
            raise StructuralError("log-metric length mismatch")
        kinds = {("float" if isinstance(v, float) else "rational") for v in values}
        if len(kinds) > 1:
            raise StructuralError("log-metric mixes rational and float entries")
        kind = kinds.pop() if kinds else "rational"
        if kind == "rational":
            values = [Fraction(v) for v in values]
        elif any(not math.isfinite(v) for v in values):
            raise DomainError("log-metric entries must be finite")
        if any(v < 0 for v in values):
            raise DomainError("log-metric entries must be nonnegative")
        return cls(n, tuple(values), kind)

    def entry(self, i, j):
        """Distance d_ij with 1-based labels; zero on the diagonal."""
        if i == j:
            return Fraction(0) if self.kind == "rational" else 0.0
        return self.d[pair_index(self.n)[(i, j)]]

    @property
    def is_rational(self):
        return self.kind == "rational"

    def to_exact(self):
        """Exact rational copy (floats are binary rationals, so this is lossless)."""
        return LogMetric.from_values(self.n, [Fraction(v) for v in self.d])


def log_metric_from_matrix(m: SymMatrix) -> LogMetric:
    """Entrywise log of a matrix after scaling the diagonal to 1; float output.

    Entries must be positive, and the off-diagonal must dominate the diagonal
    geometric means so the log-metric is nonnegative.
    """
    if not m.positive():
        raise DomainError("log-metric requires positive matrix entries")
    logs = [math.log(float(m.entries[i][i])) for i in range(m.n)]
    values = []
    for i, j in pair_list(m.n):
        v = math.log(float(m.entry(i, j))) - (logs[i - 1] + logs[j - 1]) / 2.0
        values.append(max(v, 0.0))
    return LogMetric.from_values(m.n, values)


# ---------------------------------------------------------------------------
# triangle-class membership for matrices


def _sqrt_le_sum(a, b, c):
    """Exact test of sqrt(a) <= sqrt(b) + sqrt(c) for nonnegative rationals."""
    if a <= b + c:
        return True
    return (a - b - c) ** 2 <= 4 * b * c


def _max_twice(values, exact, tol=FLOAT_SLACK_TOL):
    top = max(values)
    if exact:
        return sum(1 for v in values if v == top) >= 2
    second = sorted(values)[-2]
    return top - second <= tol * max(1.0, abs(top))


def in_delta_tp(m: SymMatrix, p) -> bool:
    """Membership in the T_p triangle class.

    p = 0: among the three products p_ij p_kl, p_ik p_jl, p_il p_jk the maximum
    is achieved at least twice for every index quadruple.  p > 0: the p-th-root
    triangle condition.  Exact for rational matrices when p = 0 or p = 2/k for
    an integer k; float comparisons with relative tolerance 1e-9 otherwise.
    """
    if isinstance(p, float):
        p = p if p != int(p) else int(p)
    if not isinstance(p, float):
        p = Fraction(p)
    if p < 0:
        raise DomainError("p must be nonnegative")
    if not m.nonnegative():
        raise DomainError("triangle classes contain nonnegative matrices only")

    exact = m.is_rational
    k_exact = None
    if exact and p != 0 and not isinstance(p, float):
        two_over_p = 2 / p
        if two_over_p.denominator == 1:
            k_exact = two_over_p.numerator

    def e(i, j):
        return m.entry(i, j)

    def cond(a, b, c):
        """The (1/p)-power inequality a^(1/p) <= b^(1/p) + c^(1/p)."""
        if p == 0:
            return _max_twice([a, b, c], exact) or a <= max(b, c)
        if k_exact is not None:
            return _sqrt_le_sum(a**k_exact, b**k_exact, c**k_exact)
        fa, fb, fc = (float(x) for x in (a, b, c))
        inv = 1.0 / float(p)
        lhs = fa**inv
        rhs = fb**inv + fc**inv
        return lhs <= rhs + FLOAT_SLACK_TOL * max(1.0, lhs)

    def quad_ok(a, b, c):
        if p == 0:
            return _max_twice([a, b, c], exact)
        return cond(a, b, c) and cond(b, a, c) and cond(c, a, b)

    n = m.n
    for i, j, k, l in itertools.combinations(range(1, n + 1), 4):
        if not quad_ok(e(i, j) * e(k, l), e(i, k) * e(j, l), e(i, l) * e(j, k)):
            return False
    for k in range(1, n + 1):
        for i, j in itertools.combinations(range(1, n + 1), 2):
            if i == k or j == k:
                continue
            if not cond(e(i, j) * e(k, k), e(i, k) * e(j, k), e(i, k) * e(j, k)):
                return False
    for i, j in itertools.combinations(range(1, n + 1), 2):
        if not cond(e(i, i) * e(j, j), e(i, j) * e(i, j), e(i, j) * e(i, j)):
            return False
    return True


# ---------------------------------------------------------------------------
# hyperbolicity and the four-point condition


def _pair_sums(d: LogMetric, i, j, k, l):
    return (
        d.entry(i, j) + d.entry(k, l),
        d.entry(i, k) + d.entry(j, l),
        d.entry(i, l) + d.entry(j, k),
    )


def hyperbolicity_delta(d: LogMetric):
    """Smallest delta with d_ij + d_kl <= max(d_ik + d_jl, d_il + d_jk) + 2*delta
    over all index quadruples (repeats included, so the relaxed triangle
    inequality is part of the condition)."""
    zero = Fraction(0) if d.is_rational else 0.0
    worst = zero
    for i, j, k, l in itertools.combinations(range(1, d.n + 1), 4):
        s = sorted(_pair_sums(d, i, j, k, l))
        worst = max(worst, s[2] - s[1])
    for k in range(1, d.n + 1):
        for i, j in itertools.combinations(range(1, d.n + 1), 2):
            if i == k or j == k:
                continue
            worst = max(worst, d.entry(i, j) - d.entry(i, k) - d.entry(j, k))
    return max(worst, zero) / 2


def find_four_point_violation(d: LogMetric, tol=None):
    """First violated tree-metric condition, or None.

    Returns ('quadruple'|'triangle'|'negative', indices) naming the failure.
    """
    if tol is None:
        tol = 0 if d.is_rational else FLOAT_SLACK_TOL
    for idx, v in enumerate(d.d):
        if v < -tol:
            return ("negative", pair_list(d.n)[idx])
    for k in range(1, d.n + 1):
        for i, j in itertools.combinations(range(1, d.n + 1), 2):
            if i == k or j == k:
                continue
            if d.entry(i, j) - d.entry(i, k) - d.entry(j, k) > tol:
                return ("triangle", (i, j, k))
    for i, j, k, l in itertools.combinations(range(1, d.n + 1), 4):
        s = sorted(_pair_sums(d, i, j, k, l))
        if s[2] - s[1] > tol:
            return ("quadruple", (i, j, k, l))
    return None


def four_point_check(d: LogMetric) -> bool:
    """True iff d is a tree metric: nonnegative, triangle-consistent, and the
    maximum of the three pair-sums is achieved at least twice on every
    quadruple.  Exact on the rational path."""
    return find_four_point_violation(d) is None


# ---------------------------------------------------------------------------
# tree approximation via Gromov products


def _shortest_path_heights(d: LogMetric, w):
    """Graph-shortest-path distances to the basepoint; equal to d_xw whenever d
    satisfies the triangle inequality, and never larger."""
    n = d.n
    h = [d.entry(x, w) for x in range(1, n + 1)]
    for _ in range(n):
        changed = False
        for x in range(1, n + 1):
            for z in range(1, n + 1):
                if z == x:
                    continue
                cand = h[z - 1] + d.entry(x, z)
                if cand < h[x - 1]:
                    h[x - 1] = cand
                    changed = True
        if not changed:
            break
    return h


def _bottleneck_closure(n, weight):
    """Maximin closure of symmetric edge weights on the complete graph over
    nodes 0..n-1, via maximum-spanning-tree bottlenecks."""
    in_tree = [False] * n
    best = [None] * n
    best_edge = [None] * n
    in_tree[0] = True
    for v in range(1, n):
        best[v] = weight(0, v)
        best_edge[v] = 0
    adj = [[] for _ in range(n)]
    for _ in range(n - 1):
        u = max((v for v in range(n) if not in_tree[v]), key=lambda v: best[v])
        in_tree[u] = True
        adj[u].append((best_edge[u], best[u]))
        adj[best_edge[u]].append((u, best[u]))
        for v in range(n):
            if not in_tree[v]:
                wuv = weight(u, v)
                if wuv > best[v]:
                    best[v] = wuv
                    best_edge[v] = u
    closure = {}
    for src in range(n):
        stack = [(src, None, None)]
        while stack:
            node, parent, bottleneck = stack.pop()
            for nb, wgt in adj[node]:
                if nb == parent:
                    continue
                b = wgt if bottleneck is None else min(bottleneck, wgt)
                closure[(src, nb)] = b
                stack.append((nb, node, b))
    return closure


def gromov_tree_approx(d: LogMetric, basepoint=1) -> LogMetric:
    """Tree-metric approximation from below.

    Computes basepoint Gromov products (x|y)_w = (h_x + h_y - d_xy)/2 with
    shortest-path heights h, takes their maximin (bottleneck) closure via a
    maximum spanning tree, and returns d'_xy = h_x + h_y - 2(x|y)'_w.  The
    output always satisfies the four-point condition exactly (rational path),
    d' <= d coordinatewise, and max(d - d') <= 2*delta*ceil(log2 n) with delta
    the four-point hyperbolicity of d.  On semimetric inputs the heights are
    the basepoint distances themselves and this is the classical construction.
    """
    n = d.n
    if not 1 <= basepoint <= n:
        raise DomainError(f"basepoint must lie in 1..{n}")
    if n <= 2:
        return d
    h = _shortest_path_heights(d, basepoint)

    def product(u, v):
        return (h[u] + h[v] - d.entry(u + 1, v + 1)) / 2

    rho = _bottleneck_closure(n, product)
    values = []
    for i, j in pair_list(n):
        v = h[i - 1] + h[j - 1] - 2 * rho[(i - 1, j - 1)]
        if not d.is_rational and -1e-12 < v < 0:
            v = 0.0
        values.append(v)
    return LogMetric.from_values(n, values)


# ---------------------------------------------------------------------------
# phylogenetic trees


@dataclass(frozen=True)
class PhyloTree:
    """Tree with labeled leaves (labels 1..n) and nonnegative edge lengths.

    Canonical form: zero-length edges are contracted (labels may share a
    vertex), unlabeled degree-2 vertices are smoothed, and vertex ids are
    BFS-renumbered from the vertex of label 1.
    """

    n: int
    leaf_vertex: tuple
    edges: tuple

    @classmethod
    def build(cls, n, leaf_vertex, edges):
        leaf_vertex = list(leaf_vertex)
        if len(leaf_vertex) != n:
            raise StructuralError("leaf assignment length mismatch")
        edges = [(u, v, Fraction(l) if not isinstance(l, float) else l) for u, v, l in edges]
        if any(l < 0 for _, _, l in edges):
            raise DomainError("edge lengths must be nonnegative")
        return cls._canonicalize(n, leaf_vertex, edges)

    @classmethod
    def _canonicalize(cls, n, leaf_vertex, edges):
        parent = {}

        def find(x):
            root = x
            while root in parent:
                root = parent[root]
            while x in parent:
                parent[x], x = root, parent[x]
            return root

        vertices = set(leaf_vertex) | {u for u, _, _ in edges} | {v for _, v, _ in edges}
        for u, v, l in edges:
            if l == 0:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
        merged_edges = []
        for u, v, l in edges:
            if l == 0:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                raise StructuralError("cycle of zero-length edges with positive chord")
            merged_edges.append((ru, rv, l))
        leaf_vertex = [find(x) for x in leaf_vertex]
        labelled = set(leaf_vertex)

        # smooth unlabeled degree-2 vertices; prune unlabeled pendants
        adj = {}
        for u, v, l in merged_edges:
            adj.setdefault(u, {})[v] = adj.setdefault(u, {}).get(v, Fraction(0)) + 0 * l + l
            adj.setdefault(v, {})[u] = adj[u][v]
        for x in set(find(v) for v in vertices):
            adj.setdefault(x, {})
        changed = True
        while changed:
            changed = False
            for x in list(adj):
                if x in labelled:
                    continue
                nbrs = list(adj[x].items())
                if len(nbrs) == 2:
                    (a, la), (b, lb) = nbrs
                    if a == b:
                        raise StructuralError("parallel edges are not a tree")
                    del adj[x]
                    del adj[a][x]
                    del adj[b][x]
                    adj[a][b] = la + lb
                    adj[b][a] = la + lb
                    changed = True
                elif len(nbrs) <= 1:
                    for a, _ in nbrs:
                        del adj[a][x]
                    del adj[x]
                    changed = True

        # connectivity and acyclicity over the remaining graph
        all_vs = sorted(adj) or [leaf_vertex[0]]
        seen = {all_vs[0]}
        stack = [all_vs[0]]
        edge_count = sum(len(v) for v in adj.values()) // 2
        while stack:
            x = stack.pop()
            for y in adj.get(x, {}):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if set(leaf_vertex) - seen or edge_count != len(seen) - 1:
            raise StructuralError("leaf vertices must span a single tree")

        order = {}
        queue = [leaf_vertex[0]]
        order[leaf_vertex[0]] = 0
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for y in sorted(adj.get(x, {})):
                if y not in order:
                    order[y] = len(order)
                    queue.append(y)
        new_edges = sorted(
            (min(order[u], order[v]), max(order[u], order[v]), l)
            for u in adj for v, l in adj[u].items() if order[u] < order[v]
        )
        return cls(n, tuple(order[x] for x in leaf_vertex), tuple(new_edges))

    def adjacency(self):
        adj = {v: {} for v in range(self.num_vertices)}
        for u, v, l in self.edges:
            adj[u][v] = l
            adj[v][u] = l
        return adj

    @property
    def num_vertices(self):
        top = max((max(u, v) for u, v, _ in self.edges), default=-1)
        return max(top, max(self.leaf_vertex, default=-1)) + 1


def tree_metric(tree: PhyloTree) -> LogMetric:
    """Pairwise leaf distances: sums of edge lengths along unique paths."""
    adj = tree.adjacency()
    dist_from = {}
    for label_v in set(tree.leaf_vertex):
        dist = {label_v: Fraction(0)}
        stack = [label_v]
        while stack:
            x = stack.pop()
            for y, l in adj[x].items():
                if y not in dist:
                    dist[y] = dist[x] + l
                    stack.append(y)
        dist_from[label_v] = dist
    values = []
    for i, j in pair_list(tree.n):
        values.append(dist_from[tree.leaf_vertex[i - 1]][tree.leaf_vertex[j - 1]])
    return LogMetric.from_values(tree.n, values)


def tree_reconstruct(d: LogMetric) -> PhyloTree:
    """The unique phylogenetic tree realizing a four-point metric.

    Iterative leaf insertion; exact when the input is rational.  Raises a
    domain error naming a violating quadruple when d fails the four-point
    condition.
    """
    if not d.is_rational:
        d = d.to_exact()
    violation = find_four_point_violation(d)
    if violation is not None:
        kind, idxs = violation
        raise DomainError(f"not a tree metric: {kind} condition fails at {idxs}",
                          kind=kind, indices=list(idxs))
    n = d.n
    if n == 1:
        return PhyloTree.build(1, (0,), ())
    adj = {0: {}, 1: {}}
    leaf_vertex = {1: 0, 2: 1}
    _link(adj, 0, 1, d.entry(1, 2))
    next_vertex = 2
    for k in range(3, n + 1):
        base = leaf_vertex[1]
        best_t = Fraction(0)
        best_j = None
        for j in range(2, k):
            t = (d.entry(1, k) + d.entry(1, j) - d.entry(j, k)) / 2
            if best_j is None or t > best_t:
                best_t, best_j = t, j
        attach = _point_on_path(adj, base, leaf_vertex[best_j], best_t, lambda: _fresh(adj))
        leaf_len = d.entry(1, k) - best_t
        if leaf_len < 0:
            raise InvariantViolation("negative leaf edge during reconstruction")
        v = _fresh(adj)
        _link(adj, attach, v, leaf_len)
        leaf_vertex[k] = v
        next_vertex = len(adj)
    edges = []
    for u in adj:
        for v, l in adj[u].items():
            if u < v:
                edges.append((u, v, l))
    tree = PhyloTree.build(n, tuple(leaf_vertex[i] for i in range(1, n + 1)), edges)
    if tree_metric(tree).d != d.d:
        raise InvariantViolation("reconstructed tree does not realize the metric")
    return tree


def _fresh(adj):
    v = len(adj)
    adj[v] = {}
    return v


def _link(adj, u, v, length):
    adj[u][v] = length
    adj[v][u] = length


def _point_on_path(adj, src, dst, t, make_vertex):
    """Vertex at distance t from src along the path to dst, splitting an edge
    if t falls strictly inside it."""
    if t == 0 or src == dst:
        return src
    prev = {src: None}
    stack = [src]
    while stack:
        x = stack.pop()
        if x == dst:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    path.reverse()
    acc = Fraction(0)
    for u, v in zip(path, path[1:]):
        step = adj[u][v]
        if acc + step == t:
            return v
        if acc + step > t:
            mid = make_vertex()
            del adj[u][v]
            del adj[v][u]
            _link(adj, u, mid, t - acc)
            _link(adj, mid, v, acc + step - t)
            return mid
        acc += step
    raise InvariantViolation("attachment point beyond path end")


@dataclass(frozen=True)
class CutDecomposition:
    """Terms (S(e), l(e)) with sum of l(e) * delta(S(e)) equal to the source metric."""

    n: int
    terms: tuple


def cut_decomposition(tree: PhyloTree, root_leaf=1) -> CutDecomposition:
    """One term per edge: S(e) = leaves still connected to the root leaf after
    deleting e, weighted by the edge length; zero-weight terms are dropped."""
    if not 1 <= root_leaf <= tree.n:
        raise DomainError(f"root leaf must lie in 1..{tree.n}")
    adj = tree.adjacency()
    root = tree.leaf_vertex[root_leaf - 1]
    parent = {root: None}
    order = [root]
    qi = 0
    while qi < len(order):
        x = order[qi]
        qi += 1
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
    below = {v: set() for v in order}
    for label, v in enumerate(tree.leaf_vertex, start=1):
        below[v].add(label)
    for x in reversed(order):
        if parent[x] is not None:
            below[parent[x]] |= below[x]
    all_labels = frozenset(range(1, tree.n + 1))
    terms = []
    for u, v, l in tree.edges:
        if l == 0:
            continue
        child = u if parent.get(u) == v else v
        root_side = all_labels - frozenset(below[child])
        canonical = root_side if 1 not in root_side else all_labels - root_side
        terms.append((canonical, l))
    terms.sort(key=lambda t: (len(t[0]), sorted(t[0])))
    return CutDecomposition(tree.n, tuple(terms))


def decomposition_metric(dec: CutDecomposition) -> LogMetric:
    """Sum of weighted cut vectors, for verifying the reconstruction identity."""
    from .cutcone import cut_vector

    coords = [Fraction(0)] * (dec.n * (dec.n - 1) // 2)
    for subset, weight in dec.terms:
        cv = cut_vector(dec.n, subset)
        coords = [c + weight * x for c, x in zip(coords, cv.coords)]
    return LogMetric.from_values(dec.n, coords)


# ---------------------------------------------------------------------------
# random trees (reproduction support)


def _random_topology(n, rng):
    """Random phylogenetic topology grown by edge splitting and occasional
    attachment at internal vertices."""
    if n < 2:
        return [0], [], 1
    edges = [(0, 1)]
    leaf_vertex = [0, 1]
    num = 2
    for _ in range(3, n + 1):
        internal = [v for v in range(num) if v not in leaf_vertex]
        if internal and rng.random() < 0.25:
            attach = rng.choice(internal)
        else:
            u, v = edges[rng.randrange(len(edges))]
            edges.remove((u, v))
            attach = num
            num += 1
            edges.append((u, attach))
            edges.append((attach, v))
        leaf = num
        num += 1
        edges.append((attach, leaf))
        leaf_vertex.append(leaf)
    return leaf_vertex, edges, num


def random_tree(n, rng, length_denominator=8, length_max_units=24) -> PhyloTree:
    """Seeded random phylogenetic tree with positive rational edge lengths."""
    leaf_vertex, edges, _ = _random_topology(n, rng)
    weighted = [(u, v, Fraction(rng.randint(1, length_max_units), length_denominator))
                for u, v in edges]
    return PhyloTree.build(n, leaf_vertex, weighted)


def random_tree_exponential_matrix(n, rng) -> SymMatrix:
    """Entrywise exponential of a random tree metric, with exact rational entries:
    each edge carries a rational multiplier and p_ij is the product along the
    leaf path, diagonal 1."""
    leaf_vertex, edges, num = _random_topology(n, rng)
    mult = {(min(u, v), max(u, v)): Fraction(8 + rng.randint(1, 16), 8) for u, v in edges}
    adj = {v: [] for v in range(num)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    prod_from = {}
    for src in set(leaf_vertex):
        prod = {src: Fraction(1)}
        stack = [src]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in prod:
                    prod[y] = prod[x] * mult[(min(x, y), max(x, y))]
                    stack.append(y)
        prod_from[src] = prod
    rows = [[Fraction(1)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = prod_from[leaf_vertex[i]][leaf_vertex[j]]
    return SymMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# JSON forms


def metric_to_json(d: LogMetric):
    body = {}
    for (i, j), v in zip(pair_list(d.n), d.d):
        body[f"{i},{j}"] = v if isinstance(v, float) else frac_to_str(v)
    return {"n": d.n, "d": body}


def metric_from_json(data) -> LogMetric:
    n = data["n"]
    idx = pair_index(n)
    values = [Fraction(0)] * (n * (n - 1) // 2)
    kinds = set()
    for key, val in data.get("d", {}).items():
        i, j = (int(x) for x in key.split(","))
        parsed = scalar_from_json(val)
        kinds.add(isinstance(parsed, float))
        values[idx[(i, j)]] = parsed
    if True in kinds:
        values = [float(v) for v in values]
    return LogMetric.from_values(n, values)


def tree_to_json(tree: PhyloTree):
    return {
        "leaves": list(tree.leaf_vertex),
        "edges": [
            {"u": u, "v": v, "len": l if isinstance(l, float) else frac_to_str(l)}
            for u, v, l in tree.edges
        ],
    }


def tree_from_json(data) -> PhyloTree:
    leaves = data["leaves"]
    edges = [(e["u"], e["v"], scalar_from_json(e["len"])) for e in data["edges"]]
    return PhyloTree.build(len(leaves), leaves, edges)
