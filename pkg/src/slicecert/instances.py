"""Seeded instance generators for the randomized property suites.

Every generator draws from a caller-supplied :class:`random.Random` so
that suites and the command line reproduce identical instances for a
given seed.  All outputs are exact: metrics are rational shortest-path
closures, trees carry rational edge lengths, and span coefficients are
small fractions with power-of-two denominators.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .dyadic import Node, TreeSpanElement, descendants, l1_norm, span_element
from .freespace import (
    FreeElement,
    LipschitzFunction,
    element_from_coeffs,
    mcshane_extend,
)
from .metric import FiniteMetricSpace
from .rtree import (
    Combination,
    RTreeSubset,
    TreePoint,
    WeightedTree,
    edge_point,
    member_space,
    vertex_point,
)

_DENOMINATORS = (1, 2, 4)


def random_metric_space(
    rng: Random, *, min_points: int = 2, max_points: int = 8
) -> FiniteMetricSpace:
    """A pointed metric space with rational shortest-path distances.

    Random positive rational weights on the complete graph are closed
    under shortest paths, which guarantees the triangle inequality (and
    positivity, since all weights are positive).
    """
    n = rng.randint(min_points, max_points)
    names = tuple(f"p{i}" for i in range(n))
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = Fraction(rng.randint(1, 16), rng.choice(_DENOMINATORS))
            dist[i][j] = dist[j][i] = w
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = dist[i][k] + dist[k][j]
                if i != j and via < dist[i][j]:
                    dist[i][j] = dist[j][i] = via
    table: dict[tuple[str, str], Fraction] = {}
    for i in range(n):
        for j in range(i + 1, n):
            a, b = names[i], names[j]
            key = (a, b) if a <= b else (b, a)
            table[key] = dist[i][j]
    return FiniteMetricSpace(points=names, base=names[0], dist=table)


def random_free_element(
    rng: Random, space: FiniteMetricSpace, *, max_atoms: int = 6
) -> FreeElement:
    """A nonzero finitely supported element with small rational weights."""
    points = list(space.points)
    k = rng.randint(1, min(max_atoms, len(points)))
    coeffs: dict[str, Fraction] = {}
    for p in rng.sample(points, k):
        coeffs[p] = Fraction(rng.randint(-8, 8), rng.choice(_DENOMINATORS))
    el = element_from_coeffs(space, coeffs)
    if not el.coeffs:
        fallback = next(p for p in space.points if p != space.base)
        el = element_from_coeffs(space, {fallback: Fraction(1)})
    return el


def random_weighted_tree(
    rng: Random, *, min_vertices: int = 2, max_vertices: int = 10
) -> WeightedTree:
    """A random edge-weighted tree grown by attaching each vertex to an
    earlier one."""
    n = rng.randint(min_vertices, max_vertices)
    names = tuple(f"v{i}" for i in range(n))
    edges: dict[tuple[str, str], Fraction] = {}
    for i in range(1, n):
        parent = rng.randrange(i)
        w = Fraction(rng.randint(1, 8), rng.choice(_DENOMINATORS))
        edges[(names[parent], names[i])] = w
    return WeightedTree(vertices=names, edges=edges, base=names[0])


def full_subset(tree: WeightedTree) -> RTreeSubset:
    """The whole tree as a closed subset."""
    return RTreeSubset(
        tree=tree,
        members=frozenset(tree.vertices),
        full_edges=frozenset(tree.edges),
    )


def random_subset(rng: Random, tree: WeightedTree) -> RTreeSubset:
    """A random closed subtree containing the base vertex.

    Edges are kept with probability 3/4 walking outward from the base;
    when the walk keeps nothing and the tree has other vertices, the
    first base edge is added so the subset is never a single point.
    """
    adjacency: dict[str, list[tuple[str, tuple[str, str]]]] = {
        v: [] for v in tree.vertices
    }
    for (u, v) in sorted(tree.edges):
        adjacency[u].append((v, (u, v)))
        adjacency[v].append((u, (u, v)))
    members = {tree.base}
    kept: set[tuple[str, str]] = set()
    frontier = [tree.base]
    while frontier:
        cur = frontier.pop(0)
        for nb, edge in adjacency[cur]:
            if nb in members or edge in kept:
                continue
            if rng.random() < 0.75:
                kept.add(edge)
                members.add(nb)
                frontier.append(nb)
    if len(members) == 1 and len(tree.vertices) > 1:
        nb, edge = adjacency[tree.base][0]
        kept.add(edge)
        members.add(nb)
    return RTreeSubset(tree=tree, members=frozenset(members), full_edges=frozenset(kept))


def random_tree_point(rng: Random, tree: WeightedTree) -> TreePoint:
    """A vertex or an interior edge point with a small rational offset."""
    if rng.random() < 0.5 or len(tree.vertices) == 1:
        return vertex_point(rng.choice(sorted(tree.vertices)))
    u, v = rng.choice(sorted(tree.edges))
    length = tree.edge_length(u, v)
    offset = length * Fraction(rng.randint(1, 7), 8)
    return edge_point(tree, u, v, offset)


def _component_of_base(subset: RTreeSubset) -> list[str]:
    """Member vertices reachable from the base through full edges."""
    adjacency: dict[str, list[str]] = {v: [] for v in subset.tree.vertices}
    for (u, v) in subset.full_edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    seen = {subset.tree.base}
    stack = [subset.tree.base]
    while stack:
        cur = stack.pop()
        for nb in sorted(adjacency[cur]):
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return sorted(seen)


def _unit_weights(rng: Random, k: int) -> list[Fraction]:
    raw = [rng.randint(1, 8) for _ in range(k)]
    total = sum(raw)
    return [Fraction(w, total) for w in raw]


def path_aligned_instance(
    rng: Random, subset: RTreeSubset, *, max_atoms: int = 6
) -> tuple[Combination, LipschitzFunction] | None:
    """A norm-one combination of molecules along one geodesic, with a
    norming function.

    All molecules point the same way along a path between two members of
    the base component, so the arclength function norms every molecule
    simultaneously and the combination has free-space norm exactly 1.
    Returns ``None`` when the base component is a single vertex.
    """
    component = _component_of_base(subset)
    if len(component) < 2:
        return None
    a, b = rng.sample(component, 2)
    path = subset.tree.vertex_path(a, b)
    positions: dict[str, Fraction] = {path[0]: Fraction(0)}
    run = Fraction(0)
    for s, t in zip(path, path[1:]):
        run += subset.tree.edge_length(s, t)
        positions[t] = run
    k = rng.randint(1, max_atoms)
    combination: Combination = []
    for lam in _unit_weights(rng, k):
        i = rng.randrange(len(path) - 1)
        j = rng.randrange(i + 1, len(path))
        combination.append((lam, path[j], path[i]))
    space = member_space(subset)

    def arclength(p: str) -> Fraction:
        return (space.d(a, p) + space.d(a, b) - space.d(p, b)) / 2

    shift = arclength(space.base)
    f = LipschitzFunction(
        space=space, values={p: arclength(p) - shift for p in space.points}
    )
    return combination, f


def random_combination(
    rng: Random, subset: RTreeSubset, *, max_atoms: int = 6
) -> Combination | None:
    """An arbitrary convex combination of molecules between base-component
    members; the element may have norm below 1."""
    component = _component_of_base(subset)
    if len(component) < 2:
        return None
    k = rng.randint(1, max_atoms)
    combination: Combination = []
    for lam in _unit_weights(rng, k):
        x, y = rng.sample(component, 2)
        combination.append((lam, x, y))
    return combination


def supporting_functional(
    rng: Random, space: FiniteMetricSpace, x: str, y: str
) -> LipschitzFunction:
    """A random norm-one function attaining f(x) - f(y) = d(x, y).

    Values are pinned at x and y, extended to a random subset of points
    by sampling inside the exact feasibility interval, and completed by
    the largest 1-Lipschitz extension.  The result pairs to exactly 1
    with the molecule from x to y.
    """
    if x == y:
        raise ValueError("the attaining pair must be distinct")
    values: dict[str, Fraction] = {x: space.d(x, y), y: Fraction(0)}
    others = [p for p in space.points if p not in values]
    for p in rng.sample(others, rng.randint(0, len(others))):
        lo = max(values[q] - space.d(p, q) for q in values)
        hi = min(values[q] + space.d(p, q) for q in values)
        values[p] = lo + (hi - lo) * Fraction(rng.randint(0, 16), 16)
    return mcshane_extend(space, values)


def random_slice_width(rng: Random, *, low_32nds: int = 5) -> Fraction:
    """A slice width in {low/32, ..., 31/32}."""
    return Fraction(rng.randint(low_32nds, 31), 32)


def _node_pool(max_depth: int) -> list[Node]:
    return [t for d in range(1, max_depth + 1) for t in descendants((), d)]


def _random_coefficients(
    rng: Random, *, max_depth: int, max_nodes: int
) -> dict[Node, Fraction]:
    pool = _node_pool(max_depth)
    k = rng.randint(1, min(max_nodes, len(pool)))
    coeffs: dict[Node, Fraction] = {}
    for t in rng.sample(pool, k):
        num = rng.randint(-16, 16)
        coeffs[t] = Fraction(num if num else 1, rng.choice((1, 2, 4, 8)))
    return coeffs


def random_f_span(
    rng: Random, *, max_depth: int = 5, max_nodes: int = 6
) -> TreeSpanElement:
    """A nonzero combination of the normalized step functions."""
    return span_element(f=_random_coefficients(rng, max_depth=max_depth, max_nodes=max_nodes))


def random_h_span(
    rng: Random, *, max_depth: int = 3, max_nodes: int = 4
) -> TreeSpanElement:
    """A nonzero combination of the limit functions."""
    return span_element(h=_random_coefficients(rng, max_depth=max_depth, max_nodes=max_nodes))


def random_sphere_h_span(
    rng: Random, *, max_depth: int = 3, max_nodes: int = 4
) -> TreeSpanElement:
    """A limit-span element scaled exactly to norm one."""
    e = random_h_span(rng, max_depth=max_depth, max_nodes=max_nodes)
    return e * (Fraction(1) / l1_norm(e))


def random_cascade_vector(
    rng: Random, *, max_len: int = 8
) -> tuple[list[Fraction], int, int]:
    """Coefficients alpha_m..alpha_n with random endpoints 1 <= m <= n."""
    m = rng.randint(1, max_len)
    n = rng.randint(m, max_len)
    alpha = [
        Fraction(rng.randint(-16, 16), rng.choice((1, 2, 4, 8)))
        for _ in range(n - m + 1)
    ]
    return alpha, m, n


def random_positive_direction(
    rng: Random, *, strict: bool = True
) -> tuple[Fraction, Fraction]:
    """A nonzero direction in the closed (or open) positive quadrant."""
    if strict:
        return (
            Fraction(rng.randint(1, 32), 8),
            Fraction(rng.randint(1, 32), 8),
        )
    a = Fraction(rng.randint(0, 32), 8)
    b = Fraction(rng.randint(0, 32), 8)
    if a == 0 and b == 0:
        return (Fraction(1), Fraction(0))
    return (a, b)


def random_epsilon(rng: Random, *, sixteenths: tuple[int, int] = (1, 7)) -> Fraction:
    """A witness tolerance in {lo/16, ..., hi/16} (defaults stay below 1/2)."""
    return Fraction(rng.randint(*sixteenths), 16)
