"""Finite R-trees: weighted trees with exact geodesic geometry.

A tree is a connected acyclic graph with positive rational edge lengths;
points of the underlying continuum are either vertices or interior edge
points (edge + offset).  The module provides exact distances, the
nearest-point retraction onto a geodesic segment, identity checks for the
retraction, closed subsets (member vertices + fully contained edges), the
linearized-projection splitting of free-space elements, the norming
function g for convex combinations of molecules, exact molecule
recombination along segments, and the Daugavet-type witness function
h = f + g built from a norming functional.

Free-space computations use the finite metric space of member vertices
with the tree metric; this does not change any transport value because
optimal transport over a metric never benefits from extra relay points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .freespace import (
    FreeElement,
    LipschitzFunction,
    add_elements,
    element_from_coeffs,
    eval_functional,
    free_norm,
    lip_norm,
    molecule,
    scale_element,
    sub_elements,
)
from .metric import FiniteMetricSpace
from .rational import fmt_rat, parse_rat

__all__ = [
    "WeightedTree",
    "TreePoint",
    "RTreeSubset",
    "vertex_point",
    "edge_point",
    "tree_distance",
    "walk_path",
    "retract",
    "RetractionIdentityReport",
    "retraction_identities_check",
    "segment_in_subset",
    "member_space",
    "combination_element",
    "LSplitReport",
    "l_projection_split",
    "g_mu_build",
    "GMuPropertyResult",
    "g_mu_property_check",
    "RecombinationResult",
    "recombine",
    "DaugavetWitnessReport",
    "daugavet_witness_h",
    "tree_to_json",
    "tree_from_json",
    "subset_to_json",
    "subset_from_json",
]


def _canon(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass
class WeightedTree:
    """Edge-weighted tree: |edges| = |vertices| - 1, connected, lengths > 0."""

    vertices: tuple[str, ...]
    edges: dict[tuple[str, str], Fraction]
    base: str

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        if self.base not in vs:
            raise ValueError("base vertex missing")
        canon_edges: dict[tuple[str, str], Fraction] = {}
        for (u, v), w in self.edges.items():
            if u not in vs or v not in vs or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
            w = Fraction(w)
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has nonpositive length")
            canon_edges[_canon(u, v)] = w
        self.edges = canon_edges
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError("a tree needs exactly |vertices| - 1 edges")
        self._adj: dict[str, list[tuple[str, Fraction]]] = {v: [] for v in self.vertices}
        for (u, v), w in self.edges.items():
            self._adj[u].append((v, w))
            self._adj[v].append((u, w))
        for v in self._adj:
            self._adj[v].sort()
        # Connectivity (acyclicity then follows from the edge count).
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            cur = stack.pop()
            for nb, _ in self._adj[cur]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != vs:
            raise ValueError("tree is not connected")
        self._vdist_cache: dict[tuple[str, str], Fraction] = {}
        self._path_cache: dict[tuple[str, str], list[str]] = {}

    def edge_length(self, u: str, v: str) -> Fraction:
        return self.edges[_canon(u, v)]

    def vertex_path(self, u: str, v: str) -> list[str]:
        """The unique vertex path from u to v (inclusive)."""
        key = (u, v)
        if key in self._path_cache:
            return self._path_cache[key]
        parent: dict[str, str] = {u: u}
        stack = [u]
        while stack and v not in parent:
            cur = stack.pop()
            for nb, _ in self._adj[cur]:
                if nb not in parent:
                    parent[nb] = cur
                    stack.append(nb)
        path = [v]
        while path[-1] != u:
            path.append(parent[path[-1]])
        path.reverse()
        self._path_cache[key] = path
        return path

    def vertex_distance(self, u: str, v: str) -> Fraction:
        key = (u, v) if u <= v else (v, u)
        if key not in self._vdist_cache:
            path = self.vertex_path(key[0], key[1])
            total = sum(
                (self.edge_length(a, b) for a, b in zip(path, path[1:])),
                Fraction(0),
            )
            self._vdist_cache[key] = total
        return self._vdist_cache[key]


@dataclass(frozen=True)
class TreePoint:
    """A point of the tree continuum: a vertex, or strictly inside an edge.

    Interior points store the canonical edge (endpoints sorted) and the
    offset from the first endpoint, with 0 < offset < length.
    """

    vertex: str | None = None
    edge: tuple[str, str] | None = None
    offset: Fraction | None = None

    def is_vertex(self) -> bool:
        return self.vertex is not None


def vertex_point(v: str) -> TreePoint:
    return TreePoint(vertex=v)


def edge_point(tree: WeightedTree, u: str, v: str, offset: Fraction) -> TreePoint:
    """The point at ``offset`` from u along edge (u, v); snaps to vertices."""
    length = tree.edge_length(u, v)
    offset = Fraction(offset)
    if not (0 <= offset <= length):
        raise ValueError("offset outside the edge")
    if offset == 0:
        return vertex_point(u)
    if offset == length:
        return vertex_point(v)
    a, b = _canon(u, v)
    return TreePoint(edge=(a, b), offset=offset if u == a else length - offset)


def tree_distance(tree: WeightedTree, p: TreePoint, q: TreePoint) -> Fraction:
    """Exact geodesic distance between two tree points."""
    if p.is_vertex() and q.is_vertex():
        return tree.vertex_distance(p.vertex, q.vertex)
    if p.is_vertex():
        p, q = q, p
    # p is interior on edge (a, b).
    a, b = p.edge
    length = tree.edge_length(a, b)
    if not q.is_vertex():
        if q.edge == p.edge:
            return abs(p.offset - q.offset)
        c, d = q.edge
        qlen = tree.edge_length(c, d)
        return min(
            p.offset + tree.vertex_distance(a, c) + q.offset,
            p.offset + tree.vertex_distance(a, d) + (qlen - q.offset),
            (length - p.offset) + tree.vertex_distance(b, c) + q.offset,
            (length - p.offset) + tree.vertex_distance(b, d) + (qlen - q.offset),
        )
    w = q.vertex
    return min(
        p.offset + tree.vertex_distance(a, w),
        (length - p.offset) + tree.vertex_distance(b, w),
    )


def walk_path(tree: WeightedTree, x: TreePoint, y: TreePoint, s: Fraction) -> TreePoint:
    """The point at arclength ``s`` along the geodesic from x to y."""
    total = tree_distance(tree, x, y)
    s = Fraction(s)
    if not (0 <= s <= total):
        raise ValueError("arclength outside the segment")
    if s == 0:
        return x
    if s == total:
        return y
    if not x.is_vertex() and not y.is_vertex() and x.edge == y.edge:
        a, b = x.edge
        direction = 1 if y.offset > x.offset else -1
        return edge_point(tree, a, b, x.offset + direction * s)

    # Exit vertices: the endpoint through which the geodesic leaves the
    # starting (resp. enters the finishing) edge.
    def exit_vertex(p: TreePoint, other: TreePoint) -> tuple[str, Fraction]:
        if p.is_vertex():
            return p.vertex, Fraction(0)
        a, b = p.edge
        length = tree.edge_length(a, b)
        via_a = p.offset + tree_distance(tree, vertex_point(a), other)
        via_b = (length - p.offset) + tree_distance(tree, vertex_point(b), other)
        return (a, p.offset) if via_a < via_b else (b, length - p.offset)

    ex, dx = exit_vertex(x, y)
    ey, dy = exit_vertex(y, x)
    if not x.is_vertex() and s < dx:
        a, b = x.edge
        toward = s if ex == b else -s
        return edge_point(tree, a, b, x.offset + toward)
    if not y.is_vertex() and s > total - dy:
        back = total - s  # distance from the target point to y
        a, b = y.edge
        toward = back if ey == b else -back
        return edge_point(tree, a, b, y.offset + toward)
    # The point lies on the vertex path from ex to ey.
    rem = s - dx
    if rem == 0:
        return vertex_point(ex)
    path = tree.vertex_path(ex, ey)
    cum = Fraction(0)
    for u, v in zip(path, path[1:]):
        w = tree.edge_length(u, v)
        if cum + w >= rem:
            return edge_point(tree, u, v, rem - cum)
        cum += w
    raise AssertionError("arclength not located on path")


def retract(tree: WeightedTree, x: TreePoint, y: TreePoint, p: TreePoint) -> TreePoint:
    """Nearest-point projection of p onto the geodesic segment [x, y].

    The projection sits at arclength (d(x,p) + d(x,y) - d(y,p)) / 2 from x.
    """
    if x == y:
        raise ValueError("segment endpoints must differ")
    s = (
        tree_distance(tree, x, p)
        + tree_distance(tree, x, y)
        - tree_distance(tree, y, p)
    ) / 2
    return walk_path(tree, x, y, s)


@dataclass
class RetractionIdentityReport:
    """Outcome of the projection identity checks for one (x, y, p, q)."""

    case: str  # "distinct" or "coincident"
    ok: bool
    details: list[str] = field(default_factory=list)


def retraction_identities_check(
    tree: WeightedTree, x: TreePoint, y: TreePoint, p: TreePoint, q: TreePoint
) -> RetractionIdentityReport:
    """Verify the two geodesic projection identities exactly.

    When the projections of p and q differ, d(p, q) decomposes as
    d(p, Yp) + d(Yp, Yq) + d(Yq, q).  When they coincide, every point r
    of [p, q] has the same projection (checked at the quarter points).
    """
    yp = retract(tree, x, y, p)
    yq = retract(tree, x, y, q)
    details: list[str] = []
    if yp != yq:
        lhs = tree_distance(tree, p, q)
        rhs = (
            tree_distance(tree, p, yp)
            + tree_distance(tree, yp, yq)
            + tree_distance(tree, yq, q)
        )
        ok = lhs == rhs
        if not ok:
            details.append(f"decomposition failed: {lhs} != {rhs}")
        return RetractionIdentityReport(case="distinct", ok=ok, details=details)
    dpq = tree_distance(tree, p, q)
    ok = True
    for k in (1, 2, 3):
        r = walk_path(tree, p, q, dpq * Fraction(k, 4))
        if retract(tree, x, y, r) != yp:
            ok = False
            details.append(f"constancy failed at quarter point {k}/4")
    return RetractionIdentityReport(case="coincident", ok=ok, details=details)


@dataclass
class RTreeSubset:
    """A closed subset: member vertices plus wholly contained edges."""

    tree: WeightedTree
    members: frozenset[str]
    full_edges: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        self.members = frozenset(self.members)
        vs = set(self.tree.vertices)
        if not self.members <= vs:
            raise ValueError("members must be tree vertices")
        canon = frozenset(_canon(u, v) for u, v in self.full_edges)
        for u, v in canon:
            if (u, v) not in self.tree.edges:
                raise ValueError(f"full edge ({u}, {v}) is not a tree edge")
            if u not in self.members or v not in self.members:
                raise ValueError(f"full edge ({u}, {v}) has a non-member endpoint")
        self.full_edges = canon
        self._space: FiniteMetricSpace | None = None


def segment_in_subset(subset: RTreeSubset, x: str, y: str) -> bool:
    """Whether the whole geodesic [x, y] lies inside the subset.

    x and y must be member vertices; the segment is contained iff every
    edge on the tree path is a full edge (hence all path vertices are
    members).
    """
    if x not in subset.members or y not in subset.members:
        raise ValueError("segment endpoints must be members")
    path = subset.tree.vertex_path(x, y)
    return all(_canon(u, v) in subset.full_edges for u, v in zip(path, path[1:]))


def member_space(subset: RTreeSubset) -> FiniteMetricSpace:
    """The finite metric space of member vertices with the tree metric."""
    if subset._space is None:
        if subset.tree.base not in subset.members:
            raise ValueError("the tree base must be a member vertex")
        pts = tuple(sorted(subset.members))
        dist = {
            (pts[i], pts[j]): subset.tree.vertex_distance(pts[i], pts[j])
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        }
        subset._space = FiniteMetricSpace(points=pts, base=subset.tree.base, dist=dist)
    return subset._space


Combination = list[tuple[Fraction, str, str]]


def combination_element(subset: RTreeSubset, combination: Combination) -> FreeElement:
    """The free element sum of lambda_i * molecule(x_i, y_i)."""
    space = member_space(subset)
    out = element_from_coeffs(space, {})
    for lam, xi, yi in combination:
        out = add_elements(out, scale_element(molecule(space, xi, yi), Fraction(lam)))
    return out


def _gromov(space: FiniteMetricSpace, x: str, y: str, p: str) -> Fraction:
    """d(x, Y_xy p): the arclength of the projection of p, measured from x."""
    return (space.d(x, p) + space.d(x, y) - space.d(p, y)) / 2


@dataclass
class LSplitReport:
    """Projection splitting of an element along a segment, with norms."""

    head: FreeElement
    tail: FreeElement
    norm_total: Fraction
    norm_head: Fraction
    norm_tail: Fraction
    additive: bool


def l_projection_split(
    subset: RTreeSubset, x: str, y: str, mu: FreeElement
) -> LSplitReport:
    """Split mu into its linearized projection onto [x, y] plus the rest.

    Every atom of mu (and the implicit balancing atom at the base) is
    pushed to its projection on [x, y]; the head is the resulting element,
    the tail is mu - head.  The report states whether the free norm is
    exactly additive across the split.  All projections must land on
    member vertices (guaranteed when [x, y] lies inside the subset).
    """
    if x == y:
        raise ValueError("segment endpoints must differ")
    space = member_space(subset)
    if mu.space != space:
        raise ValueError("element must live on the member space")
    balance = -sum(mu.coeffs.values(), Fraction(0))
    atoms = dict(mu.coeffs)
    if balance != 0:
        atoms[space.base] = atoms.get(space.base, Fraction(0)) + balance
    tx, ty = vertex_point(x), vertex_point(y)
    head_coeffs: dict[str, Fraction] = {}
    for p, c in sorted(atoms.items()):
        z = retract(subset.tree, tx, ty, vertex_point(p))
        if not z.is_vertex() or z.vertex not in subset.members:
            raise ValueError(
                f"projection of {p} lands outside the member set; "
                "the segment [x, y] must lie inside the subset"
            )
        head_coeffs[z.vertex] = head_coeffs.get(z.vertex, Fraction(0)) + c
    head = element_from_coeffs(space, head_coeffs)
    tail = sub_elements(mu, head)
    norm_total = free_norm(mu)
    norm_head = free_norm(head)
    norm_tail = free_norm(tail)
    return LSplitReport(
        head=head,
        tail=tail,
        norm_total=norm_total,
        norm_head=norm_head,
        norm_tail=norm_tail,
        additive=norm_total == norm_head + norm_tail,
    )


def _validate_combination(subset: RTreeSubset, combination: Combination) -> None:
    if not combination:
        raise ValueError("combination must be nonempty")
    total = Fraction(0)
    for lam, xi, yi in combination:
        lam = Fraction(lam)
        if lam <= 0:
            raise ValueError("combination weights must be positive")
        if xi == yi:
            raise ValueError("molecule endpoints must be distinct")
        if xi not in subset.members or yi not in subset.members:
            raise ValueError("molecule endpoints must be members")
        total += lam
    if total != 1:
        raise ValueError("combination weights must sum to 1")


def g_mu_build(
    subset: RTreeSubset, combination: Combination, f: LipschitzFunction
) -> LipschitzFunction:
    """The explicit norming function for a convex combination of molecules.

    g(p) = max_i ( f(x_i) - max_j d(x_i, proj_[x_i, y_j] p) ), shifted so
    the base value is 0.  Requires f to norm the combination exactly:
    lip_norm(f) <= 1 and <f, mu> = 1.  The result has lip_norm <= 1 and
    pairs to exactly 1 with the combination.
    """
    _validate_combination(subset, combination)
    space = member_space(subset)
    mu = combination_element(subset, combination)
    if lip_norm(f) > 1:
        raise ValueError("f must lie in the dual unit ball")
    if eval_functional(f, mu) != 1:
        raise ValueError("f must attain exactly 1 on the combination")
    xs = [xi for _, xi, _ in combination]
    ys = [yi for _, _, yi in combination]
    raw: dict[str, Fraction] = {}
    for p in space.points:
        best: Fraction | None = None
        for i, xi in enumerate(xs):
            reach = max(_gromov(space, xi, yj, p) for yj in ys)
            cand = f.values[xi] - reach
            if best is None or cand > best:
                best = cand
        raw[p] = best  # type: ignore[assignment]
    shift = raw[space.base]
    g = LipschitzFunction(space=space, values={p: v - shift for p, v in raw.items()})
    if lip_norm(g) > 1:
        raise AssertionError("norming function exceeded the dual ball")
    if eval_functional(g, mu) != 1:
        raise AssertionError("norming function does not attain 1")
    return g


@dataclass
class GMuPropertyResult:
    """Witness search outcome for the slice-projection property.

    If the molecule between u and v lies in the slice of width alpha, some
    pair (i, j) must satisfy (1 - alpha) d(u, v) < d(proj u, proj v) along
    the segment [x_i, y_j]; ``witness`` records the first such pair.
    Outside the slice the check is vacuous.
    """

    in_slice: bool
    witness: tuple[int, int] | None
    ok: bool

    def __bool__(self) -> bool:
        return self.ok


def g_mu_property_check(
    subset: RTreeSubset,
    combination: Combination,
    g: LipschitzFunction,
    u: str,
    v: str,
    alpha: Fraction,
) -> GMuPropertyResult:
    """Check the projection inequality for a molecule in a slice of g."""
    if u == v:
        raise ValueError("molecule endpoints must be distinct")
    alpha = Fraction(alpha)
    space = member_space(subset)
    value = eval_functional(g, molecule(space, u, v))
    in_slice = value > 1 - alpha
    if not in_slice:
        return GMuPropertyResult(in_slice=False, witness=None, ok=True)
    duv = space.d(u, v)
    xs = [xi for _, xi, _ in combination]
    ys = [yi for _, _, yi in combination]
    for i, xi in enumerate(xs):
        for j, yj in enumerate(ys):
            if xi == yj:
                continue
            su = _gromov(space, xi, yj, u)
            sv = _gromov(space, xi, yj, v)
            if (1 - alpha) * duv < abs(su - sv):
                return GMuPropertyResult(in_slice=True, witness=(i, j), ok=True)
    return GMuPropertyResult(in_slice=True, witness=None, ok=False)


@dataclass
class RecombinationResult:
    """Equivalent convex recombination with laminar segments.

    ``combination`` is the new list of (weight, from, to); the original
    element is preserved exactly, and for every ordered pair of distinct
    output segments, both endpoints of one project to a single endpoint
    of the other.
    """

    combination: Combination
    element_preserved: bool
    property2_ok: bool


def recombine(subset: RTreeSubset, combination: Combination) -> RecombinationResult:
    """Rewrite a convex combination of molecules over cut segments.

    Each segment [x_i, y_i] (which must lie inside the subset) is cut at
    the projections of all endpoints of all segments; the molecule along
    it splits into the proportional sum of the piece molecules.  Pieces
    are merged across segments.  If merging cancels any piece (possible
    only when the combination's element has norm < 1) the combination
    admits no convex recombination and a ValueError is raised.
    """
    _validate_combination(subset, combination)
    space = member_space(subset)
    for _, xi, yi in combination:
        if not segment_in_subset(subset, xi, yi):
            raise ValueError(f"segment [{xi}, {yi}] is not contained in the subset")
    endpoints = sorted(
        {xi for _, xi, _ in combination} | {yi for _, _, yi in combination}
    )
    merged: dict[tuple[str, str], Fraction] = {}
    for lam, xi, yi in combination:
        lam = Fraction(lam)
        path = subset.tree.vertex_path(xi, yi)
        cum: dict[str, Fraction] = {}
        run = Fraction(0)
        cum[path[0]] = run
        for a, b in zip(path, path[1:]):
            run += subset.tree.edge_length(a, b)
            cum[b] = run
        length = run
        cut_positions: set[Fraction] = set()
        for e in endpoints:
            cut_positions.add(_gromov(space, xi, yi, e))
        pos_to_vertex = {s: v for v, s in cum.items()}
        stations = sorted(cut_positions)
        for s in stations:
            if s not in pos_to_vertex:
                raise AssertionError("projection of a vertex missed the vertex path")
        for s0, s1 in zip(stations, stations[1:]):
            if s0 == s1:
                continue
            a, b = pos_to_vertex[s0], pos_to_vertex[s1]
            weight = lam * (s1 - s0) / length
            key, sign = ((a, b), 1) if a <= b else ((b, a), -1)
            merged[key] = merged.get(key, Fraction(0)) + sign * weight
    out: Combination = []
    total = Fraction(0)
    for (a, b), w in sorted(merged.items()):
        if w == 0:
            raise ValueError(
                "pieces cancel; the combination admits no convex recombination"
            )
        pair = (a, b) if w > 0 else (b, a)
        out.append((abs(w), pair[0], pair[1]))
        total += abs(w)
    if total != 1:
        raise ValueError(
            "pieces cancel; the combination admits no convex recombination"
        )
    before = combination_element(subset, combination)
    after = combination_element(subset, out)
    element_preserved = before.coeffs == after.coeffs
    property2_ok = True
    for j, (_, uj, vj) in enumerate(out):
        for k, (_, uk, vk) in enumerate(out):
            if j == k:
                continue
            s1 = _gromov(space, uj, vj, uk)
            s2 = _gromov(space, uj, vj, vk)
            if s1 != s2 or s1 not in (Fraction(0), space.d(uj, vj)):
                property2_ok = False
    return RecombinationResult(
        combination=out,
        element_preserved=element_preserved,
        property2_ok=property2_ok,
    )


@dataclass
class DaugavetWitnessReport:
    """The witness function h = f + g and its exactly checked identities.

    When the correction term vanishes on the combination (g_mu = 0), h is
    a norm-one functional with h(mu) = 1 that pushes the molecule from y
    to x up to 1 - 4*eps, so h(mu) - h(m_xy) = 2 - 4*eps.  A nonzero
    g_mu is reported as ``obstruction`` without claiming the identities.
    """

    h: LipschitzFunction
    g_values: dict[str, Fraction]
    g_mu: Fraction
    h_mu: Fraction
    h_m_yx: Fraction
    gap: Fraction
    lip_one: bool
    obstruction: str | None


def daugavet_witness_h(
    subset: RTreeSubset,
    mu: FreeElement,
    f: LipschitzFunction,
    x: str,
    y: str,
    eps: Fraction,
) -> DaugavetWitnessReport:
    """Build the slice-separating witness h = f + g for a normed element.

    Preconditions: the base vertex is x, f norms mu exactly
    (lip_norm(f) <= 1, <f, mu> = 1), 0 < eps < 1/2, and
    f(y) < (1 - 4 eps) d(x, y) — otherwise f itself already separates
    (the easy case, reported as an error).  f is extended to the whole
    tree by its largest 1-Lipschitz extension before evaluating at the
    projections onto [x, y], which may be non-member points.
    """
    eps = Fraction(eps)
    if not (0 < eps < Fraction(1, 2)):
        raise ValueError("eps must lie strictly between 0 and 1/2")
    space = member_space(subset)
    if mu.space != space or f.space != space:
        raise ValueError("element and functional must live on the member space")
    if x != space.base:
        raise ValueError("x must be the base vertex")
    if y not in subset.members or x == y:
        raise ValueError("y must be a member vertex distinct from x")
    if lip_norm(f) > 1 or eval_functional(f, mu) != 1:
        raise ValueError("f must norm the element exactly")
    if free_norm(mu) != 1:
        raise ValueError("element must lie on the unit sphere exactly")
    d = space.d(x, y)
    cap = (1 - 4 * eps) * d - f.values[y]
    if cap <= 0:
        raise ValueError(
            "easy case: f(y) >= (1 - 4 eps) d(x, y); f itself separates"
        )

    tx, ty = vertex_point(x), vertex_point(y)
    members = sorted(subset.members)

    def f_ext(z: TreePoint) -> Fraction:
        return max(
            f.values[a] - tree_distance(subset.tree, z, vertex_point(a))
            for a in members
        )

    g_values: dict[str, Fraction] = {}
    for p in space.points:
        z = retract(subset.tree, tx, ty, vertex_point(p))
        sz = tree_distance(subset.tree, tx, z)
        inner = max(sz - f_ext(z) - 2 * eps * d, Fraction(0))
        g_values[p] = min(inner, cap)
    h = LipschitzFunction(
        space=space,
        values={p: f.values[p] + g_values[p] for p in space.points},
    )
    g_mu = sum(
        (c * g_values[p] for p, c in mu.coeffs.items()), Fraction(0)
    )
    h_mu = eval_functional(h, mu)
    h_m_yx = eval_functional(h, molecule(space, y, x))
    gap = h_mu - eval_functional(h, molecule(space, x, y))
    lip_one = lip_norm(h) == 1
    obstruction = None
    if g_mu != 0:
        obstruction = f"g does not vanish on the element: g(mu) = {g_mu}"
    return DaugavetWitnessReport(
        h=h,
        g_values=g_values,
        g_mu=g_mu,
        h_mu=h_mu,
        h_m_yx=h_m_yx,
        gap=gap,
        lip_one=lip_one,
        obstruction=obstruction,
    )


def tree_to_json(tree: WeightedTree) -> dict:
    """Serialize as ``{"vertices": [...], "edges": [[u, v, "p/q"]], "base": v}``."""
    edges = [[u, v, fmt_rat(w)] for (u, v), w in sorted(tree.edges.items())]
    return {"vertices": sorted(tree.vertices), "edges": edges, "base": tree.base}


def tree_from_json(payload: object) -> WeightedTree:
    """Parse the object form produced by :func:`tree_to_json`.

    Raises ValueError on malformed documents (shape or value problems).
    """
    if not isinstance(payload, dict):
        raise ValueError("document must be a JSON object")
    try:
        vertices = payload["vertices"]
        base = payload["base"]
        raw_edges = payload["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing field: {exc}") from exc
    if (
        not isinstance(vertices, list)
        or not all(isinstance(v, str) for v in vertices)
        or not isinstance(base, str)
        or not isinstance(raw_edges, list)
    ):
        raise ValueError("bad field types")
    edges: dict[tuple[str, str], Fraction] = {}
    for entry in raw_edges:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ValueError("each edge must be [u, v, weight]")
        u, v, w = entry
        if not isinstance(u, str) or not isinstance(v, str):
            raise ValueError("edge endpoints must be vertex names")
        try:
            weight = parse_rat(str(w))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad edge weight for ({u}, {v}): {exc}") from exc
        edges[(u, v)] = weight
    return WeightedTree(vertices=tuple(vertices), edges=edges, base=base)


def subset_to_json(subset: RTreeSubset) -> dict:
    """Tree fields plus ``{"members": [...], "full_edges": [[u, v]]}``."""
    payload = tree_to_json(subset.tree)
    payload["members"] = sorted(subset.members)
    payload["full_edges"] = [list(e) for e in sorted(subset.full_edges)]
    return payload


def subset_from_json(payload: object) -> RTreeSubset:
    """Parse the object form produced by :func:`subset_to_json`."""
    tree = tree_from_json(payload)
    assert isinstance(payload, dict)
    try:
        members = payload["members"]
        full_edges = payload["full_edges"]
    except KeyError as exc:
        raise ValueError(f"missing field: {exc}") from exc
    if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
        raise ValueError("members must be a list of vertex names")
    if not isinstance(full_edges, list):
        raise ValueError("full_edges must be a list of pairs")
    pairs = set()
    for entry in full_edges:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValueError("each full edge must be [u, v]")
        u, v = entry
        if not isinstance(u, str) or not isinstance(v, str):
            raise ValueError("full edge endpoints must be vertex names")
        pairs.add((u, v))
    return RTreeSubset(
        tree=tree, members=frozenset(members), full_edges=frozenset(pairs)
    )
