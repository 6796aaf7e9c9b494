"""Exact Lipschitz-free space computations over a finite metric space.

Elements are finitely supported rational combinations of point evaluations
(the base point is identified with 0, so its coefficient is always dropped).
The norm is the optimal-transport value: the minimum cost of a flow on the
complete graph over the support plus the base point, with edge costs equal
to distances.  Every norm computation is certified on the spot: the solver
returns both an explicit feasible flow and a 1-Lipschitz potential that
attains the same value, and both sides are re-checked exactly before the
value is returned.

The dual objects are Lipschitz functions vanishing at the base point;
`mcshane_extend` produces the classical largest L-Lipschitz extension of a
partial assignment (shifted so the base value is 0).  Slices of the unit
ball, molecule elements, and denting-molecule certificates for the built-in
grid example spaces round out the module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .metric import ExampleSpace, FiniteMetricSpace, metric_segment
from .rational import fmt_rat, parse_rat

__all__ = [
    "FreeElement",
    "LipschitzFunction",
    "Slice",
    "element_from_coeffs",
    "zero_element",
    "molecule",
    "add_elements",
    "sub_elements",
    "scale_element",
    "lip_norm",
    "eval_functional",
    "mcshane_extend",
    "free_norm",
    "free_norm_certificate",
    "slice_members",
    "DentingCertificate",
    "denting_molecule_certificate",
    "certified_denting_pairs",
    "DentingDistanceRow",
    "DentingDistanceReport",
    "distance_to_denting_report",
    "element_to_json",
    "element_from_json",
    "function_to_json",
    "function_from_json",
]


@dataclass
class FreeElement:
    """A finitely supported element: sum of coeff * (evaluation at point).

    ``coeffs`` never contains the base point or zero coefficients; use
    :func:`element_from_coeffs` to build one from raw data.
    """

    space: FiniteMetricSpace
    coeffs: dict[str, Fraction] = field(default_factory=dict)

    def support(self) -> list[str]:
        return sorted(self.coeffs)


def element_from_coeffs(
    space: FiniteMetricSpace, coeffs: dict[str, Fraction]
) -> FreeElement:
    """Normalize raw coefficients: drop the base point and exact zeros."""
    clean: dict[str, Fraction] = {}
    for p, c in coeffs.items():
        if p not in space.points:
            raise KeyError(f"unknown point {p!r}")
        c = Fraction(c)
        if p == space.base or c == 0:
            continue
        clean[p] = c
    return FreeElement(space=space, coeffs=clean)


def zero_element(space: FiniteMetricSpace) -> FreeElement:
    return FreeElement(space=space, coeffs={})


def molecule(space: FiniteMetricSpace, p: str, q: str) -> FreeElement:
    """The normalized difference (delta_p - delta_q) / d(p, q).

    Requires p != q.  Coefficients at the base point are dropped, so for
    example the molecule from p to the base has the single coefficient
    1/d(p, base) at p.
    """
    if p == q:
        raise ValueError("molecule endpoints must be distinct")
    d = space.d(p, q)
    inv = Fraction(1) / d
    return element_from_coeffs(space, {p: inv, q: -inv})


def add_elements(a: FreeElement, b: FreeElement) -> FreeElement:
    if a.space is not b.space and a.space != b.space:
        raise ValueError("elements live on different spaces")
    out = dict(a.coeffs)
    for p, c in b.coeffs.items():
        out[p] = out.get(p, Fraction(0)) + c
    return element_from_coeffs(a.space, out)


def scale_element(a: FreeElement, s: Fraction) -> FreeElement:
    s = Fraction(s)
    return element_from_coeffs(a.space, {p: c * s for p, c in a.coeffs.items()})


def sub_elements(a: FreeElement, b: FreeElement) -> FreeElement:
    return add_elements(a, scale_element(b, Fraction(-1)))


@dataclass
class LipschitzFunction:
    """A rational-valued function on all points with value 0 at the base."""

    space: FiniteMetricSpace
    values: dict[str, Fraction]

    def __post_init__(self) -> None:
        missing = set(self.space.points) - set(self.values)
        if missing:
            raise ValueError(f"values missing for points {sorted(missing)}")
        extra = set(self.values) - set(self.space.points)
        if extra:
            raise ValueError(f"values for unknown points {sorted(extra)}")
        if self.values[self.space.base] != 0:
            raise ValueError("function must vanish at the base point")

    def __call__(self, p: str) -> Fraction:
        return self.values[p]


def lip_norm(f: LipschitzFunction) -> Fraction:
    """Exact best Lipschitz constant: max |f(p)-f(q)| / d(p,q)."""
    best = Fraction(0)
    for p, q in f.space.pairs():
        slope = abs(f.values[p] - f.values[q]) / f.space.d(p, q)
        if slope > best:
            best = slope
    return best


def eval_functional(f: LipschitzFunction, el: FreeElement) -> Fraction:
    """The pairing <f, el> = sum of coeff * f(point)."""
    if f.space != el.space:
        raise ValueError("functional and element live on different spaces")
    return sum((c * f.values[p] for p, c in el.coeffs.items()), Fraction(0))


def mcshane_extend(
    space: FiniteMetricSpace, partial: dict[str, Fraction]
) -> LipschitzFunction:
    """Largest L-Lipschitz extension of a partial assignment, base-shifted.

    L is the exact best Lipschitz constant of the partial data (0 for a
    single anchor).  The raw extension ext(p) = max over anchors a of
    (value(a) - L*d(p, a)) reproduces the partial data and has Lipschitz
    constant exactly L; the returned function is ext shifted by -ext(base)
    so that it vanishes at the base point.  When the partial data pins the
    base at 0 the shift is zero and the anchors are reproduced exactly.
    """
    if not partial:
        raise ValueError("partial assignment must contain at least one anchor")
    anchors = sorted(partial)
    for a in anchors:
        if a not in space.points:
            raise KeyError(f"unknown anchor point {a!r}")
    lip = Fraction(0)
    for i, a in enumerate(anchors):
        for b in anchors[i + 1 :]:
            slope = abs(partial[a] - partial[b]) / space.d(a, b)
            if slope > lip:
                lip = slope
    raw = {
        p: max(partial[a] - lip * space.d(p, a) for a in anchors)
        for p in space.points
    }
    shift = raw[space.base]
    return LipschitzFunction(
        space=space, values={p: v - shift for p, v in raw.items()}
    )


def _min_cost_transport(
    nodes: list[str],
    excess: dict[str, Fraction],
    dist,
) -> tuple[Fraction, dict[tuple[str, str], Fraction], dict[str, Fraction]]:
    """Successive-shortest-path min-cost flow on the complete graph.

    ``excess`` must sum to zero.  Arcs exist between every ordered pair
    with cost ``dist(u, v) >= 0`` and unlimited capacity.  Returns the
    exact optimal cost, the flow (at most one direction positive per
    pair), and the node potentials, which at optimality satisfy
    |pi(u) - pi(v)| <= dist(u, v) for every pair and are tight on flow
    arcs — so -pi is an optimal Kantorovich potential.
    """
    if sum(excess.values(), Fraction(0)) != 0:
        raise ValueError("excesses must balance")
    pi: dict[str, Fraction] = {u: Fraction(0) for u in nodes}
    flow: dict[tuple[str, str], Fraction] = {}

    def arc_cost(u: str, v: str) -> Fraction:
        # Cheapest residual arc u -> v: cancelling opposite flow costs -d.
        d = dist(u, v)
        return -d if flow.get((v, u), Fraction(0)) > 0 else d

    while True:
        sources = [u for u in nodes if excess[u] > 0]
        if not sources:
            break
        # Dijkstra from all sources on reduced costs (>= 0 throughout).
        distlab: dict[str, Fraction] = {u: Fraction(0) for u in sources}
        parent: dict[str, str] = {}
        done: set[str] = set()
        while len(done) < len(nodes):
            cur = None
            for u in nodes:
                if u in done or u not in distlab:
                    continue
                if cur is None or distlab[u] < distlab[cur]:
                    cur = u
            if cur is None:
                raise AssertionError("transport network disconnected")
            done.add(cur)
            for v in nodes:
                if v == cur or v in done:
                    continue
                red = arc_cost(cur, v) + pi[cur] - pi[v]
                if red < 0:
                    raise AssertionError("negative reduced cost in solver")
                cand = distlab[cur] + red
                if v not in distlab or cand < distlab[v]:
                    distlab[v] = cand
                    parent[v] = cur
        sinks = [u for u in nodes if excess[u] < 0]
        target = min(sinks, key=lambda u: (distlab[u], u))
        # Walk parents back to a source (sources keep label 0, no parent).
        path: list[str] = [target]
        while path[-1] in parent:
            path.append(parent[path[-1]])
        path.reverse()
        start = path[0]
        if start not in sources:
            raise AssertionError("augmenting path does not start at a source")
        # Cancelling arcs (cost -d) are capped by the opposite flow.
        amount = min(excess[start], -excess[target])
        for a, b in zip(path, path[1:]):
            back = flow.get((b, a), Fraction(0))
            if back > 0:
                amount = min(amount, back)
        for a, b in zip(path, path[1:]):
            back = flow.get((b, a), Fraction(0))
            if back > 0:
                if amount == back:
                    del flow[(b, a)]
                else:
                    flow[(b, a)] = back - amount
            else:
                flow[(a, b)] = flow.get((a, b), Fraction(0)) + amount
        excess[start] -= amount
        excess[target] += amount
        for u in nodes:
            pi[u] = pi[u] + distlab[u]
    cost = sum((f * dist(u, v) for (u, v), f in flow.items()), Fraction(0))
    return cost, flow, pi


def _solve_norm(
    el: FreeElement,
) -> tuple[Fraction, dict[tuple[str, str], Fraction], dict[str, Fraction]]:
    space = el.space
    nodes = sorted(set(el.coeffs) | {space.base})
    excess = {p: el.coeffs.get(p, Fraction(0)) for p in nodes}
    excess[space.base] = -sum(el.coeffs.values(), Fraction(0))
    value, flow, pi = _min_cost_transport(nodes, dict(excess), space.d)

    # Mandatory certificate check: primal feasibility + dual feasibility
    # + equality of both objective values, all exact.
    sent: dict[str, Fraction] = {p: Fraction(0) for p in nodes}
    for (u, v), f in flow.items():
        if f <= 0:
            raise AssertionError("nonpositive flow stored")
        sent[u] += f
        sent[v] -= f
    for p in nodes:
        want = el.coeffs.get(p, Fraction(0))
        if p == space.base:
            want = -sum(el.coeffs.values(), Fraction(0))
        if sent[p] != want:
            raise AssertionError("flow does not realize the element")
    potential = {p: pi[space.base] - pi[p] for p in nodes}
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            if abs(potential[u] - potential[v]) > space.d(u, v):
                raise AssertionError("dual potential exceeds Lipschitz bound")
    attained = sum(
        (c * potential[p] for p, c in el.coeffs.items()), Fraction(0)
    )
    if attained != value:
        raise AssertionError("dual value does not match flow cost")
    return value, flow, potential


def free_norm(el: FreeElement) -> Fraction:
    """Exact free-space (optimal transport) norm of an element."""
    if not el.coeffs:
        return Fraction(0)
    value, _, _ = _solve_norm(el)
    return value


def free_norm_certificate(el: FreeElement) -> tuple[Fraction, LipschitzFunction]:
    """Norm together with a norming 1-Lipschitz function on all points.

    The returned function f satisfies lip_norm(f) <= 1, f(base) = 0 and
    <f, el> == free_norm(el); it is the McShane extension of the optimal
    transport potentials on the participating nodes.
    """
    if not el.coeffs:
        f = LipschitzFunction(
            el.space, {p: Fraction(0) for p in el.space.points}
        )
        return Fraction(0), f
    value, _, potential = _solve_norm(el)
    f = mcshane_extend(el.space, potential)
    if eval_functional(f, el) != value or lip_norm(f) > 1:
        raise AssertionError("certificate extension failed")
    return value, f


@dataclass
class Slice:
    """The slice {mu in unit ball : <functional, mu> > 1 - alpha}."""

    functional: LipschitzFunction
    alpha: Fraction

    def __post_init__(self) -> None:
        self.alpha = Fraction(self.alpha)
        if not (0 < self.alpha <= 2):
            raise ValueError("slice width must satisfy 0 < alpha <= 2")


def slice_members(sl: Slice, candidates: list[FreeElement]) -> list[bool]:
    """Exact slice membership for each candidate element.

    The slice functional must lie in the dual unit ball (lip_norm <= 1);
    a candidate is a member iff its free norm is <= 1 and the pairing
    exceeds 1 - alpha strictly.
    """
    if lip_norm(sl.functional) > 1:
        raise ValueError("slice functional must have lip_norm <= 1")
    out: list[bool] = []
    for el in candidates:
        inside = free_norm(el) <= 1 and eval_functional(
            sl.functional, el
        ) > 1 - sl.alpha
        out.append(inside)
    return out


@dataclass
class DentingCertificate:
    """Level certificate that the molecule from p to q is a denting point.

    For the built-in grid families, a molecule between two points outside
    row 0 whose exact metric segment is trivial ({p, q}) is a denting
    point of the unit ball at the given truncation level.
    """

    p: str
    q: str
    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def denting_molecule_certificate(
    space: ExampleSpace, p: str, q: str
) -> DentingCertificate:
    """Certify m_pq as denting at this level (grid example spaces only)."""
    if not isinstance(space, ExampleSpace):
        raise TypeError("denting certificates are defined for the grid example spaces")
    reasons: list[str] = []
    if p == q:
        reasons.append("endpoints coincide")
        return DentingCertificate(p, q, False, reasons)
    row0 = set(space.rows[0])
    if p in row0 or q in row0:
        reasons.append("an endpoint lies in row 0")
    if not reasons:
        seg = metric_segment(space, p, q)
        if seg != frozenset({p, q}):
            extra = sorted(seg - {p, q})
            reasons.append(f"metric segment contains {extra}")
    return DentingCertificate(p, q, not reasons, reasons)


def certified_denting_pairs(space: ExampleSpace) -> list[tuple[str, str]]:
    """All ordered pairs (p, q) whose molecule carries a level certificate."""
    pairs: list[tuple[str, str]] = []
    row0 = set(space.rows[0])
    others = [p for p in space.points if p not in row0]
    for p in others:
        for q in others:
            if p == q:
                continue
            if metric_segment(space, p, q) == frozenset({p, q}):
                pairs.append((p, q))
    return pairs


@dataclass
class DentingDistanceRow:
    p: str
    q: str
    distance: Fraction
    in_slice: bool


@dataclass
class DentingDistanceReport:
    """Exact distances from a unit-sphere element to certified molecules.

    ``rows`` covers every certified denting pair at this level, with the
    exact free-space distance and slice membership of the molecule.
    ``all_two`` states whether every in-slice distance equals 2 exactly;
    ``exceptions`` lists the in-slice pairs with distance != 2.
    """

    rows: list[DentingDistanceRow]
    all_two: bool
    exceptions: list[DentingDistanceRow]


def distance_to_denting_report(
    space: ExampleSpace, mu: FreeElement, sl: Slice
) -> DentingDistanceReport:
    """Distance table from mu to all level-certified denting molecules."""
    if free_norm(mu) != 1:
        raise ValueError("element must lie on the unit sphere exactly")
    if lip_norm(sl.functional) > 1:
        raise ValueError("slice functional must have lip_norm <= 1")
    rows: list[DentingDistanceRow] = []
    for p, q in certified_denting_pairs(space):
        m = molecule(space, p, q)
        dist_val = free_norm(sub_elements(mu, m))
        inside = eval_functional(sl.functional, m) > 1 - sl.alpha
        rows.append(DentingDistanceRow(p=p, q=q, distance=dist_val, in_slice=inside))
    exceptions = [r for r in rows if r.in_slice and r.distance != 2]
    all_two = not exceptions
    return DentingDistanceReport(rows=rows, all_two=all_two, exceptions=exceptions)


def _string_table(payload: object, key: str) -> dict[str, str]:
    if not isinstance(payload, dict) or key not in payload:
        raise ValueError(f"document must be an object with a {key!r} table")
    table = payload[key]
    if not isinstance(table, dict):
        raise ValueError(f"{key!r} must be an object")
    return table


def element_to_json(el: FreeElement) -> dict:
    """Serialize coefficients as ``{"coeffs": {point_id: "p/q"}}``."""
    return {"coeffs": {p: fmt_rat(c) for p, c in sorted(el.coeffs.items())}}


def element_from_json(space: FiniteMetricSpace, payload: object) -> FreeElement:
    table = _string_table(payload, "coeffs")
    unknown = sorted(set(table) - set(space.points))
    if unknown:
        raise ValueError(f"coefficients for unknown points {unknown}")
    coeffs = {p: parse_rat(s) for p, s in table.items()}
    return element_from_coeffs(space, coeffs)


def function_to_json(f: LipschitzFunction) -> dict:
    """Serialize values as ``{"values": {point_id: "p/q"}}``."""
    return {"values": {p: fmt_rat(v) for p, v in sorted(f.values.items())}}


def function_from_json(space: FiniteMetricSpace, payload: object) -> LipschitzFunction:
    values = {p: parse_rat(s) for p, s in _string_table(payload, "values").items()}
    return LipschitzFunction(space=space, values=values)
