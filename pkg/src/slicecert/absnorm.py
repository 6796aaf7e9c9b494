"""Exact geometry of absolute normalized norms on the plane.

Two representable families:

* polyhedral norms, given by the vertices of the positive-cone boundary
  of the unit ball, listed from (1,0) to (0,1) (monotone, strictly convex
  position); the whole ball is the reflection to all four quadrants;
* l_p norms for rational p >= 1 or p = infinity.

Values are exact rationals whenever they are rational (always, for
polyhedral norms); for other l_p only exact three-way comparisons are
exposed, via integer power arithmetic (exponents with denominator 1 or 2
are decidable by nested squaring, which covers every exponent used here).

The module computes dual norms (polar vertex enumeration), extreme
points, V-points (sphere points x admitting y, z with
|x+y| = |x+z| = 2 and |y+z| < 2) with explicit verified witnesses,
convex decompositions of sphere points into V-points, the direct-sum
transfer predicate (the decomposition exists), and the explicit
supporting-slice construction whose subslices pin the decomposition
witnesses — verified exactly by extreme-point enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import isqrt

from .rational import fmt_rat, parse_rat

__all__ = [
    "Point",
    "AbsNorm2",
    "NotExactlyRepresentable",
    "polyhedral_norm",
    "lp_norm",
    "named_norm",
    "FIGURE_ALPHA_VERTICES",
    "as_polyhedral",
    "facet_functionals",
    "norm_eval",
    "norm_cmp",
    "is_on_sphere",
    "dual_norm",
    "extreme_points",
    "is_v_point",
    "is_v_point_direction",
    "v_point_witness",
    "vpoint_decomposition",
    "is_polyhedral",
    "transfer_predicate",
    "transfer_predicate_direction",
    "SupportingSliceReport",
    "supporting_slice_construction",
    "slice_extreme_points",
    "norm_to_json",
    "norm_from_json",
]

Point = tuple[Fraction, Fraction]


class NotExactlyRepresentable(ValueError):
    """The requested value is irrational; use norm_cmp instead."""


@dataclass(frozen=True)
class AbsNorm2:
    """An absolute normalized norm on the plane.

    ``kind`` is "polyhedral" (with ``cone_vertices``) or "lp" (with ``p``
    a Fraction >= 1, or the string "inf").
    """

    kind: str
    cone_vertices: tuple[Point, ...] | None = None
    p: Fraction | str | None = None


def _pt(a, b) -> Point:
    return (Fraction(a), Fraction(b))


FIGURE_ALPHA_VERTICES: tuple[Point, ...] = (
    _pt(1, 0),
    _pt(Fraction(3, 4), Fraction(1, 2)),
    _pt(Fraction(1, 2), Fraction(3, 4)),
    _pt(0, 1),
)


def polyhedral_norm(cone_vertices) -> AbsNorm2:
    """Build and validate a polyhedral norm from its positive-cone chain.

    The chain must run from (1,0) to (0,1), with a non-increasing and b
    non-decreasing, consecutive vertices distinct, no collinear triples,
    and left turns throughout (strict convex position).
    """
    verts = tuple((Fraction(a), Fraction(b)) for a, b in cone_vertices)
    if len(verts) < 2:
        raise ValueError("need at least the two axis vertices")
    if verts[0] != _pt(1, 0) or verts[-1] != _pt(0, 1):
        raise ValueError("chain must run from (1,0) to (0,1)")
    for (a1, b1), (a2, b2) in zip(verts, verts[1:]):
        if (a1, b1) == (a2, b2):
            raise ValueError("consecutive vertices must differ")
        if a2 > a1 or b2 < b1:
            raise ValueError("chain must be monotone (a down, b up)")
        if min(a1, b1, a2, b2) < 0:
            raise ValueError("cone vertices must be nonnegative")
    for (a1, b1), (a2, b2), (a3, b3) in zip(verts, verts[1:], verts[2:]):
        cross = (a2 - a1) * (b3 - b2) - (b2 - b1) * (a3 - a2)
        if cross <= 0:
            raise ValueError("chain must turn strictly left (no collinear triples)")
    return AbsNorm2(kind="polyhedral", cone_vertices=verts)


def lp_norm(p) -> AbsNorm2:
    """The l_p norm; p is a rational >= 1 or the string "inf"."""
    if p == "inf":
        return AbsNorm2(kind="lp", p="inf")
    p = Fraction(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    return AbsNorm2(kind="lp", p=p)


def named_norm(name: str) -> AbsNorm2:
    """Built-in norms by name: "l1", "linf", "l2", "figure-alpha"."""
    if name == "figure-alpha":
        return polyhedral_norm(FIGURE_ALPHA_VERTICES)
    if name == "l1":
        return lp_norm(1)
    if name == "l2":
        return lp_norm(2)
    if name == "linf":
        return lp_norm("inf")
    raise ValueError(f"unknown norm name {name!r}")


def is_polyhedral(norm: AbsNorm2) -> bool:
    """Polyhedral representations and the l_p endpoints p in {1, inf}."""
    if norm.kind == "polyhedral":
        return True
    return norm.p == "inf" or norm.p == 1


def as_polyhedral(norm: AbsNorm2) -> AbsNorm2:
    """Convert l1 / l_inf to their polyhedral form; identity otherwise."""
    if norm.kind == "polyhedral":
        return norm
    if norm.p == 1:
        return polyhedral_norm([_pt(1, 0), _pt(0, 1)])
    if norm.p == "inf":
        return polyhedral_norm([_pt(1, 0), _pt(1, 1), _pt(0, 1)])
    raise ValueError("norm is not polyhedral")


def facet_functionals(norm: AbsNorm2) -> list[Point]:
    """Exposing functionals (c, d) of the positive-cone facets, in order.

    Facet [v1, v2] has the unique functional with c*a + d*b = 1 on both
    endpoints.
    """
    poly = as_polyhedral(norm)
    out: list[Point] = []
    verts = poly.cone_vertices
    for (a1, b1), (a2, b2) in zip(verts, verts[1:]):
        det = a1 * b2 - a2 * b1
        if det == 0:
            raise AssertionError("degenerate facet")
        c = (b2 - b1) / det
        d = (a1 - a2) / det
        out.append((c, d))
    return out


def norm_eval(norm: AbsNorm2, point: Point) -> Fraction:
    """Exact norm value; raises NotExactlyRepresentable when irrational.

    Polyhedral norms (and l1, l_inf) always have rational values: the
    gauge is the maximum of the facet functionals on (|a|, |b|).  For
    l_p with 1 < p < infinity the value is returned only when it is
    exactly rational (a zero coordinate, or a perfect p-th power for
    integer p); otherwise use norm_cmp.
    """
    a, b = abs(Fraction(point[0])), abs(Fraction(point[1]))
    if norm.kind == "polyhedral":
        return max(c * a + d * b for c, d in facet_functionals(norm))
    if norm.p == "inf":
        return max(a, b)
    p = norm.p
    if p == 1:
        return a + b
    if a == 0:
        return b
    if b == 0:
        return a
    if p.denominator == 1:
        power = a ** p.numerator + b ** p.numerator
        root = _exact_root(power, p.numerator)
        if root is not None:
            return root
    raise NotExactlyRepresentable(
        "norm value is irrational; use norm_cmp for exact comparisons"
    )


def _exact_root(x: Fraction, k: int) -> Fraction | None:
    """The exact k-th root of x >= 0 if rational, else None."""
    num, den = x.numerator, x.denominator
    rn = _int_root(num, k)
    rd = _int_root(den, k)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    if k == 2:
        r = isqrt(n)
        return r if r * r == n else None
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _cmp(x: Fraction, y: Fraction) -> int:
    return (x > y) - (x < y)


def _cmp_sqrt_sum(alpha: Fraction, beta: Fraction, gamma: Fraction) -> int:
    """Exact sign of (sqrt(alpha) + sqrt(beta)) - sqrt(gamma), all >= 0."""
    # Compare squares: alpha + beta + 2 sqrt(alpha beta)  vs  gamma.
    a = alpha + beta - gamma
    prod4 = 4 * alpha * beta
    if a >= 0:
        if a == 0 and prod4 == 0:
            return 0
        return 1
    # 2 sqrt(alpha beta) vs -a, both nonnegative: square once more.
    return _cmp(prod4, a * a)


def norm_cmp(norm: AbsNorm2, point: Point, threshold) -> int:
    """Exact three-way comparison sign(N(point) - threshold), rational threshold.

    Decidable for all polyhedral norms and for l_p with p = r/s, s in
    {1, 2} (in particular p in {1, 3/2, 2, 3, inf}); other exponents
    raise ValueError.
    """
    theta = Fraction(threshold)
    a, b = abs(Fraction(point[0])), abs(Fraction(point[1]))
    if theta < 0:
        return 1
    if norm.kind == "polyhedral" or norm.p in (1, "inf"):
        return _cmp(norm_eval(norm, (a, b)), theta)
    p = norm.p
    if a == 0 and b == 0:
        return _cmp(Fraction(0), theta)
    r, s = p.numerator, p.denominator
    if s == 1:
        return _cmp(a**r + b**r, theta**r)
    if s == 2:
        return _cmp_sqrt_sum(a**r, b**r, theta**r)
    raise ValueError(
        "exact comparison implemented for exponents with denominator 1 or 2"
    )


def is_on_sphere(norm: AbsNorm2, point: Point) -> bool:
    return norm_cmp(norm, point, 1) == 0


def dual_norm(norm: AbsNorm2) -> AbsNorm2:
    """The dual norm: polar vertex enumeration, or the conjugate exponent.

    For a polyhedral norm the dual's cone vertices are (1,0), the facet
    functionals in order, and (0,1), with consecutive duplicates removed.
    For l_p the dual is returned symbolically as l_q with 1/p + 1/q = 1.
    """
    if norm.kind == "lp" and norm.p not in (1, "inf"):
        p = norm.p
        return lp_norm(p / (p - 1))
    if norm.kind == "lp" and norm.p == 1:
        return lp_norm("inf")
    if norm.kind == "lp" and norm.p == "inf":
        return lp_norm(1)
    chain: list[Point] = [_pt(1, 0)]
    for w in facet_functionals(norm):
        if w != chain[-1]:
            chain.append(w)
    if chain[-1] != _pt(0, 1):
        chain.append(_pt(0, 1))
    return polyhedral_norm(chain)


def _angle_cmp(p: Point, q: Point) -> int:
    def quadrant(t: Point) -> int:
        a, b = t
        if a > 0 and b >= 0:
            return 0
        if a <= 0 and b > 0:
            return 1
        if a < 0 and b <= 0:
            return 2
        return 3

    qp, qq = quadrant(p), quadrant(q)
    if qp != qq:
        return -1 if qp < qq else 1
    cross = p[0] * q[1] - p[1] * q[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def extreme_points(norm: AbsNorm2) -> list[Point]:
    """All extreme points of the unit ball, counterclockwise from (1,0).

    The cone chain is reflected to all four quadrants; an axis vertex is
    extreme iff its incident facet is not parallel to the axis (e.g.
    (1,0) is dropped for l_inf, whose boundary is vertical there).
    Only polyhedral norms (including l1, l_inf) have finitely many.
    """
    poly = as_polyhedral(norm)
    verts = list(poly.cone_vertices)
    included: list[Point] = []
    if verts[1][0] < 1:
        included.append(verts[0])
    included.extend(verts[1:-1])
    if verts[-2][1] < 1:
        included.append(verts[-1])
    full = {
        (sa * a, sb * b)
        for a, b in included
        for sa in (1, -1)
        for sb in (1, -1)
    }
    return sorted(full, key=cmp_to_key(_angle_cmp))


def _sphere_check(norm: AbsNorm2, x: Point) -> None:
    if norm_cmp(norm, x, 1) != 0:
        raise ValueError(f"point {x} is not on the unit sphere")


def v_point_witness(norm: AbsNorm2, x: Point) -> tuple[Point, Point] | None:
    """An exact witness pair for the V-point property at x, if one exists.

    Returns (y, z) on the sphere with |x+y| = |x+z| = 2 and |y+z| < 2:
    the two neighbors of x in the extreme-point cycle.  None when x is
    not a V-point.
    """
    x = (Fraction(x[0]), Fraction(x[1]))
    _sphere_check(norm, x)
    if norm.kind == "lp" and norm.p not in (1, "inf"):
        return None
    ext = extreme_points(norm)
    if x not in ext:
        return None
    i = ext.index(x)
    y = ext[(i + 1) % len(ext)]
    z = ext[(i - 1) % len(ext)]
    sx = (x[0] + y[0], x[1] + y[1])
    sz = (x[0] + z[0], x[1] + z[1])
    syz = (y[0] + z[0], y[1] + z[1])
    if not (
        norm_cmp(norm, sx, 2) == 0
        and norm_cmp(norm, sz, 2) == 0
        and norm_cmp(norm, syz, 2) < 0
    ):
        raise AssertionError("witness verification failed")
    return y, z


def is_v_point(norm: AbsNorm2, x: Point) -> bool:
    """Whether x is a V-point of the unit sphere (exact).

    For polyhedral norms these are exactly the extreme points (each has
    a verified neighbor witness); strictly convex l_p (1 < p < inf)
    have none.
    """
    return v_point_witness(norm, x) is not None


def is_v_point_direction(norm: AbsNorm2, direction: Point) -> bool:
    """V-point test for the sphere point on a ray (exact normalization).

    For strictly convex l_p the answer is False for every nonzero ray
    without materializing the (possibly irrational) sphere point; for
    polyhedral norms the ray is normalized exactly.
    """
    a, b = Fraction(direction[0]), Fraction(direction[1])
    if a == 0 and b == 0:
        raise ValueError("direction must be nonzero")
    if norm.kind == "lp" and norm.p not in (1, "inf") and norm.p > 1:
        return False
    value = norm_eval(norm, (a, b))
    return is_v_point(norm, (a / value, b / value))


def vpoint_decomposition(
    norm: AbsNorm2, x: Point
) -> tuple[Point, Point, Fraction] | None:
    """Write a sphere point as a convex combination of two V-points.

    Returns (v1, v2, lam) with x = lam*v1 + (1-lam)*v2, or None when no
    such decomposition exists (strictly convex norms).  For polyhedral
    norms a vertex decomposes degenerately as (x, x, 1) and a facet
    point through its facet endpoints.
    """
    _sphere_check(norm, x)
    if norm.kind == "lp" and norm.p not in (1, "inf") and norm.p > 1:
        return None
    x = (Fraction(x[0]), Fraction(x[1]))
    ext = extreme_points(norm)
    if x in ext:
        return (x, x, Fraction(1))
    n = len(ext)
    for i in range(n):
        v1 = ext[i]
        v2 = ext[(i + 1) % n]
        dx, dy = v2[0] - v1[0], v2[1] - v1[1]
        rx, ry = x[0] - v1[0], x[1] - v1[1]
        if rx * dy - ry * dx != 0:
            continue
        if dx != 0:
            t = rx / dx
        else:
            t = ry / dy
        if 0 <= t <= 1:
            # x = v1 + t (v2 - v1) = (1 - t) v1 + t v2.
            return (v1, v2, 1 - t)
    raise AssertionError("sphere point not located on any facet")


def transfer_predicate(norm: AbsNorm2, point: Point) -> bool:
    """Whether weighting a direct sum by this sphere point transfers
    extremal slice behavior: true iff the point is a convex combination
    of two V-points.

    The point must lie in the closed positive cone on the unit sphere.
    """
    a, b = Fraction(point[0]), Fraction(point[1])
    if a < 0 or b < 0:
        raise ValueError("point must lie in the closed positive cone")
    _sphere_check(norm, (a, b))
    return vpoint_decomposition(norm, (a, b)) is not None


def transfer_predicate_direction(norm: AbsNorm2, direction: Point) -> bool:
    """Transfer predicate for the sphere point on a positive-cone ray."""
    a, b = Fraction(direction[0]), Fraction(direction[1])
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError("direction must be nonzero and nonnegative")
    if norm.kind == "lp" and norm.p not in (1, "inf") and norm.p > 1:
        return False
    value = norm_eval(norm, (a, b))
    return transfer_predicate(norm, (a / value, b / value))


def slice_extreme_points(norm: AbsNorm2, functional: Point, alpha) -> list[Point]:
    """Extreme points e with <functional, e> > 1 - alpha, exactly."""
    alpha = Fraction(alpha)
    c, d = Fraction(functional[0]), Fraction(functional[1])
    return [e for e in extreme_points(norm) if c * e[0] + d * e[1] > 1 - alpha]


@dataclass
class SupportingSliceReport:
    """A supporting slice at x whose subslices pin the decomposition.

    ``case`` is "vertex" (every extreme point of the slice is x itself)
    or "facet" (the slice's extreme points are exactly the two facet
    endpoints, so every subslice contains one of them).  ``verified``
    reports the exact extreme-point enumeration check.
    """

    functional: Point
    alpha: Fraction
    case: str
    anchors: tuple[Point, ...]
    neighbors: tuple[Point, ...]
    slice_extremes: list[Point]
    verified: bool


def supporting_slice_construction(norm: AbsNorm2, x: Point) -> SupportingSliceReport:
    """Construct (x*, alpha) supporting x with pinned subslice behavior.

    Vertex case: x* is the average of the two incident facet functionals
    and alpha = (2 - |y1 + y2|)/4 where y1, y2 are x's neighbor extreme
    points; then the only extreme point in the slice is x.  Facet case:
    x* is the facet functional and alpha = (2 - max |y_i + x|)/2 where
    y_i are the outer neighbors of the facet endpoints; then the
    extreme points in the slice are exactly the facet endpoints.
    """
    x = (Fraction(x[0]), Fraction(x[1]))
    if x[0] < 0 or x[1] < 0:
        raise ValueError("construction is stated on the closed positive cone")
    poly = as_polyhedral(norm)
    _sphere_check(poly, x)
    ext = extreme_points(poly)
    n = len(ext)
    if x in ext:
        i = ext.index(x)
        y1, y2 = ext[(i - 1) % n], ext[(i + 1) % n]
        w1 = _facet_functional_of(poly, y1, x)
        w2 = _facet_functional_of(poly, x, y2)
        functional = ((w1[0] + w2[0]) / 2, (w1[1] + w2[1]) / 2)
        alpha = (2 - norm_eval(poly, (y1[0] + y2[0], y1[1] + y2[1]))) / 4
        inside = slice_extreme_points(poly, functional, alpha)
        verified = inside == [x]
        return SupportingSliceReport(
            functional=functional,
            alpha=alpha,
            case="vertex",
            anchors=(x,),
            neighbors=(y1, y2),
            slice_extremes=inside,
            verified=verified,
        )
    dec = vpoint_decomposition(poly, x)
    if dec is None:
        raise AssertionError("polyhedral sphere point must decompose")
    x1, x2, _ = dec
    i1, i2 = ext.index(x1), ext.index(x2)
    y1 = ext[(i1 - 1) % n] if (i1 + 1) % n == i2 else ext[(i1 + 1) % n]
    y2 = ext[(i2 + 1) % n] if (i1 + 1) % n == i2 else ext[(i2 - 1) % n]
    functional = _facet_functional_of(poly, x1, x2)
    worst = max(
        norm_eval(poly, (y1[0] + x[0], y1[1] + x[1])),
        norm_eval(poly, (y2[0] + x[0], y2[1] + x[1])),
    )
    alpha = (2 - worst) / 2
    inside = slice_extreme_points(poly, functional, alpha)
    verified = sorted(inside) == sorted([x1, x2])
    return SupportingSliceReport(
        functional=functional,
        alpha=alpha,
        case="facet",
        anchors=(x1, x2),
        neighbors=(y1, y2),
        slice_extremes=inside,
        verified=verified,
    )


def _facet_functional_of(norm: AbsNorm2, e1: Point, e2: Point) -> Point:
    """The functional exposing the full-ball facet through e1, e2."""
    det = e1[0] * e2[1] - e2[0] * e1[1]
    if det == 0:
        raise AssertionError("facet endpoints are collinear with the origin")
    c = (e2[1] - e1[1]) / det
    d = (e1[0] - e2[0]) / det
    return (c, d)


def norm_to_json(norm: AbsNorm2) -> dict:
    """Serialize per kind: cone vertex list, or the exponent."""
    if norm.kind == "polyhedral":
        return {
            "kind": "polyhedral",
            "cone_vertices": [
                [fmt_rat(a), fmt_rat(b)] for a, b in norm.cone_vertices
            ],
        }
    p = "inf" if norm.p == "inf" else fmt_rat(norm.p)
    return {"kind": "lp", "p": p}


def norm_from_json(payload: object) -> AbsNorm2:
    """Parse the object form produced by :func:`norm_to_json`.

    Raises ValueError on malformed documents; polyhedral chains are
    re-validated on the way in.
    """
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ValueError("norm document must be an object with a kind")
    if payload["kind"] == "polyhedral":
        raw = payload.get("cone_vertices")
        if not isinstance(raw, list):
            raise ValueError("polyhedral norm needs a cone_vertices list")
        verts = []
        for entry in raw:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValueError("each cone vertex must be [a, b]")
            try:
                verts.append((parse_rat(str(entry[0])), parse_rat(str(entry[1]))))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"bad vertex coordinate: {exc}") from exc
        return polyhedral_norm(verts)
    if payload["kind"] == "lp":
        p = payload.get("p")
        if p == "inf":
            return lp_norm("inf")
        try:
            return lp_norm(parse_rat(str(p)))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad exponent: {exc}") from exc
    raise ValueError(f"unknown norm kind {payload['kind']!r}")
