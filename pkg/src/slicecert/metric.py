"""Finite metric spaces with exact rational distances.

A space is a finite list of named points with a distinguished base point
and a symmetric rational distance table.  The module provides a full
axiom validator (structural problems are reported separately from axiom
violations), exact metric segments, and two built-in families of grid
example spaces used throughout the package.

Grid example spaces
-------------------
Both families live on rational points (a, b) of the unit square with the
distance

    d((a1,b1),(a2,b2)) = |a1-a2|                      if b1 == b2,
                         min(a1+a2, 2-(a1+a2)) + |b1-b2|   otherwise,

i.e. changing rows is only possible through the left or right edge.

* Family A: row 0 is {x=(0,0), y=(1,0)}, row 1 is {u=(0,1/2), v=(1,1/2)},
  and row n >= 2 is {(k/2^n, 1/2^n) : k = 0..2^n}.
* Family B: row 0 is {x=(0,0), y=(1,0)} and row n >= 1 is
  {(k/2^(n-1), 1/2^n) : k = 0..2^(n-1)}.

A "level N" space contains rows 0..N.  The base point is always x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .rational import fmt_rat, parse_rat

__all__ = [
    "GridPoint",
    "FiniteMetricSpace",
    "MetricValidationReport",
    "validate_metric",
    "metric_segment",
    "ExampleSpace",
    "example_space_a",
    "example_space_b",
    "grid_distance",
    "space_to_json",
    "space_from_json",
]


@dataclass(frozen=True)
class GridPoint:
    """A rational point (a, b) of the unit-square grid."""

    a: Fraction
    b: Fraction

    @property
    def id(self) -> str:
        return f"{fmt_rat(self.a)},{fmt_rat(self.b)}"

    @staticmethod
    def parse(text: str) -> "GridPoint":
        a_s, b_s = text.split(",")
        return GridPoint(parse_rat(a_s), parse_rat(b_s))


def grid_distance(p: GridPoint, q: GridPoint) -> Fraction:
    """Distance of the built-in grid metric (see module docstring)."""
    if p.b == q.b:
        return abs(p.a - q.a)
    s = p.a + q.a
    return min(s, 2 - s) + abs(p.b - q.b)


@dataclass
class FiniteMetricSpace:
    """A finite point set with a base point and a distance table.

    ``dist`` maps unordered pairs, stored under the key ``(p, q)`` with
    ``p <= q`` lexicographically; diagonal entries are implicit zeros.
    The constructor performs no axiom checking (so that the validator
    can be exercised on broken tables); use :func:`validate_metric`.
    """

    points: tuple[str, ...]
    base: str
    dist: dict[tuple[str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate point names")
        if self.base not in self.points:
            raise ValueError(f"base point {self.base!r} is not in the space")

    def d(self, p: str, q: str) -> Fraction:
        """Exact distance between two named points."""
        if p == q:
            if p not in self.points:
                raise KeyError(p)
            return Fraction(0)
        key = (p, q) if p <= q else (q, p)
        try:
            return self.dist[key]
        except KeyError:
            raise KeyError(f"missing distance entry for {key}") from None

    def has_entry(self, p: str, q: str) -> bool:
        key = (p, q) if p <= q else (q, p)
        return p == q or key in self.dist

    def pairs(self) -> list[tuple[str, str]]:
        """All unordered pairs of distinct points, lexicographic."""
        pts = self.points
        return [(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))]


@dataclass
class MetricValidationReport:
    """Outcome of :func:`validate_metric`.

    ``kind`` is ``"ok"``, ``"malformed"`` (missing or non-rational or
    negative entries — the table is not even a candidate metric), or
    ``"axiom"`` (structurally complete but violates a metric axiom).
    ``failures`` holds human-readable witnesses.
    """

    ok: bool
    kind: str
    failures: list[str] = field(default_factory=list)


def validate_metric(space: FiniteMetricSpace) -> MetricValidationReport:
    """Check the full metric axioms with exact arithmetic.

    Structural completeness is checked first; a table with missing or
    negative entries is reported as ``malformed`` without attempting the
    axioms.  Triangle checking rescales all entries to integers by the
    common denominator, which keeps the cubic loop exact and fast.
    """
    failures: list[str] = []
    for p, q in space.pairs():
        if not space.has_entry(p, q):
            failures.append(f"missing entry ({p}, {q})")
        else:
            v = space.d(p, q)
            if not isinstance(v, Fraction):
                failures.append(f"non-rational entry ({p}, {q}) = {v!r}")
            elif v < 0:
                failures.append(f"negative entry d({p}, {q}) = {v}")
    for key in space.dist:
        a, b = key
        if a not in space.points or b not in space.points:
            failures.append(f"entry for unknown points {key}")
        if a == b:
            failures.append(f"explicit diagonal entry {key}")
    if failures:
        return MetricValidationReport(ok=False, kind="malformed", failures=failures)

    for p, q in space.pairs():
        if space.d(p, q) == 0:
            failures.append(f"zero distance between distinct points ({p}, {q})")
    if failures:
        return MetricValidationReport(ok=False, kind="axiom", failures=failures)

    n = len(space.points)
    idx = {p: i for i, p in enumerate(space.points)}
    scale = lcm(*(v.denominator for v in space.dist.values())) if space.dist else 1
    m = [[0] * n for _ in range(n)]
    for (p, q), v in space.dist.items():
        w = int(v * scale)
        m[idx[p]][idx[q]] = w
        m[idx[q]][idx[p]] = w
    for i in range(n):
        row_i = m[i]
        for j in range(n):
            if j == i:
                continue
            dij = row_i[j]
            row_j = m[j]
            for k in range(j + 1, n):
                if k == i:
                    continue
                if row_j[k] > dij + row_i[k]:
                    failures.append(
                        "triangle violation: d({0}, {1}) > d({0}, {2}) + d({2}, {1})".format(
                            space.points[j], space.points[k], space.points[i]
                        )
                    )
    if failures:
        return MetricValidationReport(ok=False, kind="axiom", failures=failures)
    return MetricValidationReport(ok=True, kind="ok")


def metric_segment(space: FiniteMetricSpace, x: str, y: str) -> frozenset[str]:
    """All points p with d(x, p) + d(p, y) == d(x, y), exactly.

    Always contains x and y; equals {x} when x == y.
    """
    dxy = space.d(x, y)
    return frozenset(
        p for p in space.points if space.d(x, p) + space.d(p, y) == dxy
    )


@dataclass
class ExampleSpace(FiniteMetricSpace):
    """A built-in grid example space with its named special points.

    ``kind`` is ``"A"`` or ``"B"``; ``rows`` maps row index to the tuple
    of point ids in that row (left to right).  ``x``/``y`` name the row-0
    points; family A additionally names ``u``/``v`` in row 1.
    """

    kind: str = "A"
    level: int = 1
    rows: dict[int, tuple[str, ...]] = field(default_factory=dict)
    x: str = ""
    y: str = ""
    u: str | None = None
    v: str | None = None


def _build_example(kind: str, level: int, row_points) -> ExampleSpace:
    if level < 1:
        raise ValueError("level must be >= 1")
    rows: dict[int, tuple[GridPoint, ...]] = {}
    for n in range(level + 1):
        rows[n] = tuple(row_points(n))
    all_points: list[GridPoint] = [p for n in sorted(rows) for p in rows[n]]
    ids = tuple(p.id for p in all_points)
    dist: dict[tuple[str, str], Fraction] = {}
    for i in range(len(all_points)):
        for j in range(i + 1, len(all_points)):
            p, q = all_points[i], all_points[j]
            key = (p.id, q.id) if p.id <= q.id else (q.id, p.id)
            dist[key] = grid_distance(p, q)
    x_id = rows[0][0].id
    y_id = rows[0][1].id
    space = ExampleSpace(
        points=ids,
        base=x_id,
        dist=dist,
        kind=kind,
        level=level,
        rows={n: tuple(p.id for p in rows[n]) for n in sorted(rows)},
        x=x_id,
        y=y_id,
        u=rows[1][0].id if kind == "A" else None,
        v=rows[1][-1].id if kind == "A" else None,
    )
    return space


def example_space_a(level: int) -> ExampleSpace:
    """Family A truncated at ``level`` (rows 0..level), base x = (0,0)."""

    def row_points(n: int):
        if n == 0:
            return [GridPoint(Fraction(0), Fraction(0)), GridPoint(Fraction(1), Fraction(0))]
        if n == 1:
            return [GridPoint(Fraction(0), Fraction(1, 2)), GridPoint(Fraction(1), Fraction(1, 2))]
        return [
            GridPoint(Fraction(k, 2**n), Fraction(1, 2**n)) for k in range(2**n + 1)
        ]

    return _build_example("A", level, row_points)


def example_space_b(level: int) -> ExampleSpace:
    """Family B truncated at ``level`` (rows 0..level), base x = (0,0)."""

    def row_points(n: int):
        if n == 0:
            return [GridPoint(Fraction(0), Fraction(0)), GridPoint(Fraction(1), Fraction(0))]
        return [
            GridPoint(Fraction(k, 2 ** (n - 1)), Fraction(1, 2**n))
            for k in range(2 ** (n - 1) + 1)
        ]

    return _build_example("B", level, row_points)


def space_to_json(space: FiniteMetricSpace) -> dict:
    """Serialize as ``{"points": [...], "base": id, "dist": [[...]]}``.

    The matrix is row-major in the order of ``points`` and carries exact
    ``"p/q"`` strings.
    """
    n = len(space.points)
    matrix = [
        [fmt_rat(space.d(space.points[i], space.points[j])) for j in range(n)]
        for i in range(n)
    ]
    return {"points": list(space.points), "base": space.base, "dist": matrix}


def space_from_json(payload: object) -> FiniteMetricSpace:
    """Parse the object form produced by :func:`space_to_json`.

    Raises ValueError on malformed documents (shape or value problems);
    metric axioms are *not* checked here — run :func:`validate_metric`.
    """
    if not isinstance(payload, dict):
        raise ValueError("document must be a JSON object")
    try:
        points = payload["points"]
        base = payload["base"]
        matrix = payload["dist"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing field: {exc}") from exc
    if (
        not isinstance(points, list)
        or not all(isinstance(p, str) for p in points)
        or not isinstance(base, str)
        or not isinstance(matrix, list)
    ):
        raise ValueError("bad field types")
    n = len(points)
    if len(matrix) != n or any(not isinstance(r, list) or len(r) != n for r in matrix):
        raise ValueError("dist must be an n-by-n matrix")
    dist: dict[tuple[str, str], Fraction] = {}
    for i in range(n):
        for j in range(n):
            try:
                v = parse_rat(str(matrix[i][j]))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"bad matrix entry at ({i}, {j}): {exc}") from exc
            if i == j:
                if v != 0:
                    raise ValueError(f"nonzero diagonal at {i}")
                continue
            if matrix[i][j] != matrix[j][i]:
                raise ValueError(f"asymmetric entries at ({i}, {j})")
            p, q = points[i], points[j]
            key = (p, q) if p <= q else (q, p)
            dist[key] = v
    return FiniteMetricSpace(points=tuple(points), base=base, dist=dist)
