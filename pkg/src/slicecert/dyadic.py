"""Exact dyadic constructions inside L1[0,1].

A binary tree of half-open dyadic blocks ``B_n^t`` (in the left half of the
unit interval) and shifted copies ``C_n^t`` (in the right half) carries two
families of functions: normalized finite steps ``f_t`` and their martingale
limits ``h_t``, whose support extends through infinitely many blocks.  Every
finite combination of these functions has an exactly computable L1 norm: the
head is integrated as a step function and the infinite tail collapses to a
closed geometric form.  On top of the norms the module provides the span norm
formula, cascade and concentration inequalities, a strong-exposure sampling
experiment, and constructive witnesses for slice/distance estimates used to
distinguish Delta-points from relative Daugavet-points.

All arithmetic is exact over ``fractions.Fraction``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .rational import fmt_rat, parse_rat, rat

Node = tuple[int, ...]
DyadicInterval = tuple[Fraction, Fraction]

#: Hard cap on dense step-function storage: 2**20 cells.
MAX_RESOLUTION = 20


# ---------------------------------------------------------------------------
# nodes
# ---------------------------------------------------------------------------


def _check_node(t: Sequence[int], *, allow_empty: bool = False) -> Node:
    node = tuple(t)
    if not allow_empty and not node:
        raise ValueError("node must contain at least one bit")
    if any(bit not in (0, 1) for bit in node):
        raise ValueError(f"node bits must be 0 or 1, got {node!r}")
    return node


def node_from_string(bits: str, *, allow_empty: bool = False) -> Node:
    """Parse a bit string such as ``"010"`` into a node tuple."""
    if any(ch not in "01" for ch in bits):
        raise ValueError(f"invalid node string {bits!r}")
    return _check_node(tuple(int(ch) for ch in bits), allow_empty=allow_empty)


def node_to_string(t: Node) -> str:
    return "".join(str(bit) for bit in t)


def descendants(t: Sequence[int], m: int) -> list[Node]:
    """All extensions of ``t`` by exactly ``m`` bits, in lexicographic order."""
    if m < 0:
        raise ValueError("descendant depth must be non-negative")
    nodes = [_check_node(t, allow_empty=True)]
    for _ in range(m):
        nodes = [node + (bit,) for node in nodes for bit in (0, 1)]
    return nodes


# ---------------------------------------------------------------------------
# block sets
# ---------------------------------------------------------------------------


def _offset(t: Node) -> Fraction:
    """Relative position in [0, 1) of the sub-block selected by ``t``."""
    return sum(
        (Fraction(bit, 2 ** (k + 1)) for k, bit in enumerate(t)), Fraction(0)
    )


def b_set(t: Sequence[int], n: int) -> list[DyadicInterval]:
    """The depth-``n`` block in the left half, refined along the bits of ``t``.

    The root block is ``[2^{-n-1}, 2^{-n})``; each bit halves the block,
    ``0`` selecting the left part.  Returns a list with one half-open
    interval; its measure is ``2^{-|t|-n-1}``.
    """
    node = _check_node(t, allow_empty=True)
    if n < 1:
        raise ValueError("block index must satisfy n >= 1")
    scale = Fraction(1, 2 ** (n + 1))
    lo = scale * (1 + _offset(node))
    return [(lo, lo + scale * Fraction(1, 2 ** len(node)))]


def c_set(t: Sequence[int], n: int) -> list[DyadicInterval]:
    """The mirror of :func:`b_set` shifted into the right half by 1/2."""
    ((lo, hi),) = b_set(t, n)
    half = Fraction(1, 2)
    return [(lo + half, hi + half)]


# ---------------------------------------------------------------------------
# dense step functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicStep:
    """A function on [0, 1) constant on ``2**resolution`` equal cells."""

    resolution: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.resolution <= MAX_RESOLUTION:
            raise ValueError(
                f"resolution must be between 0 and {MAX_RESOLUTION} "
                f"(at most 2**{MAX_RESOLUTION} cells), got {self.resolution}"
            )
        values = tuple(rat(v) for v in self.values)
        if len(values) != 2**self.resolution:
            raise ValueError(
                f"expected {2 ** self.resolution} cell values, got {len(values)}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value: object, resolution: int = 0) -> "DyadicStep":
        return cls(resolution, (rat(value),) * 2**resolution)

    @classmethod
    def indicator(
        cls, intervals: Iterable[DyadicInterval], resolution: int
    ) -> "DyadicStep":
        """Sum of indicators of the given half-open dyadic intervals.

        Every endpoint must be a multiple of ``2**-resolution``.
        """
        cells = [Fraction(0)] * 2**resolution
        for lo, hi in intervals:
            lo, hi = rat(lo), rat(hi)
            start, stop = lo * 2**resolution, hi * 2**resolution
            if start.denominator != 1 or stop.denominator != 1:
                raise ValueError(
                    f"interval [{lo}, {hi}) is not aligned to resolution {resolution}"
                )
            if not 0 <= lo <= hi <= 1:
                raise ValueError(f"interval [{lo}, {hi}) escapes [0, 1)")
            for k in range(int(start), int(stop)):
                cells[k] += 1
        return cls(resolution, tuple(cells))

    def refine(self, resolution: int) -> "DyadicStep":
        if resolution < self.resolution:
            raise ValueError("cannot refine to a coarser resolution")
        factor = 2 ** (resolution - self.resolution)
        return DyadicStep(
            resolution, tuple(v for v in self.values for _ in range(factor))
        )

    def value_at(self, x: object) -> Fraction:
        point = rat(x)
        if not 0 <= point < 1:
            raise ValueError("point must lie in [0, 1)")
        return self.values[int(point * 2**self.resolution)]

    def runs(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        """Maximal constant runs as ``(lo, hi, value)`` triples covering [0, 1)."""
        width = Fraction(1, 2**self.resolution)
        out: list[tuple[Fraction, Fraction, Fraction]] = []
        for k, value in enumerate(self.values):
            lo = k * width
            if out and out[-1][2] == value and out[-1][1] == lo:
                out[-1] = (out[-1][0], lo + width, value)
            else:
                out.append((lo, lo + width, value))
        return out

    def integral(self) -> Fraction:
        return sum(self.values, Fraction(0)) / 2**self.resolution

    def norm(self) -> Fraction:
        """Exact L1 norm."""
        return sum((abs(v) for v in self.values), Fraction(0)) / 2**self.resolution

    def ess_sup(self) -> Fraction:
        """Exact essential supremum of the absolute value."""
        return max(abs(v) for v in self.values)

    def same_function(self, other: "DyadicStep") -> bool:
        res = max(self.resolution, other.resolution)
        return self.refine(res).values == other.refine(res).values

    def _binary(self, other: "DyadicStep", op) -> "DyadicStep":
        res = max(self.resolution, other.resolution)
        a, b = self.refine(res), other.refine(res)
        return DyadicStep(res, tuple(op(x, y) for x, y in zip(a.values, b.values)))

    def __add__(self, other: "DyadicStep") -> "DyadicStep":
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other: "DyadicStep") -> "DyadicStep":
        return self._binary(other, lambda x, y: x - y)

    def __neg__(self) -> "DyadicStep":
        return DyadicStep(self.resolution, tuple(-v for v in self.values))

    def __mul__(self, scalar: object) -> "DyadicStep":
        c = rat(scalar)
        return DyadicStep(self.resolution, tuple(c * v for v in self.values))

    __rmul__ = __mul__


def _support_intervals(t: Node) -> list[DyadicInterval]:
    """Support blocks of the step ``f_t``: one C-block and ``|t|`` B-blocks."""
    n = len(t)
    return c_set(t, n) + [b_set(t, i)[0] for i in range(1, n + 1)]


def f_fn(t: Sequence[int]) -> DyadicStep:
    """The normalized step function attached to a non-empty node.

    Height ``2^{|t|+1}`` on ``C^t_{|t|}`` and on ``B_i^t`` for ``i <= |t|``;
    its L1 norm is exactly 1.
    """
    node = _check_node(t)
    n = len(node)
    resolution = 2 * n + 1
    if resolution > MAX_RESOLUTION:
        raise ValueError(
            f"node depth {n} needs resolution {resolution} > {MAX_RESOLUTION}"
        )
    return 2 ** (n + 1) * DyadicStep.indicator(_support_intervals(node), resolution)


def h_fn_approx(t: Sequence[int], m: int) -> DyadicStep:
    """The depth-``m`` martingale approximation of the limit function.

    Equals ``2^{|t|+1}(1_{C^t_{m+|t|}} + 1_{B_1^t ∪ … ∪ B_{m+|t|}^t})``, the
    average of the ``2^m`` steps attached to the depth-``m`` descendants.
    """
    node = _check_node(t)
    if m < 0:
        raise ValueError("approximation depth must be non-negative")
    n = len(node)
    resolution = m + 2 * n + 1
    if resolution > MAX_RESOLUTION:
        raise ValueError(
            f"depth {n} with approximation level {m} needs resolution "
            f"{resolution} > {MAX_RESOLUTION}"
        )
    intervals = c_set(node, m + n) + [b_set(node, i)[0] for i in range(1, m + n + 1)]
    return 2 ** (n + 1) * DyadicStep.indicator(intervals, resolution)


# ---------------------------------------------------------------------------
# span elements
# ---------------------------------------------------------------------------


def _canon_part(part: object) -> tuple[tuple[Node, Fraction], ...]:
    table: dict[Node, Fraction] = {}
    items = part.items() if isinstance(part, Mapping) else part
    for t, a in items:
        node = _check_node(t)
        coeff = rat(a)
        if coeff:
            table[node] = table.get(node, Fraction(0)) + coeff
    return tuple(sorted((t, a) for t, a in table.items() if a))


@dataclass(frozen=True)
class TreeSpanElement:
    """A finite combination of the step functions and their limits.

    ``f_part`` holds coefficients of the normalized steps, ``h_part`` those of
    the limit functions; both are stored as sorted tuples with zero
    coefficients dropped, so equal functions built from equal coefficients
    compare equal.
    """

    f_part: tuple[tuple[Node, Fraction], ...] = ()
    h_part: tuple[tuple[Node, Fraction], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "f_part", _canon_part(self.f_part))
        object.__setattr__(self, "h_part", _canon_part(self.h_part))

    @property
    def f_coeffs(self) -> dict[Node, Fraction]:
        return dict(self.f_part)

    @property
    def h_coeffs(self) -> dict[Node, Fraction]:
        return dict(self.h_part)

    @property
    def is_zero(self) -> bool:
        return not self.f_part and not self.h_part

    @property
    def max_depth(self) -> int:
        depths = [len(t) for t, _ in self.f_part] + [len(t) for t, _ in self.h_part]
        return max(depths, default=0)

    def _combine(self, other: "TreeSpanElement", sign: int) -> "TreeSpanElement":
        f = self.f_coeffs
        for t, a in other.f_part:
            f[t] = f.get(t, Fraction(0)) + sign * a
        h = self.h_coeffs
        for t, a in other.h_part:
            h[t] = h.get(t, Fraction(0)) + sign * a
        return TreeSpanElement(tuple(f.items()), tuple(h.items()))

    def __add__(self, other: "TreeSpanElement") -> "TreeSpanElement":
        return self._combine(other, 1)

    def __sub__(self, other: "TreeSpanElement") -> "TreeSpanElement":
        return self._combine(other, -1)

    def __neg__(self) -> "TreeSpanElement":
        return self * -1

    def __mul__(self, scalar: object) -> "TreeSpanElement":
        c = rat(scalar)
        return TreeSpanElement(
            tuple((t, c * a) for t, a in self.f_part),
            tuple((t, c * a) for t, a in self.h_part),
        )

    __rmul__ = __mul__


def span_element(
    f: Mapping[Sequence[int], object] | None = None,
    h: Mapping[Sequence[int], object] | None = None,
) -> TreeSpanElement:
    return TreeSpanElement(tuple((f or {}).items()), tuple((h or {}).items()))


def f_element(t: Sequence[int]) -> TreeSpanElement:
    return span_element(f={_check_node(t): 1})


def h_element(t: Sequence[int]) -> TreeSpanElement:
    return span_element(h={_check_node(t): 1})


def levelized_coefficients(
    e: TreeSpanElement, level: int
) -> dict[Node, Fraction]:
    """Coefficients of the h-part pushed down to a common ``level``.

    Each limit function equals the average of its two children, so a node of
    depth ``d`` contributes ``2^{-(level-d)}`` of its coefficient to every
    depth-``level`` descendant.  Requires ``level >= max h-depth`` and an
    element without f-part.
    """
    if e.f_part:
        raise ValueError("levelization applies to elements of the h-span only")
    out: dict[Node, Fraction] = {}
    for t, a in e.h_part:
        if len(t) > level:
            raise ValueError(f"node {t} is deeper than level {level}")
        share = a * Fraction(1, 2 ** (level - len(t)))
        for w in descendants(t, level - len(t)):
            out[w] = out.get(w, Fraction(0)) + share
    return {w: v for w, v in sorted(out.items()) if v}


# ---------------------------------------------------------------------------
# exact integration
# ---------------------------------------------------------------------------

_Piece = tuple[Fraction, Fraction, Fraction]


def _pieces(e: TreeSpanElement, block_cutoff: int) -> list[_Piece]:
    """Constant pieces ``(lo, hi, height)`` of ``e`` using h-blocks up to
    ``block_cutoff``; the omitted h-tail lives inside ``(0, 2^{-cutoff-1})``."""
    pieces: list[_Piece] = []
    for t, a in e.f_part:
        height = a * 2 ** (len(t) + 1)
        for lo, hi in _support_intervals(t):
            pieces.append((lo, hi, height))
    for t, a in e.h_part:
        height = a * 2 ** (len(t) + 1)
        for i in range(1, block_cutoff + 1):
            ((lo, hi),) = b_set(t, i)
            pieces.append((lo, hi, height))
    return pieces


def _level_pieces(e: TreeSpanElement, i: int) -> list[_Piece]:
    """The h-part pieces on the depth-``i`` blocks only."""
    pieces: list[_Piece] = []
    for t, a in e.h_part:
        ((lo, hi),) = b_set(t, i)
        pieces.append((lo, hi, a * 2 ** (len(t) + 1)))
    return pieces


def _sweep(
    pieces: Sequence[_Piece],
    windows: Sequence[DyadicInterval],
    *,
    absolute: bool,
) -> Fraction:
    """Integrate the sum of the pieces (or its absolute value) over disjoint
    sorted windows."""
    events: dict[Fraction, Fraction] = {}
    for lo, hi, height in pieces:
        events[lo] = events.get(lo, Fraction(0)) + height
        events[hi] = events.get(hi, Fraction(0)) - height
    breakpoints = set(events)
    for lo, hi in windows:
        breakpoints.add(lo)
        breakpoints.add(hi)
    ordered = sorted(breakpoints)
    total = Fraction(0)
    running = Fraction(0)
    w = 0
    for k, a in enumerate(ordered[:-1]):
        running += events.get(a, Fraction(0))
        if not running:
            continue
        b = ordered[k + 1]
        while w < len(windows) and windows[w][1] <= a:
            w += 1
        if w < len(windows) and windows[w][0] <= a:
            total += (abs(running) if absolute else running) * (b - a)
    return total


_FULL: list[DyadicInterval] = [(Fraction(0), Fraction(1))]


def _check_region(region: Iterable[DyadicInterval]) -> list[DyadicInterval]:
    windows = []
    for lo, hi in region:
        lo, hi = rat(lo), rat(hi)
        if not 0 <= lo < hi <= 1:
            raise ValueError(f"invalid interval [{lo}, {hi})")
        windows.append((lo, hi))
    windows.sort()
    for (_, prev_hi), (lo, _) in zip(windows, windows[1:]):
        if lo < prev_hi:
            raise ValueError("region intervals must be disjoint")
    return windows


def l1_norm(e: TreeSpanElement) -> Fraction:
    """Exact L1 norm of a span element.

    The head (all blocks of depth at most ``2D+1`` for maximal node depth
    ``D``) is integrated as a step function.  Beyond the cutoff only h-parts
    survive and their restriction to each deeper block level is a fixed
    pattern of halving mass, so the tail equals twice the integral over the
    first omitted level.
    """
    if e.is_zero:
        return Fraction(0)
    cutoff = 2 * e.max_depth + 1
    total = _sweep(_pieces(e, cutoff), _FULL, absolute=True)
    if e.h_part:
        total += 2 * _sweep(_level_pieces(e, cutoff + 1), _FULL, absolute=True)
    return total


def restricted_norm(
    e: TreeSpanElement, region: Iterable[DyadicInterval]
) -> Fraction:
    """Exact L1 norm of ``e`` restricted to a disjoint union of intervals."""
    windows = _check_region(region)
    if e.is_zero or not windows:
        return Fraction(0)
    cutoff = 2 * e.max_depth + 1
    zero_windows = [w for w in windows if w[0] == 0]
    if not zero_windows:
        min_lo = min(lo for lo, _ in windows)
        while Fraction(1, 2 ** (cutoff + 1)) > min_lo:
            cutoff += 1
        return _sweep(_pieces(e, cutoff), windows, absolute=True)
    # exactly one window reaches 0; make it swallow the whole tail
    first_hi = zero_windows[0][1]
    while Fraction(1, 2 ** (cutoff + 1)) > first_hi:
        cutoff += 1
    edge = Fraction(1, 2 ** (cutoff + 1))
    clipped = [(max(lo, edge), hi) for lo, hi in windows if hi > edge]
    total = _sweep(_pieces(e, cutoff), clipped, absolute=True)
    if e.h_part:
        total += 2 * _sweep(_level_pieces(e, cutoff + 1), _FULL, absolute=True)
    return total


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignPatternFunctional:
    """A functional of unit essential sup carried by the support of an h-span.

    It takes the constant value ``sign`` on every block of each listed
    depth-``level`` node and vanishes elsewhere.  Unlike a dense step
    function it resolves the support down to measure zero, which is what
    norming an h-span requires.
    """

    level: int
    signs: tuple[tuple[Node, int], ...]

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("pattern level must be at least 1")
        seen: dict[Node, int] = {}
        for t, sign in self.signs:
            node = _check_node(t)
            if len(node) != self.level:
                raise ValueError("pattern nodes must sit at the pattern level")
            if sign not in (-1, 1):
                raise ValueError("pattern signs must be -1 or +1")
            if node in seen:
                raise ValueError(f"duplicate pattern node {node}")
            seen[node] = sign
        if not seen:
            raise ValueError("pattern must carry at least one node")
        object.__setattr__(self, "signs", tuple(sorted(seen.items())))

    def sign_of(self, t: Node) -> int:
        """The pattern sign at a depth-``level`` node (0 when unsupported)."""
        return dict(self.signs).get(t, 0)

    def block_average(self, s: Node) -> Fraction:
        """Average of the pattern over any block of the node ``s``.

        The average is the same on every block level, which is what makes
        the closed-form inner products exact.
        """
        if len(s) >= self.level:
            return Fraction(self.sign_of(s[: self.level]))
        total = sum(sign for t, sign in self.signs if t[: len(s)] == s)
        return Fraction(total, 2 ** (self.level - len(s)))


def sign_pattern_functional(e: TreeSpanElement) -> SignPatternFunctional:
    """The sign pattern of a non-zero h-span element, as a functional."""
    if e.f_part:
        raise ValueError("sign patterns are built from h-span elements only")
    if e.is_zero:
        raise ValueError("the zero element has no sign pattern")
    level = e.max_depth
    table = levelized_coefficients(e, level)
    return SignPatternFunctional(
        level, tuple((t, 1 if a > 0 else -1) for t, a in table.items())
    )


Functional = Union[DyadicStep, SignPatternFunctional]


def _inner_step(step: DyadicStep, e: TreeSpanElement) -> Fraction:
    if e.is_zero:
        return Fraction(0)
    cutoff = max(2 * e.max_depth + 1, step.resolution)
    events: dict[Fraction, tuple[Fraction, Fraction]] = {}

    def bump(x: Fraction, dv: Fraction, dw: Fraction) -> None:
        v, w = events.get(x, (Fraction(0), Fraction(0)))
        events[x] = (v + dv, w + dw)

    for lo, hi, height in _pieces(e, cutoff):
        bump(lo, height, Fraction(0))
        bump(hi, -height, Fraction(0))
    for lo, hi, value in step.runs():
        if value:
            bump(lo, Fraction(0), value)
            bump(hi, Fraction(0), -value)
    ordered = sorted(events)
    total = Fraction(0)
    value = weight = Fraction(0)
    for k, a in enumerate(ordered[:-1]):
        dv, dw = events[a]
        value += dv
        weight += dw
        if value and weight:
            total += value * weight * (ordered[k + 1] - a)
    # beyond the cutoff only h-parts survive; each contributes 2^{-i} per
    # block level i, and the functional is constant there
    tail_sum = sum((a for _, a in e.h_part), Fraction(0))
    total += step.values[0] * tail_sum * Fraction(1, 2**cutoff)
    return total


def _inner_pattern(p: SignPatternFunctional, e: TreeSpanElement) -> Fraction:
    total = Fraction(0)
    for s, a in e.f_part:
        avg = p.block_average(s)
        if avg:
            total += a * avg * (1 - Fraction(1, 2 ** len(s)))
    if e.h_part:
        h_only = TreeSpanElement((), e.h_part)
        level = max(p.level, h_only.max_depth)
        for w, b in levelized_coefficients(h_only, level).items():
            sign = p.sign_of(w[: p.level])
            if sign:
                total += b * sign
    return total


def inner_product(functional: Functional, e: TreeSpanElement) -> Fraction:
    """Exact pairing of a functional with a span element."""
    if isinstance(functional, DyadicStep):
        return _inner_step(functional, e)
    if isinstance(functional, SignPatternFunctional):
        return _inner_pattern(functional, e)
    raise TypeError(f"unsupported functional type {type(functional).__name__}")


def _ess_sup(functional: Functional) -> Fraction:
    if isinstance(functional, DyadicStep):
        return functional.ess_sup()
    return Fraction(1)


# ---------------------------------------------------------------------------
# norm formulas and inequalities
# ---------------------------------------------------------------------------


def span_norm_formula(
    coeffs: Mapping[Sequence[int], object] | TreeSpanElement,
) -> Fraction:
    """Closed-form L1 norm of a combination of the normalized steps.

    For coefficients ``α`` supported on depths ``<= n`` the norm equals
    ``2^{-n} Σ_{|t|=n} Σ_{j=1}^n (|Σ_{i=j}^n 2^{i-j} α_{t|i}| + |α_{t|j}|)``.
    """
    if isinstance(coeffs, TreeSpanElement):
        if coeffs.h_part:
            raise ValueError("the norm formula covers f-spans only")
        table = coeffs.f_coeffs
    else:
        table = {}
        for t, a in dict(coeffs).items():
            node = _check_node(t)
            coeff = rat(a)
            if coeff:
                table[node] = table.get(node, Fraction(0)) + coeff
    table = {t: a for t, a in table.items() if a}
    if not table:
        return Fraction(0)
    n = max(len(t) for t in table)
    zero = Fraction(0)
    total = Fraction(0)
    for t in descendants((), n):
        for j in range(1, n + 1):
            chain = sum(
                (2 ** (i - j) * table.get(t[:i], zero) for i in range(j, n + 1)),
                zero,
            )
            total += abs(chain) + abs(table.get(t[:j], zero))
    return total / 2**n


def cascade_sides(
    alpha: Sequence[object], m: int, n: int
) -> tuple[Fraction, Fraction]:
    """Both sides of the cascade inequality for coefficients ``α_m … α_n``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > n:
        raise ValueError("m must not exceed n")
    values = [rat(a) for a in alpha]
    if len(values) != n - m + 1:
        raise ValueError(f"expected {n - m + 1} coefficients for indices {m}..{n}")

    def coeff(i: int) -> Fraction:
        return values[i - m]

    lhs = abs(sum((2 ** (i - m) * coeff(i) for i in range(m, n + 1)), Fraction(0)))
    rhs = sum(
        (
            abs(sum((2 ** (i - j) * coeff(i) for i in range(j, n + 1)), Fraction(0)))
            for j in range(m + 1, n + 1)
        ),
        Fraction(0),
    ) + sum((abs(coeff(i)) for i in range(m, n + 1)), Fraction(0))
    return lhs, rhs


def cascade_inequality_check(alpha: Sequence[object], m: int, n: int) -> bool:
    """Exactly verify ``|Σ 2^{i-m} α_i| <= Σ_{j>m} |Σ 2^{i-j} α_i| + Σ |α_i|``."""
    lhs, rhs = cascade_sides(alpha, m, n)
    return lhs <= rhs


class ConcentrationResult(NamedTuple):
    restricted: Fraction
    bound: Fraction
    holds: bool


def concentration_check(g: TreeSpanElement, m: int) -> ConcentrationResult:
    """Check that at most a ``1 - 2^{-m}`` share of the norm of an f-span
    sits on the first ``m`` left-half block levels."""
    if g.h_part:
        raise ValueError("the concentration bound covers f-spans only")
    if m < 1:
        raise ValueError("m must be at least 1")
    region = [b_set((), i)[0] for i in range(1, m + 1)]
    restricted = restricted_norm(g, region)
    bound = (1 - Fraction(1, 2**m)) * l1_norm(g)
    return ConcentrationResult(restricted, bound, restricted <= bound)


class NormSplitEquivalences(NamedTuple):
    head_small: bool  # ‖x‖ <= (1-ε)‖x+y‖
    tail_large: bool  # ‖y‖ >= ε‖x+y‖
    ratio_bound: bool  # ‖x‖ <= (1/ε - 1)‖y‖


def norm_split_equivalences(
    x: TreeSpanElement, y: TreeSpanElement, epsilon: object
) -> NormSplitEquivalences:
    """Three mutually equivalent conditions for an additive norm split.

    Requires ``‖x‖ + ‖y‖ = ‖x + y‖`` exactly; under that hypothesis the three
    returned booleans always agree.
    """
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    nx, ny, nz = l1_norm(x), l1_norm(y), l1_norm(x + y)
    if nx + ny != nz:
        raise ValueError("the two norms must add up to the norm of the sum")
    return NormSplitEquivalences(
        nx <= (1 - eps) * nz,
        ny >= eps * nz,
        nx <= (1 / eps - 1) * ny,
    )


@dataclass(frozen=True)
class MartingaleIsometryReport:
    level: int
    martingale_ok: bool
    coefficient_sum: Fraction
    span_norm: Fraction

    @property
    def isometry_ok(self) -> bool:
        return self.coefficient_sum == self.span_norm

    @property
    def ok(self) -> bool:
        return self.martingale_ok and self.isometry_ok


def martingale_and_isometry_check(
    level: int, coeffs: Mapping[Sequence[int], object]
) -> MartingaleIsometryReport:
    """Verify the averaging identity and the level isometry exactly.

    Every limit function at the given level must equal the average of its two
    children, and the norm of a level combination must equal the sum of the
    absolute coefficients.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    table: dict[Node, Fraction] = {}
    for t, a in dict(coeffs).items():
        node = _check_node(t)
        if len(node) != level:
            raise ValueError(f"coefficient node {node} is not at level {level}")
        table[node] = table.get(node, Fraction(0)) + rat(a)
    half = Fraction(1, 2)
    martingale_ok = all(
        l1_norm(h_element(t) - half * (h_element(t + (0,)) + h_element(t + (1,))))
        == 0
        for t in descendants((), level)
    )
    coefficient_sum = sum((abs(a) for a in table.values()), Fraction(0))
    span_norm = l1_norm(span_element(h=table))
    return MartingaleIsometryReport(level, martingale_ok, coefficient_sum, span_norm)


def separation_functional_values(t: Sequence[int], s: Sequence[int]) -> Fraction:
    """Exact pairing of the two-block separating functional at ``t`` with the
    step at ``s``.

    The functional is ``+1`` on ``B^t_{|t|+1} ∪ C^t_{|t|+1}`` and ``-1`` on
    ``C^t_{|t|}``.  Case table (by exact integration): ``-2^{-|t|}`` at
    ``s = t``; ``2^{-|t|}`` for children of ``t``; ``2^{-|t|-1}`` for deeper
    descendants; ``0`` otherwise.
    """
    base = _check_node(t)
    other = _check_node(s)
    n = len(base)
    positive = _check_region(b_set(base, n + 1) + c_set(base, n + 1))
    negative = _check_region(c_set(base, n))
    pieces = _pieces(f_element(other), 0)
    plus = _sweep(pieces, positive, absolute=False)
    minus = _sweep(pieces, negative, absolute=False)
    return plus - minus


# ---------------------------------------------------------------------------
# exposure experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExposureReport:
    node: Node
    epsilon: Fraction
    slice_threshold: Fraction
    distance_bound: Fraction
    boundary_distance: Fraction
    samples_checked: int
    rejection_attempts: int
    rejection_accepted: int
    max_distance: Fraction
    all_within_bound: bool


def _random_f_span(rng: random.Random, pool: Sequence[Node]) -> TreeSpanElement:
    count = rng.randint(1, min(4, len(pool)))
    chosen = rng.sample(list(pool), count)
    coeffs: dict[Node, Fraction] = {}
    for node in chosen:
        num = rng.randint(-8, 8) or 1
        coeffs[node] = Fraction(num, 8)
    return span_element(f=coeffs)


def exposure_experiment(
    t: Sequence[int], epsilon: object, budget: int, *, seed: int = 0
) -> ExposureReport:
    """Sample the slice cut out by the support indicator of a step function.

    Members of the unit ball of the f-span with pairing above
    ``1 - 2^{-|t|}ε`` are generated two ways — a directed family guaranteed
    to lie in the slice and plain rejection sampling — and the exact distance
    to the step is checked against the bound ``2ε`` for every sample.
    """
    node = _check_node(t)
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if eps >= 1:
        raise ValueError("epsilon must be below 1 for the exposure bound")
    if budget < 1:
        raise ValueError("sample budget must be positive")
    n = len(node)
    center = f_element(node)
    x_star = DyadicStep.indicator(_support_intervals(node), 2 * n + 1)
    margin = eps / 2**n
    threshold = 1 - margin
    bound = 2 * eps
    rng = random.Random(seed)

    pool = sorted(
        set(descendants(node, 1) + descendants(node, 2) + descendants((), 2))
        - {node}
    )
    distances: list[Fraction] = []
    all_ok = True

    boundary_distance = l1_norm(center - (1 - margin) * center)
    if boundary_distance >= bound:
        all_ok = False

    checked = 0
    for _ in range(budget):
        w = _random_f_span(rng, pool)
        nw = l1_norm(w)
        if nw > 1:
            w = w * (1 / nw)
        s = Fraction(rng.randint(1, 31), 32) * margin / 2
        h = (1 - s) * center + s * w
        if inner_product(x_star, h) <= threshold:
            raise AssertionError("directed sample escaped the slice")
        d = l1_norm(center - h)
        distances.append(d)
        checked += 1
        if d >= bound:
            all_ok = False

    attempts = accepted = 0
    for _ in range(budget):
        attempts += 1
        w = _random_f_span(rng, pool)
        nw = l1_norm(w)
        if not nw:
            continue
        w = w * (1 / nw)
        if inner_product(x_star, w) > threshold:
            accepted += 1
            d = l1_norm(center - w)
            distances.append(d)
            checked += 1
            if d >= bound:
                all_ok = False

    return ExposureReport(
        node=node,
        epsilon=eps,
        slice_threshold=threshold,
        distance_bound=bound,
        boundary_distance=boundary_distance,
        samples_checked=checked,
        rejection_attempts=attempts,
        rejection_accepted=accepted,
        max_distance=max(distances),
        all_within_bound=all_ok,
    )


# ---------------------------------------------------------------------------
# witness procedures
# ---------------------------------------------------------------------------


def _check_h_sphere(g: TreeSpanElement) -> None:
    if g.f_part:
        raise ValueError("the element must lie in the h-span")
    if g.is_zero or l1_norm(g) != 1:
        raise ValueError("the element must lie on the unit sphere exactly")


def _measure_intersection(
    runs: Sequence[tuple[Fraction, Fraction, Fraction]], lo: Fraction, hi: Fraction
) -> Fraction:
    total = Fraction(0)
    for rlo, rhi, _ in runs:
        total += max(Fraction(0), min(hi, rhi) - max(lo, rlo))
    return total


def _step_support_violation(step: DyadicStep, nodes: Sequence[Node]) -> Fraction:
    """Measure of the set where the step is non-zero but the h-span built on
    ``nodes`` (all at one level) vanishes."""
    runs = [r for r in step.runs() if r[2]]
    total = sum((hi - lo for lo, hi, _ in runs), Fraction(0))
    level = len(nodes[0])
    res = step.resolution
    deep_start = max(res, 1)
    overlap = Fraction(0)
    for i in range(1, deep_start):
        for t in nodes:
            ((lo, hi),) = b_set(t, i)
            overlap += _measure_intersection(runs, lo, hi)
    if step.values[0]:
        # blocks of depth >= deep_start sit inside the first cell
        overlap += len(nodes) * Fraction(1, 2**level) * Fraction(1, 2**deep_start)
    return total - overlap


def _check_support_contained(
    functional: Functional, levelized: Mapping[Node, Fraction], level: int
) -> None:
    nodes = sorted(levelized)
    if isinstance(functional, SignPatternFunctional):
        common = max(level, functional.level)
        supported = {
            w
            for t in nodes
            for w in descendants(t, common - level)
        }
        for t, _ in functional.signs:
            for w in descendants(t, common - functional.level):
                if w not in supported:
                    raise ValueError(
                        "the functional must vanish outside the support of the element"
                    )
        return
    violation = _step_support_violation(functional, nodes)
    if violation:
        raise ValueError(
            "the functional must vanish outside the support of the element "
            f"(violation on a set of measure {violation})"
        )


@dataclass(frozen=True)
class NotRelativeDaugavetReport:
    """A denting direction close to a supported slice but far from nothing:
    the witness showing the slice contains a strongly exposed point whose
    distance to the reference element stays below 2."""

    node: Node
    sign: int
    slice_value: Fraction
    distance_plus: Fraction
    distance_minus: Fraction

    @property
    def min_distance(self) -> Fraction:
        return min(self.distance_plus, self.distance_minus)

    @property
    def strict(self) -> bool:
        return self.min_distance < 2


def not_relative_daugavet_witness(
    g: TreeSpanElement, x_star: Functional, epsilon: object
) -> NotRelativeDaugavetReport:
    """Extract a signed step inside every supporting slice of an h-span
    element, with exact distance below 2 to the element.

    Requires ``⟨x*, g⟩ = 1`` with unit essential sup and the functional
    carried by the support of ``g``; then every supported node is normed,
    the first one is refined through the martingale approximation until the
    tail drops below ``ε``, and a descendant step inside the slice is
    returned together with both exact distances ``‖g ± f_u‖``.
    """
    eps = rat(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    _check_h_sphere(g)
    if _ess_sup(x_star) != 1:
        raise ValueError("the functional must have unit essential sup")
    if inner_product(x_star, g) != 1:
        raise ValueError("the functional must support the element exactly")
    level = g.max_depth
    table = levelized_coefficients(g, level)
    _check_support_contained(x_star, table, level)
    for t, a in table.items():
        sign = 1 if a > 0 else -1
        if sign * inner_product(x_star, h_element(t)) != 1:
            raise AssertionError("supported node escaped the norming identity")
    t0, a0 = next(iter(sorted(table.items())))
    sign = 1 if a0 > 0 else -1
    m = 0
    while 2 * Fraction(1, 2 ** (m + level)) >= eps:
        m += 1
    witness: Node | None = None
    slice_value = Fraction(0)
    for u in descendants(t0, m):
        value = sign * inner_product(x_star, f_element(u))
        if value > 1 - eps:
            witness, slice_value = u, value
            break
    if witness is None:
        raise AssertionError("martingale refinement failed to enter the slice")
    f_u = f_element(witness)
    distance_plus = l1_norm(g + f_u)
    distance_minus = l1_norm(g - f_u)
    if min(distance_plus, distance_minus) >= 2:
        raise AssertionError("witness distance failed to drop below 2")
    return NotRelativeDaugavetReport(
        node=witness,
        sign=sign,
        slice_value=slice_value,
        distance_plus=distance_plus,
        distance_minus=distance_minus,
    )


@dataclass(frozen=True)
class DeltaWitnessReport:
    """An almost diametral element of the same slice: the witness that the
    reference element is a Delta-point."""

    y: TreeSpanElement
    node: Node | None
    sign: int
    slice_value: Fraction
    distance: Fraction
    support_measure: Fraction
    distance_bound: Fraction

    @property
    def meets_bound(self) -> bool:
        return self.distance >= self.distance_bound


def delta_witness(
    g: TreeSpanElement, x_star: Functional, alpha: object, epsilon: object
) -> DeltaWitnessReport:
    """Produce an element of the slice at distance at least ``2 - ε`` from
    the reference element of the h-span.

    A supported node whose signed limit function lies in the slice is pushed
    down the tree, at each step keeping the child with the larger pairing
    (the pairing never drops below the parent's), until the shared mass with
    the reference element is at most ``ε/2`` and the support measure of the
    witness drops below ``ε/4``.  All postconditions are checked exactly.
    """
    a = rat(alpha)
    eps = rat(epsilon)
    if a <= 0:
        raise ValueError("alpha must be positive")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    _check_h_sphere(g)
    if _ess_sup(x_star) > 1:
        raise ValueError("the functional must have essential sup at most 1")
    slice_value_g = inner_product(x_star, g)
    if slice_value_g <= 1 - a:
        raise ValueError("the element must lie in the slice of the functional")
    level = g.max_depth
    table = levelized_coefficients(g, level)
    if eps >= 2:
        support_measure = len(table) * Fraction(1, 2 ** (level + 1))
        return DeltaWitnessReport(
            y=g,
            node=None,
            sign=0,
            slice_value=slice_value_g,
            distance=Fraction(0),
            support_measure=support_measure,
            distance_bound=2 - eps,
        )
    start: Node | None = None
    magnitude = Fraction(0)
    sign = 0
    value = Fraction(0)
    for t, coeff in sorted(table.items()):
        s = 1 if coeff > 0 else -1
        v = s * inner_product(x_star, h_element(t))
        if v > 1 - a:
            start, magnitude, sign, value = t, abs(coeff), s, v
            break
    if start is None:
        raise AssertionError("slice membership failed to localize at a node")
    node = start
    m = 0
    while (
        2 * magnitude * Fraction(1, 2**m) > eps
        or Fraction(1, 2 ** (level + m + 1)) >= eps / 4
    ):
        children = [node + (0,), node + (1,)]
        values = [sign * inner_product(x_star, h_element(c)) for c in children]
        best = 0 if values[0] >= values[1] else 1
        node = children[best]
        value = values[best]
        m += 1
        if value <= 1 - a:
            raise AssertionError("descent dropped out of the slice")
    y = span_element(h={node: sign})
    distance = l1_norm(g - y)
    expected = 2 - 2 * magnitude * Fraction(1, 2**m)
    if distance != expected:
        raise AssertionError("distance failed to match the closed form")
    return DeltaWitnessReport(
        y=y,
        node=node,
        sign=sign,
        slice_value=value,
        distance=distance,
        support_measure=Fraction(1, 2 ** (level + m + 1)),
        distance_bound=2 - eps,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def element_to_json(e: TreeSpanElement) -> dict:
    """Render a span element as ``{"f": {bits: "p/q"}, "h": {bits: "p/q"}}``."""
    return {
        "f": {node_to_string(t): fmt_rat(a) for t, a in e.f_part},
        "h": {node_to_string(t): fmt_rat(a) for t, a in e.h_part},
    }


def element_from_json(doc: object) -> TreeSpanElement:
    if not isinstance(doc, dict):
        raise ValueError("span element document must be an object")
    unknown = set(doc) - {"f", "h"}
    if unknown:
        raise ValueError(f"unknown span element keys: {sorted(unknown)}")
    parts: dict[str, dict[Node, Fraction]] = {}
    for key in ("f", "h"):
        table = doc.get(key, {})
        if not isinstance(table, dict):
            raise ValueError(f"coefficient table {key!r} must be an object")
        parts[key] = {
            node_from_string(bits): parse_rat(value) for bits, value in table.items()
        }
    return span_element(f=parts["f"], h=parts["h"])
