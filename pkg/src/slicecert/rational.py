"""Helpers for exact rational values and their serialized forms.

All public data crosses module boundaries as `fractions.Fraction`; files
and reports carry rationals as strings ``"p/q"`` (or ``"p"`` when the
denominator is 1).  Approximate decimal renderings are 20 significant
digits and always marked as approximate by the callers that emit them.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction

Rat = Fraction


def rat(value: int | str | Fraction, den: int | None = None) -> Fraction:
    """Build a Fraction from an int, a ``"p/q"`` string, or a pair."""
    if den is not None:
        return Fraction(value, den)  # type: ignore[arg-type]
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return parse_rat(value)


def parse_rat(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction.

    Raises ValueError on anything else (floats are rejected on purpose:
    inputs must be exact).
    """
    if not isinstance(text, str):
        raise ValueError(f"rational value must be a string, got {text!r}")
    s = text.strip()
    if "/" in s:
        num_s, den_s = s.split("/", 1)
        num, den = int(num_s), int(den_s)
        if den == 0:
            raise ValueError(f"zero denominator in rational {text!r}")
        return Fraction(num, den)
    return Fraction(int(s))


def fmt_rat(x: Fraction) -> str:
    """Render a Fraction as ``"p/q"`` (or ``"p"`` for integers)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def approx_decimal(x: Fraction, digits: int = 20) -> str:
    """A ``digits``-significant-digit decimal rendering (approximate)."""
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return str(d)
