"""Exact rational parsing and formatting.

Rationals are stdlib ``fractions.Fraction`` values throughout the package:
arbitrary precision, automatically reduced, hashable, and exact.  The JSON
surface encodes them as strings, either ``"p"`` or ``"p/q"`` with a nonzero
denominator; this module owns that encoding.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import RationalParseError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into a Fraction.

    Rejects anything else (whitespace padding aside), including zero
    denominators such as ``"1/0"``.
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a rational string, got {text!r}")
    stripped = text.strip()
    if not _RATIONAL_RE.match(stripped):
        raise RationalParseError(f"not a rational literal: {text!r}")
    if "/" in stripped:
        num, den = stripped.split("/")
        if int(den) == 0:
            raise RationalParseError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(stripped))


def format_rational(value: Fraction) -> str:
    """Format a Fraction as ``"p"`` or ``"p/q"`` (always reduced)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
