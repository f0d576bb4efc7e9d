"""Exact rational values and their "p/q" wire format.

All costs, bids, LP data, and Nash-bound values in this package are
`fractions.Fraction` instances (always in lowest terms, positive
denominator). JSON files carry them as strings like "3/2"; bare
integers are accepted as shorthand.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError

Rational = Fraction


def parse_rational(value) -> Fraction:
    """Parse a JSON-level value ("p/q" string, int, or float) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q" (denominator always explicit, e.g. "2/1")."""
    return f"{value.numerator}/{value.denominator}"
