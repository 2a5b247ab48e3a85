"""Exact rational scalars.

All coefficient arithmetic in this package is exact.  We use gmpy2's mpq
(C-speed, arbitrary precision, always stored in lowest terms with a positive
denominator) and fall back to fractions.Fraction when gmpy2 is unavailable.
Both types satisfy the invariants the rest of the package relies on:
gcd(num, den) == 1, den > 0, and hash/equality consistent with the exact
rational value.
"""
from __future__ import annotations

from typing import Union

try:  # pragma: no cover - exercised implicitly by the import that succeeds
    from gmpy2 import mpq as Q

    _BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

    _BACKEND = "fractions"

RationalLike = Union[int, str, "Q"]

ZERO = Q(0)
ONE = Q(1)


def rational(value: RationalLike, den: int | None = None) -> Q:
    """Coerce ints, 'p/q' strings, or rationals to the canonical scalar type."""
    if den is not None:
        return Q(value, den)
    return Q(value)


def rational_from_parts(num: str, den: str) -> Q:
    """Rebuild a rational from decimal-string numerator/denominator."""
    return Q(int(num), int(den))


def rational_parts(q) -> tuple[str, str]:
    """Decimal-string (numerator, denominator) of a rational, canonical form."""
    q = Q(q)
    return str(int(q.numerator)), str(int(q.denominator))
