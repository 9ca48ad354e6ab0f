"""Exact rational helpers shared across the package.

All grading values are `fractions.Fraction`; the only non-rational value in
the system is the sentinel NEG_INF used for the degree of 0 and for "exact,
no cutoff".  Helpers below keep arithmetic with the sentinel explicit so no
float ever leaks into a coefficient.
"""
from __future__ import annotations

from fractions import Fraction

NEG_INF = float("-inf")

Degree = "Fraction | float"  # a Fraction, or NEG_INF


def is_neg_inf(x) -> bool:
    return x == NEG_INF


def dsum(a, b):
    """Degree addition: NEG_INF is absorbing."""
    if is_neg_inf(a) or is_neg_inf(b):
        return NEG_INF
    return a + b


def dmax(*vals):
    out = NEG_INF
    for v in vals:
        if is_neg_inf(v):
            continue
        if is_neg_inf(out) or v > out:
            out = v
    return out


def dmin(a, b):
    if is_neg_inf(a) or is_neg_inf(b):
        return NEG_INF
    return min(a, b)


def parse_rational(s) -> Fraction:
    """Parse "p/q" / "p" strings (or ints) into an exact Fraction.

    Floats are rejected: they have no place in an exact pipeline.
    """
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {s!r}") from exc
    raise ValueError(f"not a rational: {s!r} (floats are not accepted)")


def rational_str(q) -> str:
    """Canonical "p/q" (or "p") string for an exact rational."""
    return str(Fraction(q))
