"""Helpers for running the same code over floats or exact rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

MASS_TOL = 1e-12
FLUSH_TOL = 1e-15


def is_exact(*values) -> bool:
    """True when every value is an int or a Fraction (rational mode)."""
    return all(isinstance(v, Rational) and not isinstance(v, bool) for v in values)


def exact_or_float(value, exact: bool):
    if exact:
        if isinstance(value, float):
            return Fraction(value)
        return Fraction(value) if not isinstance(value, Fraction) else value
    return float(value)


def tolerance(exact: bool, tol: float = MASS_TOL):
    return 0 if exact else tol
