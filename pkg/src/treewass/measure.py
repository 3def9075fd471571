"""Finitely supported probability measures and their pushforwards."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from typing import Hashable

from ._numeric import MASS_TOL, is_exact
from .errors import NegativeMass, NotNormalized, UnmappedPoint

__all__ = ["DiscreteMeasure", "make_measure", "dirac", "pushforward"]


class DiscreteMeasure(Mapping):
    """Immutable sparse probability measure ``point -> mass``.

    Zero masses are never stored.  Build instances through
    :func:`make_measure`, which validates sign and normalization.
    """

    __slots__ = ("_masses", "_exact")

    def __init__(self, masses: dict, exact: bool):
        self._masses = masses
        self._exact = exact

    @property
    def masses(self) -> dict:
        return dict(self._masses)

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def support(self) -> list:
        return list(self._masses)

    def total(self):
        return sum(self._masses.values(), 0)

    def __getitem__(self, point):
        return self._masses[point]

    def get(self, point, default=0):
        return self._masses.get(point, default)

    def __iter__(self):
        return iter(self._masses)

    def __len__(self) -> int:
        return len(self._masses)

    def __eq__(self, other) -> bool:
        if isinstance(other, DiscreteMeasure):
            return self._masses == other._masses
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._masses.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {v}" for k, v in self._masses.items())
        return f"DiscreteMeasure({{{body}}})"


def make_measure(pairs: Iterable[tuple[Hashable, object]] | Mapping, tol: float = MASS_TOL) -> DiscreteMeasure:
    """Validate ``(point, mass)`` pairs into a :class:`DiscreteMeasure`.

    Duplicate points are summed and zero entries dropped.  With int/Fraction
    masses the total must be exactly 1; otherwise within ``tol``.
    """
    if isinstance(pairs, Mapping):
        pairs = pairs.items()
    masses: dict = {}
    for point, mass in pairs:
        if mass < 0:
            raise NegativeMass(f"point {point!r} has negative mass {mass!r}")
        masses[point] = masses.get(point, 0) + mass
    exact = is_exact(*masses.values())
    total = sum(masses.values(), 0)
    if exact:
        if total != 1:
            raise NotNormalized(f"masses sum to {total}, expected exactly 1")
    elif abs(total - 1) > tol:
        raise NotNormalized(f"masses sum to {total!r}, expected 1 within {tol}")
    return DiscreteMeasure({p: m for p, m in masses.items() if m != 0}, exact)


def dirac(point, exact: bool = False) -> DiscreteMeasure:
    from fractions import Fraction

    return DiscreteMeasure({point: Fraction(1) if exact else 1.0}, exact)


def pushforward(f: Mapping | Callable, m: DiscreteMeasure) -> DiscreteMeasure:
    """Image measure: the mass at ``y`` is the ``m``-mass of ``f^{-1}(y)``."""
    lookup = f.__getitem__ if isinstance(f, Mapping) else f
    out: dict = {}
    for x, mass in m.items():
        try:
            y = lookup(x)
        except (KeyError, IndexError):
            raise UnmappedPoint(f"map is undefined at support point {x!r}") from None
        out[y] = out.get(y, 0) + mass
    return DiscreteMeasure(out, m.exact)
