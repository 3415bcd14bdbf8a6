"""Angle arithmetic, rank-based pseudo-observations, and the angular
probability integral transform (APIT).

Angles live on the half-open interval ``(0, 2*pi]``: a value of exactly
zero is represented as ``2*pi``.  The APIT maps any sample of a
continuous random variable to angles ``2*pi*rank/(n+1)`` that are
discrete-uniform on the circle; sums and differences of such angles
(mod ``2*pi``) are the raw material of the independence tests in
:mod:`circindep.independence`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError

TWO_PI = 2.0 * np.pi

__all__ = [
    "TWO_PI",
    "CircularSample",
    "PseudoObservations",
    "reduce_mod_2pi",
    "pseudo_observations",
    "apit",
    "apit_combine",
    "mean_resultant_length",
]


@dataclass(frozen=True)
class CircularSample:
    """An ordered sample of angles in radians, each in ``(0, 2*pi]``."""

    angles: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.angles, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("a circular sample must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("angles must be finite")
        if np.any(arr <= 0.0) or np.any(arr > TWO_PI):
            raise DomainError("angles must lie in (0, 2*pi]")
        arr.flags.writeable = False
        object.__setattr__(self, "angles", arr)

    @property
    def n(self) -> int:
        return self.angles.size

    def __len__(self) -> int:
        return self.angles.size


@dataclass(frozen=True)
class PseudoObservations:
    """Rank-based marginal CDF estimates, each strictly inside (0, 1)."""

    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.u, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("pseudo-observations must be a non-empty 1-d array")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("pseudo-observations must lie strictly in (0, 1)")
        arr.flags.writeable = False
        object.__setattr__(self, "u", arr)

    @property
    def n(self) -> int:
        return self.u.size

    def __len__(self) -> int:
        return self.u.size


def _as_angles(s) -> np.ndarray:
    """Accept a CircularSample or array_like of angles; return the array."""
    if isinstance(s, CircularSample):
        return s.angles
    return CircularSample(np.atleast_1d(np.asarray(s, dtype=float))).angles


def reduce_mod_2pi(x):
    """Reduce radians into ``(0, 2*pi]``; exact multiples of ``2*pi`` map to ``2*pi``.

    Accepts a scalar or array; returns the same shape.  Idempotent.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("angle must be finite")
    reduced = np.mod(arr, TWO_PI)
    reduced = np.where(reduced == 0.0, TWO_PI, reduced)
    if np.ndim(x) == 0:
        return float(reduced)
    return reduced


def pseudo_observations(xs) -> PseudoObservations:
    """Rank transform ``u_i = rank(x_i) / (n + 1)``, midranks for ties.

    The ``n + 1`` denominator keeps every value strictly inside (0, 1),
    and midranks make the output invariant to the input ordering of
    tied values.
    """
    arr = np.asarray(xs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("input must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise DomainError("input values must be finite")
    ranks = rankdata(arr, method="average")
    return PseudoObservations(ranks / (arr.size + 1))


def apit(xs) -> CircularSample:
    """Angular probability integral transform of a real sample.

    Maps each observation to the angle ``2*pi * rank/(n+1)``.  For a
    tie-free sample the result is a permutation of the equally spaced
    angles ``2*pi*k/(n+1)``, ``k = 1..n``, so under independence the
    transform of any continuous variable is (discretely) uniform on the
    circle.
    """
    u = pseudo_observations(xs).u
    return CircularSample(reduce_mod_2pi(TWO_PI * u))


def apit_combine(a, b, sign: str = "sum") -> CircularSample:
    """Element-wise sum or difference of two angle samples, mod ``2*pi``.

    ``sign`` is ``"sum"`` for ``a + b`` or ``"difference"`` for ``a - b``.
    """
    arr_a = _as_angles(a)
    arr_b = _as_angles(b)
    if arr_a.size != arr_b.size:
        raise DomainError(
            f"length mismatch: {arr_a.size} vs {arr_b.size} observations"
        )
    if sign == "sum":
        combined = arr_a + arr_b
    elif sign == "difference":
        combined = arr_a - arr_b
    else:
        raise DomainError(f"sign must be 'sum' or 'difference', got {sign!r}")
    return CircularSample(reduce_mod_2pi(combined))


def mean_resultant_length(s) -> float:
    """Mean resultant length of a circular sample.

    The norm of the average unit vector: 1 for a point mass, 0 for
    perfectly balanced dispersion.  Invariant under common rotation.
    """
    theta = _as_angles(s)
    return float(np.abs(np.mean(np.exp(1j * theta))))
