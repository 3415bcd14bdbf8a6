"""Samplers for bivariate dependence models used in the power studies.

Two families are covered: Johnson and Wehrly (1977) circular-circular and
circular-linear joint densities, which couple arbitrary margins through a
circular joining density, and linear-linear joint distributions built
from Gaussian and Frank copulas.  All samplers use conditional (inverse
Rosenblatt) construction: rejection-free, and for the Johnson-Wehrly
models the drawn joining angle can be recovered exactly from each
generated pair, which the tests exploit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .circular import TWO_PI, CircularSample
from .errors import DomainError
from .nnts import NNTSParams, _quantile_vec, nnts_cdf

__all__ = [
    "LinearMarginal",
    "BivariateSample",
    "marginal_cdf",
    "marginal_quantile",
    "jw_sample_circular_circular",
    "jw_sample_circular_linear",
    "gaussian_copula_sample",
    "frank_copula_sample",
]

_U_LO = 1e-300
_U_HI = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class LinearMarginal:
    """A linear marginal distribution with closed-form CDF and quantile."""

    kind: str
    params: tuple

    @classmethod
    def exponential(cls, rate: float) -> "LinearMarginal":
        if not (rate > 0):
            raise DomainError("exponential rate must be positive")
        return cls("exponential", (float(rate),))

    @classmethod
    def normal(cls, mean: float, sd: float) -> "LinearMarginal":
        if not (sd > 0):
            raise DomainError("normal sd must be positive")
        return cls("normal", (float(mean), float(sd)))

    @classmethod
    def cauchy(cls, location: float, scale: float) -> "LinearMarginal":
        if not (scale > 0):
            raise DomainError("cauchy scale must be positive")
        return cls("cauchy", (float(location), float(scale)))

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        if self.kind == "exponential":
            (rate,) = self.params
            out = np.where(arr > 0, -np.expm1(-rate * np.maximum(arr, 0.0)), 0.0)
        elif self.kind == "normal":
            mean, sd = self.params
            out = ndtr((arr - mean) / sd)
        elif self.kind == "cauchy":
            loc, scale = self.params
            out = 0.5 + np.arctan((arr - loc) / scale) / np.pi
        else:  # pragma: no cover - constructors forbid other kinds
            raise DomainError(f"unknown marginal kind {self.kind!r}")
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, u):
        arr = np.asarray(u, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("u must lie strictly in (0, 1)")
        if self.kind == "exponential":
            (rate,) = self.params
            out = -np.log1p(-arr) / rate
        elif self.kind == "normal":
            mean, sd = self.params
            out = mean + sd * ndtri(arr)
        elif self.kind == "cauchy":
            loc, scale = self.params
            out = loc + scale * np.tan(np.pi * (arr - 0.5))
        else:  # pragma: no cover
            raise DomainError(f"unknown marginal kind {self.kind!r}")
        return float(out) if np.ndim(u) == 0 else out


def marginal_cdf(m: LinearMarginal, x):
    """CDF of a linear marginal at ``x`` (scalar or array)."""
    return m.cdf(x)


def marginal_quantile(m: LinearMarginal, u):
    """Quantile of a linear marginal at ``u`` in (0, 1) (scalar or array)."""
    return m.quantile(u)


@dataclass(frozen=True)
class BivariateSample:
    """Paired observations with each margin tagged circular or linear."""

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    kind_x: str = "linear"
    kind_y: str = "linear"

    def __post_init__(self):
        for name, kind in (("kind_x", self.kind_x), ("kind_y", self.kind_y)):
            if kind not in ("circular", "linear"):
                raise DomainError(f"{name} must be 'circular' or 'linear'")
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size or x.size == 0:
            raise DomainError("margins must be non-empty 1-d arrays of equal length")
        for arr, kind in ((x, self.kind_x), (y, self.kind_y)):
            if not np.all(np.isfinite(arr)):
                raise DomainError("observations must be finite")
            if kind == "circular":
                CircularSample(arr)  # enforces the (0, 2*pi] invariant
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size


def _check_sign(sign: str) -> str:
    if sign not in ("sum", "difference"):
        raise DomainError(f"sign must be 'sum' or 'difference', got {sign!r}")
    return sign


def _joining_fraction(u_first: np.ndarray, omega: np.ndarray, sign: str) -> np.ndarray:
    # Solve 2*pi*(F1 +/- v) = omega (mod 2*pi) for the conditional CDF
    # value v of the second margin.
    if sign == "sum":
        v = np.mod(omega / TWO_PI - u_first, 1.0)
    else:
        v = np.mod(u_first - omega / TWO_PI, 1.0)
    return v


def jw_sample_circular_circular(
    g: NNTSParams,
    m1: NNTSParams,
    m2: NNTSParams,
    sign: str,
    n: int,
    rng: np.random.Generator,
) -> BivariateSample:
    """Sample a Johnson-Wehrly circular-circular model.

    Joint density ``2*pi * g(2*pi*(F1 +/- F2)) * f1 * f2``: the first
    angle comes from its margin, the joining angle ``omega`` from ``g``,
    and the second angle is the marginal quantile of the conditional CDF
    value implied by ``omega``.  ``g`` uniform (degree 0) gives exact
    independence.
    """
    _check_sign(sign)
    if n < 1:
        raise DomainError("sample size must be at least 1")
    theta1 = _quantile_vec(m1, 1.0 - rng.random(n))
    omega = _quantile_vec(g, 1.0 - rng.random(n))
    v = _joining_fraction(nnts_cdf(m1, theta1), omega, sign)
    v = np.where(v == 0.0, 1.0, v)  # v = 0 and v = 1 are the same angle
    theta2 = _quantile_vec(m2, v)
    return BivariateSample(theta1, theta2, "circular", "circular")


def jw_sample_circular_linear(
    g: NNTSParams,
    m_circ: NNTSParams,
    m_lin: LinearMarginal,
    sign: str,
    n: int,
    rng: np.random.Generator,
) -> BivariateSample:
    """Sample a Johnson-Wehrly circular-linear model (see the circular-
    circular variant; the second margin is linear)."""
    _check_sign(sign)
    if n < 1:
        raise DomainError("sample size must be at least 1")
    theta = _quantile_vec(m_circ, 1.0 - rng.random(n))
    omega = _quantile_vec(g, 1.0 - rng.random(n))
    v = _joining_fraction(nnts_cdf(m_circ, theta), omega, sign)
    t = m_lin.quantile(np.clip(v, _U_LO, _U_HI))
    return BivariateSample(theta, t, "circular", "linear")


def gaussian_copula_sample(
    rho: float,
    m1: LinearMarginal,
    m2: LinearMarginal,
    n: int,
    rng: np.random.Generator,
) -> BivariateSample:
    """Sample a linear-linear distribution with a Gaussian copula.

    A correlated standard-normal pair (2x2 Cholesky factor) is pushed
    through the normal CDF and then through the marginal quantiles.
    """
    if not (-1.0 < rho < 1.0):
        raise DomainError("rho must lie strictly in (-1, 1)")
    if n < 1:
        raise DomainError("sample size must be at least 1")
    z = rng.standard_normal((n, 2))
    z2 = rho * z[:, 0] + np.sqrt(1.0 - rho**2) * z[:, 1]
    u1 = np.clip(ndtr(z[:, 0]), _U_LO, _U_HI)
    u2 = np.clip(ndtr(z2), _U_LO, _U_HI)
    return BivariateSample(m1.quantile(u1), m2.quantile(u2), "linear", "linear")


def frank_copula_sample(
    phi: float,
    m1: LinearMarginal,
    m2: LinearMarginal,
    n: int,
    rng: np.random.Generator,
) -> BivariateSample:
    """Sample a linear-linear distribution with a Frank copula.

    Conditional inversion: with ``u, w`` independent uniforms, ``v`` is
    the ``w``-quantile of the conditional copula given ``u``::

        v = -(1/phi) * ln(1 + w*(e^{-phi} - 1) / (w + (1-w)*e^{-phi*u}))

    ``phi = 0`` is treated as the exact independence limit ``v = w``.
    """
    if phi < 0:
        raise DomainError("phi must be nonnegative")
    if n < 1:
        raise DomainError("sample size must be at least 1")
    u = 1.0 - rng.random(n)
    w = 1.0 - rng.random(n)
    if phi == 0.0:
        v = w
    else:
        v = -np.log1p(w * np.expm1(-phi) / (w + (1.0 - w) * np.exp(-phi * u))) / phi
    u = np.clip(u, _U_LO, _U_HI)
    v = np.clip(v, _U_LO, _U_HI)
    return BivariateSample(m1.quantile(u), m2.quantile(v), "linear", "linear")
