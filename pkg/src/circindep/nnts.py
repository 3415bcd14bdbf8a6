"""Nonnegative trigonometric-sum (NNTS) circular densities.

An NNTS density of degree ``M`` is the squared modulus of a complex
trigonometric polynomial::

    f(theta) = (1/2*pi) * | sum_{k=0..M} c_k exp(i*k*theta) |^2

with complex coefficients constrained to the unit hypersphere
``sum_k |c_k|^2 = 1`` so the density integrates to one.  ``M = 0`` is the
circular uniform density; as ``c_0 -> 1`` every member converges to it,
which makes the family convenient for building alternatives at a
controlled distance from uniformity.  For identifiability ``c_0`` is kept
real and nonnegative (a global phase leaves the density unchanged).

The CDF has a closed form obtained by integrating term by term, so
sampling uses plain inverse-CDF evaluation and maximum likelihood runs
as projected gradient ascent on the coefficient hypersphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circular import TWO_PI, CircularSample, _as_angles
from .errors import DomainError, NumericError

__all__ = [
    "NNTSParams",
    "nnts_density",
    "nnts_cdf",
    "nnts_quantile",
    "nnts_sample",
    "nnts_fit",
    "lambda_c0",
    "random_nnts",
    "log_likelihood",
    "log_likelihood_grad",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class NNTSParams:
    """Degree-``M`` coefficient vector on the unit hypersphere.

    ``c`` has ``M + 1`` complex entries; ``c[0]`` is real and nonnegative.
    """

    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.c, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("coefficients must be a non-empty 1-d complex array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        norm_sq = float(np.sum(np.abs(arr) ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise DomainError(
                f"squared norms of coefficients must sum to 1 (got {norm_sq!r})"
            )
        if abs(arr[0].imag) > _NORM_TOL or arr[0].real < -_NORM_TOL:
            raise DomainError("c[0] must be real and nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "c", arr)

    @property
    def M(self) -> int:
        return self.c.size - 1

    @property
    def c0(self) -> float:
        return float(self.c[0].real)

    @classmethod
    def canonical(cls, raw) -> "NNTSParams":
        """Normalize a raw coefficient vector onto the hypersphere.

        Rescales to unit norm and multiplies by the global phase that
        makes the leading coefficient real and nonnegative.
        """
        arr = np.asarray(raw, dtype=complex).copy()
        norm = np.sqrt(np.sum(np.abs(arr) ** 2))
        if norm == 0.0 or not np.isfinite(norm):
            raise DomainError("coefficient vector must be nonzero and finite")
        arr /= norm
        if abs(arr[0]) > 0.0:
            arr *= np.conj(arr[0]) / abs(arr[0])
        arr[0] = arr[0].real + 0j
        return cls(arr)

    def to_json_dict(self) -> dict:
        return {"M": self.M, "c": [[z.real, z.imag] for z in self.c]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "NNTSParams":
        c = np.array([complex(re, im) for re, im in data["c"]])
        if len(c) != data["M"] + 1:
            raise DomainError("coefficient count does not match declared degree")
        return cls(c)


def _poly_values(params: NNTSParams, theta: np.ndarray) -> np.ndarray:
    ks = np.arange(params.c.size)
    return np.exp(1j * theta[:, None] * ks[None, :]) @ params.c


def nnts_density(params: NNTSParams, theta):
    """Density value(s) at ``theta`` (radians; scalar or array).

    Nonnegative by construction and periodic with period ``2*pi``.
    """
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    s = _poly_values(params, arr)
    out = (s.real**2 + s.imag**2) / TWO_PI
    if np.ndim(theta) == 0:
        return float(out[0])
    return out


def _cdf_raw(params: NNTSParams, theta: np.ndarray) -> np.ndarray:
    # F(t) = t/(2*pi) + (1/pi) * sum_{d>=1} Re[B_d (e^{i d t} - 1) / (i d)]
    # where B_d collects the products c_k conj(c_l) with k - l = d.  The
    # first term uses the unit-norm constraint; the rest integrates each
    # off-diagonal oscillation exactly.
    c = params.c
    m = params.M
    out = theta / TWO_PI
    if m > 0:
        outer = c[:, None] * np.conj(c[None, :])
        b = np.array(
            [np.sum(np.diagonal(outer, offset=-d)) for d in range(1, m + 1)]
        )
        ds = np.arange(1, m + 1)
        osc = (np.exp(1j * theta[:, None] * ds[None, :]) - 1.0) / (1j * ds[None, :])
        out = out + (osc @ b).real / np.pi
    return out


def nnts_cdf(params: NNTSParams, theta):
    """Closed-form CDF at ``theta`` in ``[0, 2*pi]`` (scalar or array).

    Nondecreasing with ``F(0) = 0`` and ``F(2*pi) = 1``; values are
    clamped to [0, 1] to absorb roundoff at the endpoints.
    """
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(arr < 0.0) or np.any(arr > TWO_PI):
        raise DomainError("theta must lie in [0, 2*pi]")
    out = np.clip(_cdf_raw(params, arr), 0.0, 1.0)
    if np.ndim(theta) == 0:
        return float(out[0])
    return out


def _quantile_vec(params: NNTSParams, u: np.ndarray, max_iter: int = 200) -> np.ndarray:
    # Bracketed bisection on the monotone CDF; ~60 halvings of (0, 2*pi]
    # put the bracket below 1e-13, far inside the 1e-10 contract.
    lo = np.zeros_like(u)
    hi = np.full_like(u, TWO_PI)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = _cdf_raw(params, mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) <= 1e-13:
            break
    else:
        raise NumericError("quantile bisection failed to converge")
    theta = 0.5 * (lo + hi)
    # u > 0 forces theta > 0; map only an exact endpoint hit to 2*pi.
    return np.where(theta <= 0.0, TWO_PI, theta)


def nnts_quantile(params: NNTSParams, u: float) -> float:
    """Inverse CDF: the angle ``theta`` with ``F(theta) = u``, ``u`` in (0, 1)."""
    if not (0.0 < u < 1.0):
        raise DomainError("u must lie strictly in (0, 1)")
    return float(_quantile_vec(params, np.array([u]))[0])


def nnts_sample(params: NNTSParams, n: int, rng: np.random.Generator) -> CircularSample:
    """Draw ``n`` i.i.d. angles by inverse-CDF sampling."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    u = 1.0 - rng.random(n)  # in (0, 1]
    return CircularSample(_quantile_vec(params, u))


def log_likelihood(c, theta) -> float:
    """Log-likelihood of a coefficient vector for observed angles.

    ``sum_i log f(theta_i)`` with ``f`` the NNTS density for ``c``; the
    vector need not be normalized (used internally during fitting).
    Returns ``-inf`` when the polynomial vanishes at an observation.
    """
    c = np.asarray(c, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    ks = np.arange(c.size)
    s = np.exp(1j * theta[:, None] * ks[None, :]) @ c
    q = s.real**2 + s.imag**2
    if np.any(q <= 0.0):
        return -np.inf
    return float(np.sum(np.log(q)) - theta.size * np.log(TWO_PI))


def log_likelihood_grad(c, theta) -> np.ndarray:
    """Euclidean gradient of :func:`log_likelihood` in real coordinates.

    Entry ``k`` packs ``(d/d Re(c_k)) + i (d/d Im(c_k))``.
    """
    c = np.asarray(c, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    ks = np.arange(c.size)
    basis = np.exp(1j * theta[:, None] * ks[None, :])
    s = basis @ c
    q = s.real**2 + s.imag**2
    return 2.0 * (basis.conj().T @ (s / q))


def _grad_state(basis, c):
    s = basis @ c
    q = s.real**2 + s.imag**2
    if np.any(q <= 1e-300):
        return None
    loglik = float(np.sum(np.log(q)) - basis.shape[0] * np.log(TWO_PI))
    grad = 2.0 * (basis.conj().T @ (s / q))
    radial = float(np.real(np.vdot(c, grad)))
    tangent = grad - radial * c
    gnorm = float(np.sqrt(np.sum(tangent.real**2 + tangent.imag**2)))
    return loglik, s, q, grad, radial, tangent, gnorm


def _newton_direction(basis, c, s, q, grad, radial):
    # Tangent-space Newton step for the sphere-constrained likelihood,
    # assembled in real coordinates x = [Re c; Im c].  The likelihood is
    # invariant under both scaling (handled by the constraint) and a
    # global phase, so the radial direction and the phase-orbit direction
    # are pinned before solving.
    m = c.size
    u_feat = np.hstack([basis.real, -basis.imag])
    v_feat = np.hstack([basis.imag, basis.real])
    inv_q = 1.0 / q
    term1 = 2.0 * (
        u_feat.T @ (u_feat * inv_q[:, None]) + v_feat.T @ (v_feat * inv_q[:, None])
    )
    w = (2.0 * s.real[:, None] * u_feat + 2.0 * s.imag[:, None] * v_feat) * inv_q[:, None]
    hess = term1 - w.T @ w

    x = np.concatenate([c.real, c.imag])
    g_real = np.concatenate([grad.real, grad.imag])
    g_tan = g_real - radial * x
    eye = np.eye(2 * m)
    proj = eye - np.outer(x, x)
    hess_r = proj @ (hess - radial * eye) @ proj
    phase = np.concatenate([-c.imag, c.real])  # d/dphi of exp(i*phi)*c at 0
    pin = 1.0 + float(np.abs(hess_r).sum())
    hess_r -= pin * (np.outer(x, x) + np.outer(phase, phase))
    try:
        xi = np.linalg.solve(hess_r, -g_tan)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(xi)):
        return None
    return xi[:m] + 1j * xi[m:]


def _ascend(basis, c, max_iter, grad_tol):
    # Projected gradient ascent on the unit sphere (tangent step, retract
    # by renormalization, Armijo backtracking), switching to tangent-space
    # Newton steps once the gradient is small.  Newton candidates are
    # accepted on gradient-norm decrease rather than likelihood increase:
    # near the optimum likelihood differences sink below roundoff while
    # the gradient norm remains informative.
    state = _grad_state(basis, c)
    if state is None:
        return c, -np.inf, np.inf, False
    loglik, s, q, grad, radial, tangent, gnorm = state
    step = 1.0 / basis.shape[0]
    for _ in range(max_iter):
        if gnorm < grad_tol:
            return c, loglik, gnorm, True
        moved = False
        if gnorm < 1.0:
            xi = _newton_direction(basis, c, s, q, grad, radial)
            if xi is not None:
                scale = 1.0
                for _ in range(25):
                    cand = c + scale * xi
                    cand /= np.sqrt(np.sum(np.abs(cand) ** 2))
                    cand_state = _grad_state(basis, cand)
                    if cand_state is not None and cand_state[6] < 0.9 * gnorm:
                        c = cand
                        loglik, s, q, grad, radial, tangent, gnorm = cand_state
                        moved = True
                        break
                    scale *= 0.5
        if not moved:
            accepted = False
            for _ in range(60):
                cand = c + step * tangent
                cand /= np.sqrt(np.sum(np.abs(cand) ** 2))
                cand_state = _grad_state(basis, cand)
                if (
                    cand_state is not None
                    and cand_state[0] >= loglik + 1e-4 * step * gnorm**2
                ):
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                # Flat to machine precision along the ascent direction and
                # Newton (if applicable) brought no further progress.
                return c, loglik, gnorm, gnorm < grad_tol
            c = cand
            loglik, s, q, grad, radial, tangent, gnorm = cand_state
            step *= 2.0
    return c, loglik, gnorm, False


_FIT_START_SEED = 20170829


def nnts_fit(s, M: int, max_iter: int = 5000, grad_tol: float = 1e-6) -> NNTSParams:
    """Maximum-likelihood NNTS fit of degree ``M``.

    Runs projected gradient ascent from the uniform-density start and
    four seeded random starts, keeping the best converged likelihood
    (ties broken by start order).  Convergence means the tangent
    (Lagrangian) gradient norm drops below ``grad_tol``.  The returned
    coefficients are phase-rotated so ``c[0]`` is real and nonnegative.

    Raises :class:`NumericError` carrying the best iterate if no start
    converges within ``max_iter`` iterations.
    """
    theta = _as_angles(s)
    if M < 0:
        raise DomainError("degree must be nonnegative")
    if theta.size < 2 * M + 2:
        raise DomainError(
            f"need at least {2 * M + 2} observations to fit degree M={M}"
        )
    if M == 0:
        return NNTSParams(np.array([1.0 + 0j]))

    ks = np.arange(M + 1)
    basis = np.exp(1j * theta[:, None] * ks[None, :])

    starts = [np.concatenate(([1.0 + 0j], np.zeros(M, dtype=complex)))]
    start_rng = np.random.default_rng(_FIT_START_SEED)
    for _ in range(4):
        raw = start_rng.standard_normal(M + 1) + 1j * start_rng.standard_normal(M + 1)
        starts.append(raw / np.sqrt(np.sum(np.abs(raw) ** 2)))

    best = None  # (loglik, order, c) among converged starts
    fallback = None  # best iterate overall, for the failure path
    for order, c0 in enumerate(starts):
        c, loglik, _, converged = _ascend(basis, c0, max_iter, grad_tol)
        if fallback is None or loglik > fallback[0]:
            fallback = (loglik, c)
        if converged and (best is None or loglik > best[0]):
            best = (loglik, order, c)
    if best is None:
        raise NumericError(
            "no fitting start converged",
            best=NNTSParams.canonical(_dominant_rep(fallback[1])),
        )
    return NNTSParams.canonical(_dominant_rep(best[2]))


def _dominant_rep(c: np.ndarray) -> np.ndarray:
    # The reversed-conjugate coefficient vector produces the identical
    # density, so the maximizer comes in two equivalent representations.
    # Pick the one whose leading coefficient dominates the trailing one;
    # this keeps the dependence measure on its intended [0, 1] scale.
    if abs(c[-1]) > abs(c[0]):
        return np.conj(c[::-1])
    return c


def lambda_c0(params: NNTSParams) -> float:
    """Dependence measure ``((M+1)/M) * (1 - c_0^2)``, clamped to [0, 1].

    For the degree-1 fit of combined transformed angles this is 0 at
    independence (uniform fit, ``c_0 = 1``) and 1 at the maximal
    concentration the family allows (``c_0^2 = 1/2``).
    """
    if params.M < 1:
        raise DomainError("the dependence measure needs degree M >= 1")
    value = (params.M + 1) / params.M * (1.0 - params.c0**2)
    return min(1.0, max(0.0, value))


def random_nnts(M: int, c0: float, seed: int) -> NNTSParams:
    """Random NNTS parameters with a prescribed leading coefficient.

    ``c_0`` is fixed at the given value; the remaining coefficients are
    i.i.d. complex Gaussians rescaled so the vector sits on the unit
    hypersphere.  ``c0 = 1`` yields the uniform density for every seed.
    Deterministic in ``(M, c0, seed)``.
    """
    if M < 1:
        raise DomainError("degree must be at least 1")
    if not (0.0 < c0 <= 1.0):
        raise DomainError("c0 must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    tail = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    tail_norm = np.sqrt(np.sum(np.abs(tail) ** 2))
    if tail_norm == 0.0:
        raise NumericError("degenerate draw for trailing coefficients")
    tail *= np.sqrt(max(0.0, 1.0 - c0**2)) / tail_norm
    c = np.concatenate(([c0 + 0j], tail))
    c /= np.sqrt(np.sum(np.abs(c) ** 2))
    c[0] = c[0].real + 0j
    return NNTSParams(c)
