"""Reflected log-normal model, its least-squares fit, similarity measures and scaling laws.

The model assumes ``ln(1 - (F - s)/f₀) ~ N(0, σ′²)``. For ``f₀ > 0`` the
density lives on ``F < s + f₀`` and has a long left tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import FitFailure, InvalidArgument
from .inversion import DistributionGrid

__all__ = [
    "LogNormalParams",
    "SimilarityReport",
    "ScalingFit",
    "lognormal_pdf",
    "lognormal_cumulants",
    "lognormal_grid",
    "fit_lognormal",
    "gaussian_limit_check",
    "kl",
    "jsd",
    "hellinger",
    "similarity",
    "scaling_regression",
    "GRAD_TOL",
    "MAX_FIT_EVALS",
]

GRAD_TOL = 1e-10
MAX_FIT_EVALS = 500
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LogNormalParams:
    """Parameters ``(f₀, σ′, s)`` of the reflected, shifted log-normal."""

    f0: float
    sigma_prime: float
    s: float = 0.0

    def __post_init__(self):
        f0, sp, s = float(self.f0), float(self.sigma_prime), float(self.s)
        if not (math.isfinite(f0) and math.isfinite(sp) and math.isfinite(s)):
            raise InvalidArgument("log-normal parameters must be finite")
        if f0 == 0:
            raise InvalidArgument("f0 must be non-zero")
        if not sp > 0:
            raise InvalidArgument(f"sigma_prime must be positive, got {sp}")
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "sigma_prime", sp)
        object.__setattr__(self, "s", s)

    @property
    def mean(self) -> float:
        return self.f0 * (1.0 - math.exp(0.5 * self.sigma_prime**2)) + self.s

    def as_dict(self) -> dict:
        return {"f0": self.f0, "sigmaPrime": self.sigma_prime, "s": self.s}


def _log_pdf_parts(F, f0, sp, s):
    z = -(np.asarray(F, dtype=float) - s) / f0
    t = 1.0 + z
    inside = t > 0
    tt = np.where(inside, t, 1.0)
    # log1p keeps ln t accurate where t is close to one
    L = np.log1p(np.where(inside, z, 0.0))
    logp = -math.log(abs(f0)) - math.log(sp) - _LOG_SQRT_2PI - L - L * L / (2.0 * sp * sp)
    return inside, tt, L, logp


def lognormal_pdf(F, params: LogNormalParams):
    """Density ``(1/|f₀|)(2πσ′²)^{-1/2} t^{-1} exp(-ln²t / 2σ′²)`` with ``t = 1 - (F-s)/f₀``.

    Zero where ``t ≤ 0``. For ``f₀ < 0`` the mirror image is used, so the
    density stays non-negative and normalised.
    """
    inside, _, _, logp = _log_pdf_parts(F, params.f0, params.sigma_prime, params.s)
    out = np.where(inside, np.exp(logp), 0.0)
    return float(out) if out.ndim == 0 else out


def lognormal_grid(params: LogNormalParams, grid) -> DistributionGrid:
    f = grid.f if isinstance(grid, DistributionGrid) else np.asarray(grid, dtype=float)
    return DistributionGrid(f, lognormal_pdf(f, params), {"method": "lognormal", **params.as_dict()})


def lognormal_cumulants(params: LogNormalParams, J: int = 4) -> tuple:
    """Cumulants ``κ_1..κ_J`` of the model, from the moments ``E e^{rY} = e^{r²σ′²/2}``.

    ``F = s + f₀(1 - e^Y)``, so ``κ_j(F) = (-f₀)^j κ_j(e^Y)`` for ``j ≥ 2``.
    """
    if not 1 <= J <= 6:
        raise InvalidArgument("J must lie in 1..6")
    v = params.sigma_prime**2
    # central moments of e^Y via binomial expansion of raw moments
    raw = [math.exp(0.5 * r * r * v) for r in range(J + 1)]
    m1 = raw[1]
    central = [
        math.fsum(math.comb(n, i) * raw[i] * (-m1) ** (n - i) for i in range(n + 1)) for n in range(J + 1)
    ]
    # cumulants from central moments (κ_1 handled separately)
    kap = {2: central[2]}
    if J >= 3:
        kap[3] = central[3]
    if J >= 4:
        kap[4] = central[4] - 3 * central[2] ** 2
    if J >= 5:
        kap[5] = central[5] - 10 * central[3] * central[2]
    if J >= 6:
        kap[6] = central[6] - 15 * central[4] * central[2] - 10 * central[3] ** 2 + 30 * central[2] ** 3
    out = [params.mean]
    for j in range(2, J + 1):
        out.append((-params.f0) ** j * kap[j])
    return tuple(out)


def fit_lognormal(target: DistributionGrid, alpha: float | None, kappa1: float | None = None) -> LogNormalParams:
    """Least-squares fit of :func:`lognormal_pdf` to the density values of ``target``.

    Levenberg-Marquardt with the analytic Jacobian on scaled unknowns, starting from ``f₀⁰ = 1.7 M``,
    ``σ′⁰ = √κ₂/f₀⁰`` and ``s⁰`` equal to the grid mean. For ``alpha > 0``
    the shift is held at ``s = kappa1``.

    Raises
    ------
    FitFailure
        When the scaled gradient norm does not reach ``1e-10`` within 500
        function evaluations. The diagnostics dict carries the last
        parameters, gradient norm and optimiser status.
    """
    M = target.meta.get("M")
    if M is None:
        raise InvalidArgument("target.meta must carry the matrix size M")
    mass = target.integral()
    if not abs(mass - 1.0) < 0.05:
        raise InvalidArgument(f"target must be normalised, has mass {mass}")
    mean, var = target.moments(2)
    pin = alpha is not None and alpha > 0
    if pin and kappa1 is None:
        raise InvalidArgument("kappa1 is required to pin the shift when alpha > 0")
    f00 = 1.7 * float(M)
    sd = math.sqrt(var)
    sp0 = sd / f00
    s0 = float(kappa1) if pin else mean
    f = target.f
    peak = float(np.max(np.abs(target.p)))
    y = target.p / peak
    # f₀ and σ′ are nearly degenerate (only f₀σ′ sets the width), so the
    # optimiser works on width w = f₀σ′, σ′ and, unless pinned, the model
    # mean μ = s + f₀(1 - e^{σ′²/2}); all three scaled to O(1).
    w0 = f00 * sp0
    mu0 = s0 + f00 * (1.0 - math.exp(0.5 * sp0**2))

    def unpack(v):
        w, sp = v[0] * w0, v[1] * sp0
        f0 = w / sp
        if pin:
            return f0, sp, s0
        return f0, sp, mu0 + v[2] * sd - f0 * (1.0 - math.exp(0.5 * sp * sp))

    def resid(v):
        f0, sp, s = unpack(v)
        if not (sp > 0 and math.isfinite(f0) and f0 != 0):
            return np.full(f.size, 1e3)
        inside, _, _, logp = _log_pdf_parts(f, f0, sp, s)
        return np.where(inside, np.exp(logp), 0.0) / peak - y

    def jac(v):
        f0, sp, s = unpack(v)
        w = f0 * sp
        inside, t, L, logp = _log_pdf_parts(f, f0, sp, s)
        p = np.where(inside, np.exp(logp), 0.0) / peak
        dL = -1.0 - L / (sp * sp)
        g_f0 = p * (-1.0 / f0 + dL * (f - s) / (f0 * f0 * t))
        g_sp = p * (-1.0 / sp + L * L / sp**3)
        g_s = p * dL / (f0 * t)
        # chain rule from (f₀, σ′, s) to (w, σ′, μ)
        df0_dw, df0_dsp = 1.0 / sp, -w / sp**2
        if pin:
            return np.column_stack((g_f0 * df0_dw * w0, (g_f0 * df0_dsp + g_sp) * sp0))
        e = math.exp(0.5 * sp * sp)
        ds_dw = -(1.0 - e) * df0_dw
        ds_dsp = -(1.0 - e) * df0_dsp + f0 * sp * e
        return np.column_stack(
            (
                (g_f0 * df0_dw + g_s * ds_dw) * w0,
                (g_f0 * df0_dsp + g_sp + g_s * ds_dsp) * sp0,
                g_s * sd,
            )
        )

    v0 = np.array([1.0, 1.0] if pin else [1.0, 1.0, (mean - mu0) / sd])
    res = least_squares(
        resid, v0, jac=jac, method="lm", ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=MAX_FIT_EVALS
    )
    # LM stops on step size once damping dominates. A few undamped
    # Gauss-Newton steps finish the job; near the optimum neither cost nor
    # gradient is monotone at rounding level, so the best iterate is kept.
    def grad_of(u):
        return float(np.max(np.abs(jac(u).T @ resid(u))))

    v = best = res.x
    grad = grad_of(v)
    for _ in range(8):
        if grad < GRAD_TOL:
            break
        v = v + np.linalg.lstsq(jac(v), -resid(v), rcond=None)[0]
        g_v = grad_of(v)
        if not np.isfinite(g_v):
            break
        if g_v < grad:
            best, grad = v, g_v
    v = best
    f0, sp, s = unpack(v)
    diag = {
        "f0": f0,
        "sigmaPrime": sp,
        "s": s,
        "grad_norm": grad,
        "nfev": int(res.nfev),
        "gauss_newton_final": v.tolist(),
        "status": int(res.status),
        "message": str(res.message),
        "cost": float(res.cost),
    }
    if not (grad < GRAD_TOL and sp > 0 and np.isfinite(res.cost)):
        raise FitFailure(f"log-normal fit did not converge (gradient {grad:.3e})", diag)
    return LogNormalParams(f0, sp, s)


def gaussian_limit_check(params: LogNormalParams, kappa2: float) -> float:
    """``(f₀σ′)²/κ₂``, the small-``σ′`` variance of the model over the true variance."""
    if not kappa2 > 0:
        raise InvalidArgument("kappa2 must be positive")
    return (params.f0 * params.sigma_prime) ** 2 / kappa2


def _probs(P, Q):
    if isinstance(P, DistributionGrid) and isinstance(Q, DistributionGrid):
        if P.f.size != Q.f.size or not np.array_equal(P.f, Q.f):
            raise InvalidArgument("distributions live on different grids")
        p, q = P.p, Q.p
    else:
        p = np.asarray(P.p if isinstance(P, DistributionGrid) else P, dtype=float).ravel()
        q = np.asarray(Q.p if isinstance(Q, DistributionGrid) else Q, dtype=float).ravel()
        if p.shape != q.shape:
            raise InvalidArgument("distributions have different lengths")
    # signed inputs (Edgeworth tails) are scored by magnitude
    p = np.abs(p)
    q = np.abs(q)
    sp, sq = p.sum(), q.sum()
    if not (sp > 0 and sq > 0):
        raise InvalidArgument("distributions need positive total mass")
    return p / sp, q / sq


def _kl_raw(p, q):
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    return max(0.0, float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask])))))


def kl(P, Q) -> float:
    """Kullback-Leibler divergence ``Σ p ln(p/q)`` of the renormalised bin weights."""
    return _kl_raw(*_probs(P, Q))


def jsd(P, Q) -> float:
    """Jensen-Shannon divergence; symmetric and at most ``ln 2``."""
    p, q = _probs(P, Q)
    mix = 0.5 * (p + q)
    return min(math.log(2.0), 0.5 * _kl_raw(p, mix) + 0.5 * _kl_raw(q, mix))


def hellinger(P, Q) -> float:
    """Hellinger distance ``(1/√2) ‖√p - √q‖₂``, between 0 and 1."""
    p, q = _probs(P, Q)
    return min(1.0, math.sqrt(0.5 * float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))))


@dataclass(frozen=True)
class SimilarityReport:
    kl: float
    jsd: float
    hellinger: float

    def as_dict(self) -> dict:
        return {"kl": self.kl, "jsd": self.jsd, "hellinger": self.hellinger}


def similarity(P, Q) -> SimilarityReport:
    """All three measures of ``Q`` against the reference ``P``."""
    return SimilarityReport(kl(P, Q), jsd(P, Q), hellinger(P, Q))


@dataclass(frozen=True)
class ScalingFit:
    """``c₁ M^{p₁} + c₂ M^{p₂}`` with fixed exponents."""

    exponents: tuple
    coefficients: tuple
    residual_norm: float

    def __call__(self, M):
        M = np.asarray(M, dtype=float)
        (p1, p2), (c1, c2) = self.exponents, self.coefficients
        return c1 * M**p1 + c2 * M**p2

    def as_dict(self) -> dict:
        return {"exponents": list(self.exponents), "coefficients": list(self.coefficients), "residual": self.residual_norm}


def scaling_regression(points, exponents) -> ScalingFit:
    """Linear least squares for ``c₁ M^{p₁} + c₂ M^{p₂}`` through ``(M, value)`` points.

    Solves the normal equations after scaling both design columns to unit
    norm; a normal matrix with condition number above ``1e12`` is reported as
    rank deficient.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise InvalidArgument("need at least three (M, value) points")
    p1, p2 = (float(e) for e in exponents)
    if p1 == p2:
        raise InvalidArgument("exponents must differ")
    Ms, y = pts[:, 0], pts[:, 1]
    if np.any(Ms <= 0):
        raise InvalidArgument("M values must be positive")
    A = np.column_stack((Ms**p1, Ms**p2))
    norms = np.linalg.norm(A, axis=0)
    As = A / norms
    N = As.T @ As
    if np.linalg.cond(N) > 1e12:
        raise InvalidArgument("design matrix is rank deficient for these exponents and M values")
    c = np.linalg.solve(N, As.T @ y) / norms
    resid = float(np.linalg.norm(A @ c - y))
    return ScalingFit((p1, p2), (float(c[0]), float(c[1])), resid)
