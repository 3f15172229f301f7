"""Characteristic function of the disorder free energy, evaluated in the log domain.

For ``x = 1/(2σ²)`` each eigenvalue pair contributes

    ln χ̃(k) = -ik ln x + ln Γ(1 + ik) + ln 𝐌(-ik, 1, -x)

and ``ln χ(k) = (M/2) ln χ̃(k)``. ``M/2`` is an integer, so the ``2π``
ambiguity of the imaginary part of ``ln χ̃`` never changes ``χ`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import InvalidArgument, NoDecayError
from .skewcirc import check_dim

__all__ = ["DisorderScale", "log_chi_single", "log_chi", "chi", "k_support"]

_MIN_X = 1e-300


@dataclass(frozen=True)
class DisorderScale:
    """Matrix size ``M`` and disorder strength ``x = 1/(2σ²)``.

    Build with ``DisorderScale(M, x)`` or :meth:`from_alpha` for
    ``x = M^α``; the two are mutually exclusive.
    """

    M: int
    x: float
    alpha: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "M", check_dim(self.M))
        x = float(self.x)
        if not (math.isfinite(x) and x > 0):
            raise InvalidArgument(f"x must be positive and finite, got {self.x!r}")
        if x < _MIN_X:
            raise InvalidArgument("x below 1e-300 overflows ln x")
        if self.alpha is not None:
            a = float(self.alpha)
            if x != float(self.M) ** a:
                raise InvalidArgument("x and alpha disagree; give only one of them")
            object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_alpha(cls, M: int, alpha: float) -> DisorderScale:
        M = check_dim(M)
        return cls(M, float(M) ** float(alpha), float(alpha))

    @classmethod
    def from_sigma2(cls, M: int, sigma2: float) -> DisorderScale:
        return cls(M, 1.0 / (2.0 * float(sigma2)))

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.x)

    def describe(self) -> dict:
        d = {"M": self.M, "x": self.x}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def log_chi_single(k, scale: DisorderScale):
    """``ln χ̃(k)``, the log characteristic function of one eigenvalue pair."""
    k_arr = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k_arr)):
        raise InvalidArgument("k must be finite")
    _, log_m = specfun.kummer_m_complex(k_arr, scale.x)
    out = -1j * k_arr * math.log(scale.x) + specfun.log_gamma_complex(1.0 + 1j * k_arr) + log_m
    out = np.where(k_arr == 0, 0.0 + 0.0j, out)
    return complex(out) if np.ndim(out) == 0 else out


def log_chi(k, scale: DisorderScale):
    """``ln χ(k) = (M/2) ln χ̃(k)``; ``χ(0) = 1`` gives exactly ``0``."""
    out = 0.5 * scale.M * np.asarray(log_chi_single(k, scale))
    return complex(out) if np.ndim(out) == 0 else out


def chi(k, scale: DisorderScale):
    """``χ(k)`` itself, by exponentiating :func:`log_chi`."""
    out = np.exp(np.asarray(log_chi(k, scale)))
    return complex(out) if np.ndim(out) == 0 else out


def k_support(scale: DisorderScale, eps: float = 1e-12, refine: int = 512) -> float:
    """Truncation radius ``k*`` beyond which ``|χ(k)| < eps``.

    Doubles ``k`` until ``|χ|`` drops below ``eps`` at three successive
    doublings, scans a ``refine``-point grid up to the last doubling, and
    bisects the last crossing. The result is never below ``8/√κ₂``.

    Raises
    ------
    NoDecayError
        If no such ``k`` is found below ``1e8``.
    """
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    from .cumulants import cumulants_series

    kappa2 = cumulants_series(scale.M, scale.x, 2).values[1]
    floor = 8.0 / math.sqrt(kappa2)
    log_eps = math.log(eps)

    def below(k):
        return np.real(log_chi(k, scale)) < log_eps

    k = floor / 8.0
    quiet = 0
    while quiet < 3:
        if k > 1e8:
            raise NoDecayError(f"|χ| did not fall below {eps} for {scale.describe()}")
        quiet = quiet + 1 if below(k) else 0
        k *= 2.0
    k_top = k / 2.0
    grid = np.linspace(0.0, k_top, refine + 1)
    ok = below(grid)
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return floor
    lo, hi = grid[bad[-1]], grid[bad[-1] + 1]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if below(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return max(hi, floor)
