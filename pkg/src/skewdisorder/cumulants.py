"""Cumulants of the free-energy distribution.

The cumulants are ``κ_j = (M/2) j! [ξ^j] g(ξ)`` with the per-pair cumulant
generating function

    g(ξ) = -ξ ln x + ln Γ(1 + ξ) + ln 𝐌(-ξ, 1, -x).

:func:`cumulants_series` composes Taylor series. :func:`cumulants_faa_di_bruno`
sums the partition formula over the derivatives of 𝐌, and
:func:`cumulants_finite_difference` differentiates ``ln χ`` numerically. The
three are independent cross-checks of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import InvalidArgument, PrecisionLossError, UnsupportedOrder
from .skewcirc import check_dim

__all__ = [
    "CumulantSet",
    "AsymptoticLaw",
    "kappa1",
    "cumulants_series",
    "cumulants_faa_di_bruno",
    "cumulants_finite_difference",
    "asymptotic_law",
    "asymptotic_predict",
    "cumulant_ratio",
    "C_NEG",
    "C_POS",
]

MAX_SERIES_ORDER = 16
MAX_FDB_ORDER = 6

# Constants of the α-regime laws, read off log-log plots of κ̃_j against M^α.
# α < 0:   κ_j ≈ (M/2)(ψ_{j-1}(1) + (-1)^{j-1} c_j M^{jα})
C_NEG = {2: 0.5, 3: 2.0 / 3.0, 4: 4.0 / 3.0}
# 0 < α:   κ_j ≈ ((-1)^j / 2) c'_j M^{1-(j-1)α}   (c'_2 = 2 gives κ_2 ≈ M^{1-α})
C_POS = {2: 2.0, 3: 6.0, 4: 40.0}

_MIN_X = 1e-300


@dataclass(frozen=True)
class CumulantSet:
    """Cumulants ``κ_1..κ_J`` at matrix size ``M`` and ``x = 1/(2σ²)``."""

    M: int
    x: float
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def order(self) -> int:
        return len(self.values)

    @property
    def rescaled(self) -> tuple:
        """Per-pair cumulants ``κ̃_j = 2κ_j/M``."""
        return tuple(2.0 * v / self.M for v in self.values)

    def kappa(self, j: int) -> float:
        if not 1 <= j <= self.order:
            raise InvalidArgument(f"order {j} not available (have 1..{self.order})")
        return self.values[j - 1]

    def as_dict(self) -> dict:
        return {f"kappa{j}": v for j, v in enumerate(self.values, start=1)}


def _check_x(x):
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise InvalidArgument(f"x must be positive and finite, got {x!r}")
    if x < _MIN_X:
        raise InvalidArgument("x below 1e-300 overflows ln x")
    return x


def kappa1(M: int, x: float) -> float:
    """Mean free energy in closed form, ``κ_1 = (M/2) Γ(0, x)``."""
    M = check_dim(M)
    return 0.5 * M * specfun.incomplete_gamma_zero(_check_x(x))


def _pair_cgf_series(x, J):
    g = specfun.kummer_m_taylor(x, J).log() + specfun.log_gamma_taylor(J)
    c = g.coeffs.real.copy()
    c[1] = math.fsum([c[1], -math.log(x)])
    return c


def cumulants_series(M: int, x: float, J: int) -> CumulantSet:
    """Cumulants ``κ_1..κ_J`` by Taylor-series composition.

    The power-series logarithm of the 𝐌 series is added to the
    ``ln Γ(1+ξ)`` series and the linear term ``-ξ ln x``; coefficient ``j``
    is then multiplied by ``j! M/2``.

    Notes
    -----
    ``κ_1`` comes out as ``-ln x - γ + Σ_n P(n; x) H_n`` and cancels down to
    ``Γ(0, x) ~ e^{-x}/x``. Its relative accuracy therefore degrades like
    ``ε (ln x) x e^{x}``. Use :func:`kappa1` for the mean at large ``x``.
    """
    M = check_dim(M)
    x = _check_x(x)
    if isinstance(J, bool) or int(J) != J or J < 1:
        raise InvalidArgument(f"J must be a positive integer, got {J!r}")
    if J > MAX_SERIES_ORDER:
        raise PrecisionLossError(f"orders above {MAX_SERIES_ORDER} lose all precision")
    c = _pair_cgf_series(x, int(J))
    vals = [0.5 * M * math.factorial(j) * c[j] for j in range(1, int(J) + 1)]
    return CumulantSet(M, x, vals)


def _partitions(j):
    """Multiplicity vectors ``(m_1..m_j)`` with ``Σ l m_l = j``."""

    def rec(rest, l):
        if l == 0:
            if rest == 0:
                yield ()
            return
        for m in range(rest // l + 1):
            for tail in rec(rest - m * l, l - 1):
                yield tail + (m,)

    for ms in rec(j, j):
        yield ms


def cumulants_faa_di_bruno(M: int, x: float, J: int) -> CumulantSet:
    """Cumulants through the explicit partition sum over 𝐌-derivatives.

    ``∂^j ln 𝐌 = Σ j!/∏m_l! (-1)^{K-1} (K-1)! ∏ ((-1)^l 𝐌^{(l,0,0)}/l!)^{m_l}``
    with ``K = Σ m_l`` and ``𝐌(0, 1, -x) = 1``. Only meant as a
    cross-check, since the number of partitions grows quickly.
    """
    M = check_dim(M)
    x = _check_x(x)
    if isinstance(J, bool) or int(J) != J or J < 1:
        raise InvalidArgument(f"J must be a positive integer, got {J!r}")
    if J > MAX_FDB_ORDER:
        raise InvalidArgument(f"Faà di Bruno path limited to J <= {MAX_FDB_ORDER}")
    J = int(J)
    taylor = specfun.kummer_m_taylor(x, J).coeffs.real
    # derivative wrt the first argument: M^{(l,0,0)}(0,1,-x) = (-1)^l l! c_l
    derivs = [(-1) ** l * math.factorial(l) * taylor[l] for l in range(J + 1)]
    vals = []
    for j in range(1, J + 1):
        total = 0.0
        for ms in _partitions(j):
            K = sum(ms)
            coef = math.factorial(j) / math.prod(math.factorial(m) for m in ms)
            coef *= (-1) ** (K - 1) * math.factorial(K - 1)
            prod = 1.0
            for l, m in enumerate(ms, start=1):
                prod *= ((-1) ** l * derivs[l] / math.factorial(l)) ** m
            total += coef * prod
        if j == 1:
            pair = math.fsum([-math.log(x), -specfun.EULER_GAMMA, total])
        else:
            pair = specfun.polygamma_at_one(j - 1) + total
        vals.append(0.5 * M * pair)
    return CumulantSet(M, x, vals)


# base steps for central differences of ln χ̃ at orders 1..4
_FD_STEPS = {1: 1e-3, 2: 1e-3, 3: 2e-2, 4: 5e-2}


def cumulants_finite_difference(M: int, x: float, J: int = 4, levels: int = 3) -> CumulantSet:
    """Cumulants from central differences of ``ln χ̃`` with Richardson extrapolation.

    Uses the odd part (``Im ln χ̃``) for odd orders and the even part for
    even orders. This is an oracle for the series paths, limited to ``J <= 4``.
    """
    from .charfun import DisorderScale, log_chi_single

    M = check_dim(M)
    scale = DisorderScale(2, _check_x(x))
    if not 1 <= J <= 4:
        raise InvalidArgument("finite-difference cumulants support 1 <= J <= 4")

    def g(k):
        return np.asarray(log_chi_single(np.asarray(k, dtype=float), scale))

    stencils = {
        1: lambda h: (g(h) - g(-h)) / (2 * h),
        2: lambda h: (g(h) - 2 * g(0.0) + g(-h)) / h**2,
        3: lambda h: (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h**3),
        4: lambda h: (g(2 * h) - 4 * g(h) + 6 * g(0.0) - 4 * g(-h) + g(-2 * h)) / h**4,
    }
    # d^j/dk^j ln χ̃ at 0 equals i^j κ̃_j
    vals = []
    for j in range(1, J + 1):
        h = _FD_STEPS[j]
        table = [complex(stencils[j](h / 2**n)) for n in range(levels)]
        for lev in range(1, levels):
            factor = 4.0**lev
            table = [(factor * table[n + 1] - table[n]) / (factor - 1) for n in range(len(table) - 1)]
        vals.append(0.5 * M * (table[0] / 1j**j).real)
    return CumulantSet(M, float(x), vals)


@dataclass(frozen=True)
class AsymptoticLaw:
    """Leading large-``M`` behaviour of ``κ_j`` in one α regime.

    ``terms`` is a tuple of ``(coefficient, power, log_power)`` triples
    meaning ``Σ coefficient · M^power · (ln M)^log_power``.
    """

    regime: str
    order: int
    terms: tuple

    def __call__(self, M) -> float:
        M = float(M)
        return math.fsum(c * M**p * math.log(M) ** q for c, p, q in self.terms)


def _regime(alpha):
    if alpha < 0:
        return "alpha<0"
    if alpha == 0:
        return "alpha=0"
    if alpha < 1:
        return "0<alpha<1"
    if alpha == 1:
        return "alpha=1"
    return "alpha>1"


def asymptotic_law(alpha: float, j: int) -> AsymptoticLaw:
    """Leading-order law for ``κ_j`` when ``x = M^α``."""
    alpha = float(alpha)
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise InvalidArgument(f"order must be a positive integer, got {j!r}")
    j = int(j)
    regime = _regime(alpha)
    if regime == "alpha=0":
        pair = cumulants_series(2, 1.0, j).values[j - 1]
        if j == 1:
            pair = specfun.incomplete_gamma_zero(1.0)
        return AsymptoticLaw(regime, j, ((0.5 * pair, 1.0, 0),))
    if j > 4:
        raise UnsupportedOrder(f"no measured constant for order {j} at alpha={alpha}")
    if regime == "alpha<0":
        if j == 1:
            # (M/2)(-γ - α ln M + M^α)
            terms = ((-0.5 * specfun.EULER_GAMMA, 1.0, 0), (-0.5 * alpha, 1.0, 1), (0.5, 1.0 + alpha, 0))
        else:
            terms = (
                (0.5 * specfun.polygamma_at_one(j - 1), 1.0, 0),
                (0.5 * (-1) ** (j - 1) * C_NEG[j], 1.0 + j * alpha, 0),
            )
        return AsymptoticLaw(regime, j, terms)
    # α > 0: the mean is exponentially suppressed
    if j == 1:
        return AsymptoticLaw(regime, j, ((0.0, 0.0, 0),))
    return AsymptoticLaw(regime, j, ((0.5 * (-1) ** j * C_POS[j], 1.0 - (j - 1) * alpha, 0),))


def asymptotic_predict(M: int, alpha: float, j: int) -> float:
    """Evaluate :func:`asymptotic_law` at ``M``."""
    return asymptotic_law(alpha, j)(check_dim(M))


def cumulant_ratio(cset: CumulantSet, j: int) -> float:
    """Standardised cumulant ``κ_j / κ_2^{j/2}``."""
    if j < 3:
        raise InvalidArgument("ratio is defined for j >= 3")
    k2 = cset.kappa(2)
    if not k2 > 0:
        raise InvalidArgument("κ_2 must be positive")
    return cset.kappa(j) / k2 ** (j / 2)
