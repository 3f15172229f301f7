"""Special functions and Taylor machinery for the Olver function at ``a = 0, b = 1``.

Everything here works with the regularised confluent hypergeometric function
``𝐌(-ξ, 1, -x)`` (Olver's bold M; equal to ``1F1`` because ``b = 1``) as a
function of its first argument. Two summation routes exist:

* the *direct* route sums the defining series
  ``Σ_n (-ξ)_n (-x)^n / (n!)^2``, which alternates in sign and loses about
  ``log10(e^x / x)`` digits;
* the *transformed* route uses Kummer's transformation
  ``𝐌(-ξ, 1, -x) = e^{-x} M(1 + ξ, 1, x)``. Written out, this is a Poisson
  average ``E[∏_{l≤N} (1 + ξ/l)]`` with ``N ~ Poisson(x)``. All its terms
  are positive at real ``ξ``, so it is well conditioned for every ``x``.

The direct route is only used below :data:`TRANSFORM_THRESHOLD`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sps

from .errors import DomainError, InvalidArgument

__all__ = [
    "EULER_GAMMA",
    "TRANSFORM_THRESHOLD",
    "PowerSeries",
    "log_gamma_taylor",
    "polygamma_at_one",
    "incomplete_gamma_zero",
    "kummer_m_taylor",
    "kummer_m_complex",
    "log_gamma_complex",
    "hyp1f1_real",
]

EULER_GAMMA = float(np.euler_gamma)

# The direct alternating series loses ~log10(e^x/x) digits: 7 at x=20, 11 at x=30.
TRANSFORM_THRESHOLD = 2.0

_REL_STOP = 1e-16
_STOP_RUN = 3
_MAX_TERMS = 1 << 22
_K_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series ``Σ_{j≤J} c_j ξ^j`` about ``ξ = 0``.

    Parameters
    ----------
    coeffs : array_like
        Coefficients ``c_0 .. c_J``; stored as a read-only complex array.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise InvalidArgument("a power series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def real(self) -> np.ndarray:
        return self.coeffs.real.copy()

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, j):
        return self.coeffs[j]

    def __add__(self, other: PowerSeries) -> PowerSeries:
        n = min(self.order, other.order) + 1
        return PowerSeries(self.coeffs[:n] + other.coeffs[:n])

    def scale(self, factor) -> PowerSeries:
        return PowerSeries(self.coeffs * factor)

    def __call__(self, xi):
        """Evaluate the truncated polynomial (Horner) at ``xi``."""
        xi = np.asarray(xi, dtype=complex)
        out = np.zeros_like(xi)
        for c in self.coeffs[::-1]:
            out = out * xi + c
        return out

    def derivatives(self) -> np.ndarray:
        """Return ``j! c_j``, the derivatives at the expansion point."""
        fact = np.array([math.factorial(j) for j in range(self.order + 1)], dtype=float)
        return self.coeffs * fact

    def log(self) -> PowerSeries:
        """Power-series logarithm, using ``B' = A'/A``.

        ``b_0 = ln a_0`` and
        ``b_n = (a_n - (1/n) Σ_{k=1}^{n-1} k b_k a_{n-k}) / a_0``.
        """
        a = self.coeffs
        if a[0] == 0:
            raise DomainError("logarithm of a series with vanishing constant term")
        b = np.zeros_like(a)
        b[0] = np.log(a[0])
        for n in range(1, a.size):
            acc = sum(k * b[k] * a[n - k] for k in range(1, n))
            b[n] = (a[n] - acc / n) / a[0]
        return PowerSeries(b)


def _check_order(J, minimum):
    if isinstance(J, bool) or int(J) != J or J < minimum:
        raise InvalidArgument(f"series order must be an integer >= {minimum}, got {J!r}")
    return int(J)


def _check_x(x):
    x = float(x)
    if not math.isfinite(x):
        raise InvalidArgument(f"x must be finite, got {x}")
    if x <= 0:
        raise DomainError(f"x must be positive, got {x}")
    return x


def polygamma_at_one(n: int) -> float:
    """``ψ_n(1)``: ``-γ`` for ``n = 0`` and ``(-1)^{n+1} n! ζ(n+1)`` otherwise."""
    if n == 0:
        return -EULER_GAMMA
    return (-1) ** (n + 1) * math.factorial(n) * float(sps.zeta(n + 1))


def log_gamma_taylor(J: int) -> PowerSeries:
    """Taylor series of ``ln Γ(1 + ξ)`` up to order ``J``.

    ``c_1 = -γ`` and ``c_n = (-1)^n ζ(n) / n`` for ``n ≥ 2``, so that
    ``j! c_j = ψ_{j-1}(1)``.
    """
    J = _check_order(J, 1)
    c = np.zeros(J + 1)
    c[1] = -EULER_GAMMA
    for n in range(2, J + 1):
        c[n] = (-1) ** n * float(sps.zeta(n)) / n
    return PowerSeries(c)


def incomplete_gamma_zero(x: float) -> float:
    """``Γ(0, x) = ∫_x^∞ e^{-t}/t dt``, which is the exponential integral ``E_1(x)``."""
    x = float(x)
    if math.isnan(x):
        raise InvalidArgument("x is NaN")
    if x <= 0:
        raise DomainError(f"Γ(0, x) diverges for x <= 0 (got {x})")
    return float(sps.exp1(x))


def log_gamma_complex(z):
    """Principal branch of ``ln Γ(z)`` for ``Re z > 0`` (continuous in that half plane)."""
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise InvalidArgument("z must be finite")
    if np.any(z.real <= 0):
        raise DomainError("log_gamma_complex requires Re z > 0")
    out = sps.loggamma(z)
    return out[()] if out.ndim == 0 else out


def hyp1f1_real(a: float, z: float) -> float:
    """``M(a, 1, z)`` by its plain defining series (real arguments, modest ``|z|``).

    Used for normalisation checks such as ``M(1, 1, z) = e^z``. For ``z < 0``
    Kummer's transformation ``M(a, 1, z) = e^z M(1 - a, 1, -z)`` is applied
    first, so the summed series does not alternate when ``a ≤ 1``.
    """
    if z < 0:
        return math.exp(z) * hyp1f1_real(1.0 - a, -z)
    term = 1.0
    total = 1.0
    run = 0
    for n in range(_MAX_TERMS):
        term *= (a + n) * z / ((n + 1) ** 2)
        total += term
        run = run + 1 if abs(term) < _REL_STOP * abs(total) else 0
        if run >= _STOP_RUN or term == 0.0:
            return total
    raise RuntimeError("hyp1f1 series did not terminate")


def _stop_index(terms, partial):
    """First index after which ``_STOP_RUN`` consecutive terms are negligible, or None."""
    small = np.abs(terms) < _REL_STOP * np.abs(partial)
    if small.ndim > 1:
        small = np.all(small, axis=0)
    run = np.convolve(small.astype(int), np.ones(_STOP_RUN, dtype=int), mode="valid")
    hits = np.flatnonzero(run == _STOP_RUN)
    if hits.size == 0:
        return None
    return int(hits[0] + _STOP_RUN)


def _poisson_window(x, dtype=float):
    """Normalised Poisson(x) weights on a window that holds all but ~1e-30 of the mass.

    Weights are built by ratio recurrence outward from the mode, which keeps
    the relative spread of rounding errors at a few ulp even for huge ``x``.
    """
    mode = int(math.floor(x))
    half = int(math.ceil(12.0 * math.sqrt(x) + 40.0))
    lo = max(0, mode - half)
    hi = mode + half
    xd = dtype(x)
    one = np.ones(1, dtype=dtype)
    right = np.cumprod(np.concatenate((one, xd / np.arange(mode + 1, hi + 1, dtype=dtype))))
    left = np.cumprod(np.concatenate((one, np.arange(mode, lo, -1, dtype=dtype) / xd)))[::-1]
    w = np.concatenate((left[:-1], right))
    w /= np.sum(w)
    return np.arange(lo, hi + 1), w


def _elementary_symmetric(n_max, J, shift, dtype=float):
    """``e_j`` of ``{1/1, ..., 1/(n - shift)}`` for ``n = 0..n_max`` and ``j = 0..J``.

    Row ``j`` holds the coefficient of ``ξ^j`` in ``∏_{l≤n-shift} (1 + ξ/l)``;
    built column-wise with ``e_j(n) = e_j(n-1) + e_{j-1}(n-1)/n``.
    """
    m = np.arange(n_max + 1, dtype=dtype) - shift
    inv = np.zeros(n_max + 1, dtype=dtype)
    inv[m >= 1] = 1 / m[m >= 1]
    e = np.zeros((J + 1, n_max + 1), dtype=dtype)
    e[0] = 1
    for j in range(1, J + 1):
        prev = np.concatenate((np.zeros(1, dtype=dtype), e[j - 1, :-1]))
        e[j] = np.cumsum(prev * inv)
    return e


def _taylor_direct(x, J):
    # c_j = (-1)^j Σ_{n≥1} e_{j-1}({1/l}_{l<n}) (-x)^n / (n n!)
    n_max = 64
    while n_max <= _MAX_TERMS:
        n = np.arange(1, n_max + 1)
        base = np.exp(n * math.log(x) - sps.gammaln(n + 1)) / n * (-1.0) ** n
        e = _elementary_symmetric(n_max, J - 1, shift=1)[:, 1:]
        terms = e * base
        partial = np.cumsum(terms, axis=1)
        stop = _stop_index(terms, partial)
        if stop is not None:
            c = np.ones(J + 1)
            for j in range(1, J + 1):
                c[j] = (-1) ** j * math.fsum(terms[j - 1, :stop])
            return c
        n_max *= 2
    raise RuntimeError("direct Kummer series did not converge")


def _taylor_transformed(x, J):
    # c_j = Σ_n P(n; x) e_j({1/l}_{l≤n}), accumulated in extended precision
    # where the platform has it so that c_j comes out correctly rounded
    n, w = _poisson_window(x, dtype=np.longdouble)
    e = _elementary_symmetric(int(n[-1]), J, shift=0, dtype=np.longdouble)[:, n]
    c = np.ones(J + 1)
    for j in range(1, J + 1):
        c[j] = float(np.sum(e[j] * w))
    return c


def kummer_m_taylor(x: float, J: int, method: str | None = None) -> PowerSeries:
    """Taylor coefficients of ``ξ ↦ 𝐌(-ξ, 1, -x)`` about ``ξ = 0``.

    ``c_j = (-1)^j 𝐌^{(j,0,0)}(0, 1, -x) / j!``; all coefficients are real and
    ``c_0 = 1`` exactly.

    Parameters
    ----------
    x : float
        Positive argument (``x = 1/(2σ²)``).
    J : int
        Highest order.
    method : {"direct", "transformed"}, optional
        Force a summation route. By default the direct series is used for
        ``x <= TRANSFORM_THRESHOLD`` and the Kummer-transformed one otherwise.
    """
    x = _check_x(x)
    J = _check_order(J, 0)
    if J == 0:
        return PowerSeries([1.0])
    if method is None:
        method = "direct" if x <= TRANSFORM_THRESHOLD else "transformed"
    if method == "direct":
        c = _taylor_direct(x, J)
    elif method == "transformed":
        c = _taylor_transformed(x, J)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return PowerSeries(c)


def _complex_direct(k, x):
    # t_{n+1} = t_n (n - ik)(-x) / (n+1)^2
    a = -1j * k
    total = np.ones_like(a)
    term = np.ones_like(a)
    run = np.zeros(a.shape, dtype=int)
    for n in range(_MAX_TERMS):
        term = term * (a + n) * (-x) / ((n + 1) ** 2)
        total = total + term
        small = np.abs(term) < _REL_STOP * np.abs(total)
        run = np.where(small, run + 1, 0)
        if np.all(run >= _STOP_RUN):
            return total, np.log(total)
    raise RuntimeError("direct Kummer series did not converge")


def _complex_transformed(k, x):
    n, w = _poisson_window(x)
    hi = int(n[-1])
    while True:
        l = np.arange(1, hi + 1)
        ratio = k[:, None] / l[None, :]
        # ln ∏_{l≤n} (1 + ik/l), accumulated without branch cuts
        steps = 0.5 * np.log1p(ratio**2) + 1j * np.arctan(ratio)
        acc = np.concatenate((np.zeros((k.size, 1)), np.cumsum(steps, axis=1)), axis=1)
        if hi > n[-1]:
            extra = np.arange(n[-1] + 1, hi + 1)
            tail = w[-1] * np.cumprod(x / extra)
            nn = np.concatenate((n, extra))
            ww = np.concatenate((w, tail))
        else:
            nn, ww = n, w
        with np.errstate(divide="ignore"):
            logs = acc[:, nn] + np.log(ww)[None, :]
        # growth of |∏(1+ik/l)| can push the peak right of the Poisson window
        last = logs[:, -_STOP_RUN:].real
        peak = np.max(logs.real, axis=1)
        if np.all(last < peak[:, None] + math.log(_REL_STOP)) or hi > _MAX_TERMS:
            break
        hi *= 2
    ref_idx = np.argmax(logs.real, axis=1)
    ref = logs[np.arange(k.size), ref_idx]
    rest = np.sum(np.exp(logs - ref[:, None]), axis=1)
    log_val = ref + np.log(rest)
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(log_val), log_val


def kummer_m_complex(k, x: float, method: str | None = None):
    """Evaluate ``𝐌(-ik, 1, -x)`` for real ``k`` (scalar or array).

    Returns
    -------
    value, log_value : complex or ndarray
        The function value and its natural logarithm. The log is accumulated
        inside the summation, so it does not overflow where the value would.
        Its imaginary part is only defined modulo ``2π``.
    """
    k_arr = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k_arr)):
        raise InvalidArgument("k must be finite")
    x = _check_x(x)
    scalar = k_arr.ndim == 0
    flat = k_arr.ravel()
    if method is None:
        method = "direct" if x <= TRANSFORM_THRESHOLD else "transformed"
    if method == "direct":
        val, log_val = _complex_direct(flat.astype(complex), x)
    elif method == "transformed":
        width = int(x + 12.0 * math.sqrt(x) + 41.0)
        chunk = max(1, _K_CHUNK_ELEMENTS // max(width, 1))
        parts = [_complex_transformed(flat[i : i + chunk], x) for i in range(0, flat.size, chunk)]
        if parts:
            val = np.concatenate([p[0] for p in parts])
            log_val = np.concatenate([p[1] for p in parts])
        else:
            val = log_val = np.zeros(0, dtype=complex)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    zero = flat == 0
    val[zero] = 1.0
    log_val[zero] = 0.0
    if scalar:
        return complex(val[0]), complex(log_val[0])
    return val.reshape(k_arr.shape), log_val.reshape(k_arr.shape)
