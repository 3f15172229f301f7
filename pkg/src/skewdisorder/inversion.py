"""Fourier inversion of the characteristic function and the Edgeworth approximation.

``χ(-k) = conj χ(k)`` and the density is real, so

    p(F) = (1/π) ∫_0^∞ Re(e^{-ikF} χ(k)) dk.

The integrand is even in ``k``, which means the trapezoid rule on a
half-line with halved end weight is the full-line trapezoid rule. Its only
error is aliasing from ``p(F ± 2π/Δk)``, and that is negligible once
``Δk`` resolves several window widths.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .charfun import DisorderScale, k_support, log_chi
from .cumulants import CumulantSet, kappa1
from .errors import InvalidArgument

__all__ = [
    "DistributionGrid",
    "default_grid",
    "invert",
    "bin_probabilities",
    "edgeworth4",
    "gaussian_grid",
    "DEFAULT_POINTS",
    "WINDOW_SIGMAS",
]

DEFAULT_POINTS = 1201
WINDOW_SIGMAS = 6.0
_UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class DistributionGrid:
    """Density values ``p`` on a uniform grid ``f``.

    Parameters
    ----------
    f : array_like
        Strictly increasing, uniformly spaced abscissae.
    p : array_like
        Density values. Only Edgeworth grids are allowed negative entries.
    meta : dict
        Free-form provenance such as ``M``, ``x``, ``alpha`` and ``method``.
    """

    f: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.array(self.f, dtype=float).ravel()
        p = np.array(self.p, dtype=float).ravel()
        if f.size < 2 or f.size != p.size:
            raise InvalidArgument("need at least two points and matching f, p lengths")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(p))):
            raise InvalidArgument("grid values must be finite")
        d = np.diff(f)
        if np.any(d <= 0):
            raise InvalidArgument("f must be strictly increasing")
        h = (f[-1] - f[0]) / (f.size - 1)
        if np.max(np.abs(d - h)) > _UNIFORM_RTOL * max(abs(h), np.max(np.abs(f))):
            raise InvalidArgument("f must be uniformly spaced")
        f.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def step(self) -> float:
        return (self.f[-1] - self.f[0]) / (self.f.size - 1)

    @property
    def width(self) -> float:
        return float(self.f[-1] - self.f[0])

    def __len__(self):
        return self.f.size

    def integral(self, values=None) -> float:
        """Composite trapezoid integral of ``values`` (default ``p``) over the grid."""
        v = self.p if values is None else np.asarray(values, dtype=float)
        return float(np.trapezoid(v, dx=self.step))

    def moments(self, order: int = 2) -> tuple:
        """Mean and central moments ``2..order`` of the grid density, normalised by its mass."""
        mass = self.integral()
        if mass <= 0:
            raise InvalidArgument("grid density has no positive mass")
        mean = self.integral(self.f * self.p) / mass
        out = [mean]
        for r in range(2, order + 1):
            out.append(self.integral((self.f - mean) ** r * self.p) / mass)
        return tuple(out)

    def skewness(self) -> float:
        _, m2, m3 = self.moments(3)
        return m3 / m2**1.5

    def bin_edges(self) -> np.ndarray:
        """Edges of bins centred on the grid points; the two end bins are half width.

        With these bins the trapezoid weights equal the bin widths, so
        trapezoid integrals and bin sums coincide.
        """
        mid = 0.5 * (self.f[1:] + self.f[:-1])
        return np.concatenate(([self.f[0]], mid, [self.f[-1]]))

    def bin_masses(self) -> np.ndarray:
        """Trapezoid weight times density at each point."""
        return self.p * np.diff(self.bin_edges())

    def with_values(self, p, **meta) -> DistributionGrid:
        return DistributionGrid(self.f, p, {**self.meta, **meta})

    def to_csv(self, path=None) -> str:
        """Write ``F,p`` rows with 17 significant digits; returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["F", "p"])
        for a, b in zip(self.f, self.p):
            w.writerow([f"{a:.16e}", f"{b:.16e}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path, **meta) -> DistributionGrid:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["F", "p"]:
            raise InvalidArgument(f"{path}: expected header 'F,p'")
        data = np.array(rows[1:], dtype=float)
        return cls(data[:, 0], data[:, 1], meta)


def default_grid(kappa1: float, kappa2: float, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Uniform grid over ``[κ₁ - 6√κ₂, κ₁ + 6√κ₂]`` with ``n_points`` points."""
    if not (math.isfinite(kappa2) and kappa2 > 0):
        raise InvalidArgument(f"kappa2 must be positive, got {kappa2}")
    if not math.isfinite(kappa1):
        raise InvalidArgument("kappa1 must be finite")
    if isinstance(n_points, bool) or int(n_points) != n_points or n_points < 2:
        raise InvalidArgument(f"n_points must be an integer >= 2, got {n_points!r}")
    half = WINDOW_SIGMAS * math.sqrt(kappa2)
    return np.linspace(kappa1 - half, kappa1 + half, int(n_points))


def _k_nodes(scale, width, eps, safety):
    k_max = k_support(scale, eps=eps)
    n = max(1, math.ceil(k_max * safety * width / (2.0 * math.pi)))
    k = np.linspace(0.0, k_max, n + 1)
    w = np.full(k.size, k[1] - k[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return k, w


def _centred_chi(scale, k):
    # e^{-ikc} χ(k) with c = κ₁ keeps the oscillating phase small
    centre = kappa1(scale.M, scale.x)
    return np.exp(np.asarray(log_chi(k, scale)) - 1j * k * centre), centre


def invert(scale: DisorderScale, grid, eps: float = 1e-12, safety: float = 4.0) -> DistributionGrid:
    """Density of ``F`` on ``grid`` by trapezoid quadrature of the inversion integral.

    The ``k`` range is cut at ``k_support(scale, eps)`` and the step is at most
    ``2π/(safety · W)`` for grid width ``W``.

    Raises
    ------
    NoDecayError
        Propagated from :func:`k_support`.
    """
    f = np.asarray(grid.f if isinstance(grid, DistributionGrid) else grid, dtype=float)
    if safety < 1:
        raise InvalidArgument("safety factor must be >= 1")
    width = float(f[-1] - f[0])
    if not width > 0:
        raise InvalidArgument("grid must span a positive width")
    k, w = _k_nodes(scale, width, eps, safety)
    chi_c, centre = _centred_chi(scale, k)
    phase = np.outer(f - centre, k)
    integrand = np.cos(phase) * chi_c.real + np.sin(phase) * chi_c.imag
    p = integrand @ w / math.pi
    return DistributionGrid(f, p, {**scale.describe(), "method": "inversion", "eps": eps, "k_max": float(k[-1])})


def bin_probabilities(scale: DisorderScale, edges, eps: float = 1e-12, safety: float = 4.0) -> np.ndarray:
    """Exact probabilities ``P(a < F < b)`` for consecutive ``edges``.

    Integrates ``p`` over each bin analytically inside the inversion integral:
    ``(1/π) ∫_0^∞ Re[χ(k)(e^{-ika} - e^{-ikb})/(ik)] dk``, whose ``k → 0``
    limit is ``b - a``.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise InvalidArgument("edges must be a strictly increasing 1-d array")
    width = float(edges[-1] - edges[0])
    k, w = _k_nodes(scale, width, eps, safety)
    chi_c, centre = _centred_chi(scale, k)
    u = edges - centre
    # antiderivative in F of e^{-ikF}: e^{-ikF}/(-ik); its k→0 limit differs by a constant that cancels
    with np.errstate(invalid="ignore", divide="ignore"):
        kk = k[None, :]
        prim = np.where(kk > 0, np.exp(-1j * np.outer(u, k)) / (-1j * np.where(kk > 0, kk, 1.0)), u[:, None])
    diff = prim[1:] - prim[:-1]
    return (diff * chi_c[None, :]).real @ w / math.pi


def _hermite_phys(n, u):
    if n == 3:
        return 8.0 * u**3 - 12.0 * u
    if n == 4:
        return 16.0 * u**4 - 48.0 * u**2 + 12.0
    raise InvalidArgument(f"no Hermite polynomial of order {n} here")


def gaussian_grid(kappa1: float, kappa2: float, grid) -> DistributionGrid:
    """Normal density ``N(κ₁, κ₂)`` on ``grid``."""
    f = np.asarray(grid.f if isinstance(grid, DistributionGrid) else grid, dtype=float)
    if not kappa2 > 0:
        raise InvalidArgument("kappa2 must be positive")
    p = np.exp(-((f - kappa1) ** 2) / (2.0 * kappa2)) / math.sqrt(2.0 * math.pi * kappa2)
    return DistributionGrid(f, p, {"method": "gaussian"})


def edgeworth4(kappas: CumulantSet, grid) -> DistributionGrid:
    """Gaussian times Hermite corrections built from ``κ₃`` and ``κ₄``.

    ``p ≈ N(κ₁, κ₂)(F) [1 + Σ_{j=3,4} κ_j / (j! (2κ₂)^{j/2}) H_j(u)]`` with
    ``u = (F - κ₁)/√(2κ₂)`` and physicists' Hermite ``H_j``. Values may be
    negative in the tails and are kept signed.
    """
    if kappas.order < 4:
        raise InvalidArgument("edgeworth4 needs cumulants of orders 1..4")
    k1, k2, k3, k4 = (kappas.kappa(j) for j in range(1, 5))
    base = gaussian_grid(k1, k2, grid)
    u = (base.f - k1) / math.sqrt(2.0 * k2)
    corr = 1.0
    for j, kj in ((3, k3), (4, k4)):
        corr = corr + kj / (math.factorial(j) * (2.0 * k2) ** (j / 2)) * _hermite_phys(j, u)
    return DistributionGrid(base.f, base.p * corr, {"M": kappas.M, "x": kappas.x, "method": "edgeworth4"})
