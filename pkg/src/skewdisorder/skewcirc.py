"""Real skew-circulant matrices of even dimension.

A skew-circulant ``S`` is fixed by its first column ``S_0..S_{M-1}``:
``S_ij = S_{i-j}`` with wrapped entries negated, ``S_{m-M} = -S_m``. Every
such matrix is diagonalised by the half-shifted Fourier basis, with
eigenvalues ``λ_i = Σ_m S_m ω^{m(i+1/2)}``, ``ω = e^{2πi/M}``, and
``λ_{M-1-i} = conj(λ_i)``.

Entry law of the disorder
-------------------------
The disorder weight is ``exp(-tr SS† / (4σ²))`` on the flat measure
``∏ dS_m``. Because ``tr SS† = M Σ_m S_m²`` the entries are iid
``N(0, 2σ²/M)``. Then ``Re λ_i`` and ``Im λ_i`` (``i < M/2``) are iid
``N(0, σ²)``, which is the per-eigenvalue weight ``exp(-|λ|²/2σ²)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, SingularShiftError

__all__ = [
    "SkewCirculant",
    "Spectrum",
    "check_dim",
    "eigenvalues",
    "eigenvalues_batch",
    "build_Q",
    "q_phases",
    "sample_disorder",
    "log_det_shifted",
    "log_det_shifted_batch",
]


def check_dim(M) -> int:
    if isinstance(M, bool) or int(M) != M or M < 2 or int(M) % 2:
        raise InvalidArgument(f"M must be an even integer >= 2, got {M!r}")
    return int(M)


@dataclass(frozen=True)
class SkewCirculant:
    """Skew-circulant matrix stored by its ``M`` independent entries."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float).ravel()
        check_dim(e.size)
        if not np.all(np.isfinite(e)):
            raise InvalidArgument("entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.size

    def dense(self) -> np.ndarray:
        M = self.dim
        d = np.subtract.outer(np.arange(M), np.arange(M))
        return np.where(d >= 0, self.entries[d % M], -self.entries[d % M])

    def __add__(self, other: SkewCirculant) -> SkewCirculant:
        return SkewCirculant(self.entries + other.entries)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ``λ_0..λ_{M-1}`` in the half-shifted Fourier order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def half(self) -> np.ndarray:
        """The first ``M/2`` eigenvalues; the rest are their conjugates."""
        return self.values[: self.values.size // 2]


@functools.lru_cache(maxsize=64)
def _dft_matrix(M):
    # ω^{m(i+1/2)}, rows i, columns m
    i = np.arange(M)[:, None] + 0.5
    m = np.arange(M)[None, :]
    W = np.exp(2j * np.pi * i * m / M)
    W.setflags(write=False)
    return W


def eigenvalues(S: SkewCirculant, method: str = "direct") -> Spectrum:
    """Closed-form spectrum of a skew-circulant matrix.

    ``method="direct"`` is the O(M²) sum; ``"fft"`` uses
    ``λ = M · ifft(S_m e^{iπm/M})``.
    """
    return Spectrum(eigenvalues_batch(S.entries[None, :], method=method)[0])


def eigenvalues_batch(entries, method: str = "fft") -> np.ndarray:
    """Spectra of a stack of skew-circulants, shape ``(n, M)`` → ``(n, M)``."""
    entries = np.atleast_2d(np.asarray(entries, dtype=float))
    M = check_dim(entries.shape[1])
    if method == "direct":
        return entries @ _dft_matrix(M).T
    if method == "fft":
        twist = np.exp(1j * np.pi * np.arange(M) / M)
        return M * np.fft.ifft(entries * twist, axis=1)
    raise InvalidArgument(f"unknown method {method!r}")


def build_Q(M: int) -> SkewCirculant:
    """Bulk matrix in the Hamiltonian limit, ``Q_m = 1 / (M sin(π(m + 1/2)/M))``.

    All its eigenvalues lie on the unit circle.
    """
    M = check_dim(M)
    m = np.arange(M)
    return SkewCirculant(1.0 / (M * np.sin(np.pi * (m + 0.5) / M)))


@functools.lru_cache(maxsize=256)
def _q_phases_cached(M):
    lam = eigenvalues(build_Q(M)).half
    ph = np.angle(lam)
    ph.setflags(write=False)
    return ph


def q_phases(M: int) -> np.ndarray:
    """Phases of the first ``M/2`` eigenvalues of :func:`build_Q` (cached per ``M``)."""
    return _q_phases_cached(check_dim(M))


def sample_disorder(M: int, sigma2: float, rng: np.random.Generator, size=None):
    """Draw Gaussian skew-circulant disorder with entry variance ``2σ²/M``.

    Returns a :class:`SkewCirculant` when ``size`` is None, otherwise an
    ``(size, M)`` array of entries.
    """
    M = check_dim(M)
    if not sigma2 > 0:
        raise InvalidArgument(f"sigma2 must be positive, got {sigma2}")
    scale = math.sqrt(2.0 * sigma2 / M)
    if size is None:
        return SkewCirculant(rng.normal(0.0, scale, M))
    return rng.normal(0.0, scale, (int(size), M))


def log_det_shifted_batch(half_eigs, phases) -> np.ndarray:
    """``F = Σ_j ln|e^{iφ_j} + λ_j|²`` row-wise for an ``(n, M/2)`` stack.

    Raises
    ------
    SingularShiftError
        If any shifted eigenvalue is exactly zero.
    """
    half_eigs = np.atleast_2d(half_eigs)
    phases = np.asarray(phases, dtype=float)
    if phases.shape[-1] != half_eigs.shape[1]:
        raise InvalidArgument("need one phase per eigenvalue pair")
    r2 = np.abs(np.exp(1j * phases) + half_eigs) ** 2
    if np.any(r2 == 0):
        raise SingularShiftError("Q + S is singular for this draw")
    return np.sum(np.log(r2), axis=1)


def log_det_shifted(S: SkewCirculant, phases) -> float:
    """``ln det(Q + S)`` for a ``Q`` with unit-modulus eigenvalues ``e^{iφ_j}``.

    With ``phases = q_phases(M)`` this equals ``ln det(build_Q(M) + S)``.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (S.dim // 2,):
        raise InvalidArgument(f"expected {S.dim // 2} phases, got shape {phases.shape}")
    return float(log_det_shifted_batch(eigenvalues(S).half[None, :], phases)[0])
