"""Brute-force sampling of ``F = ln det(Q + S)``.

Samples are drawn in fixed-size chunks. Chunk ``i`` gets its own Philox
stream seeded by ``SeedSequence(seed, spawn_key=(i,))``, so the output
depends only on ``(seed, scale, phase_source, count)`` and never on how
many worker threads drew it.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .charfun import DisorderScale
from .errors import InvalidArgument
from .inversion import DistributionGrid
from .skewcirc import eigenvalues_batch, q_phases

__all__ = [
    "PHASE_SOURCES",
    "SampleBatch",
    "EmpiricalCumulants",
    "sample",
    "empirical_cumulants",
    "k_statistics",
    "histogram",
    "ks_compare",
]

PHASE_SOURCES = ("q", "zero", "random")
DEFAULT_CHUNK = 1 << 16
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class SampleBatch:
    """Free-energy samples together with everything needed to regenerate them."""

    samples: np.ndarray
    scale: DisorderScale
    seed: int
    phase_source: str = "q"
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).ravel()
        if s.size == 0 or not np.all(np.isfinite(s)):
            raise InvalidArgument("samples must be a non-empty array of finite values")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.size

    def header(self) -> str:
        sc = self.scale
        alpha = "" if sc.alpha is None else f" alpha={sc.alpha!r}"
        return (
            f"# seed={self.seed} M={sc.M} x={sc.x!r}{alpha} phase_source={self.phase_source}"
            f" chunk={self.chunk} count={self.count}"
        )

    def to_csv(self, path=None) -> str:
        """Header comment, a ``F`` column name, then one sample per line."""
        buf = io.StringIO()
        buf.write(self.header() + "\nF\n")
        buf.write("".join(f"{v:.16e}\n" for v in self.samples))
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path) -> SampleBatch:
        with open(path, encoding="utf-8") as fh:
            head = fh.readline()
            if not head.startswith("#"):
                raise InvalidArgument(f"{path}: missing sample header")
            fields = dict(tok.split("=", 1) for tok in head[1:].split())
            if fh.readline().strip() != "F":
                raise InvalidArgument(f"{path}: expected column name 'F'")
            data = np.loadtxt(fh, ndmin=1)
        M = int(fields["M"])
        if "alpha" in fields:
            scale = DisorderScale.from_alpha(M, float(fields["alpha"]))
        else:
            scale = DisorderScale(M, float(fields["x"]))
        return cls(data, scale, int(fields["seed"]), fields["phase_source"], int(fields["chunk"]))


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= _MAX_SEED:
        raise InvalidArgument(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def _chunk_rng(seed, index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw_chunk(scale, n, seed, index, phase_source):
    rng = _chunk_rng(seed, index)
    M = scale.M
    std = math.sqrt(2.0 * scale.sigma2 / M)
    half = M // 2
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        entries = rng.normal(0.0, std, (need, M))
        lam = eigenvalues_batch(entries, method="fft")[:, :half]
        if phase_source == "q":
            shift = np.exp(1j * q_phases(M))[None, :]
        elif phase_source == "zero":
            shift = np.ones((1, half))
        else:
            shift = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, (need, half)))
        r2 = np.abs(shift + lam) ** 2
        good = np.all(r2 > 0, axis=1)
        vals = np.sum(np.log(r2[good]), axis=1)
        out[filled : filled + vals.size] = vals
        filled += vals.size
    return out


def sample(
    scale: DisorderScale,
    count: int,
    seed: int,
    phase_source: str = "q",
    chunk: int = DEFAULT_CHUNK,
    jobs: int = 1,
) -> SampleBatch:
    """Draw ``count`` values of ``F`` for Gaussian skew-circulant disorder.

    Parameters
    ----------
    phase_source : {"q", "zero", "random"}
        Phases of the unit-modulus bulk eigenvalues: those of the
        inverse-sine bulk matrix, all zero, or fresh uniform phases per draw.
    chunk : int
        Draws per random stream. Part of the reproducibility key.
    jobs : int
        Worker threads. Has no effect on the result.

    Notes
    -----
    Draws with an exactly singular shifted eigenvalue are discarded and
    redrawn from the same stream.
    """
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise InvalidArgument(f"count must be a positive integer, got {count!r}")
    if phase_source not in PHASE_SOURCES:
        raise InvalidArgument(f"phase_source must be one of {PHASE_SOURCES}, got {phase_source!r}")
    if int(chunk) != chunk or chunk < 1:
        raise InvalidArgument("chunk must be a positive integer")
    seed = _check_seed(seed)
    count, chunk = int(count), int(chunk)
    sizes = [min(chunk, count - start) for start in range(0, count, chunk)]

    def work(i):
        return _draw_chunk(scale, sizes[i], seed, i, phase_source)

    if jobs > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(i) for i in range(len(sizes))]
    return SampleBatch(np.concatenate(parts), scale, seed, phase_source, chunk)


def k_statistics(data, J: int = 4) -> np.ndarray:
    """Unbiased k-statistics ``k_1..k_J`` (``J ≤ 4``) of ``data``.

    Works on centred data, so power sums stay well scaled for large means.
    """
    x = np.asarray(data, dtype=float)
    n = x.size
    if not 1 <= J <= 4:
        raise InvalidArgument("k-statistics implemented for 1 <= J <= 4")
    if n < max(J, 2):
        raise InvalidArgument("too few samples")
    mean = math.fsum(x) / n
    d = x - mean
    s2 = float(np.dot(d, d))
    s3 = float(np.sum(d**3))
    s4 = float(np.sum(d**4))
    k = [mean]
    if J >= 2:
        k.append(s2 / (n - 1))
    if J >= 3:
        k.append(n * s3 / ((n - 1) * (n - 2)))
    if J >= 4:
        k.append(n * ((n + 1) * s4 - 3 * (n - 1) * s2 * s2 / n) / ((n - 1) * (n - 2) * (n - 3)))
    return np.array(k)


@dataclass(frozen=True)
class EmpiricalCumulants:
    """k-statistics with delete-one jackknife standard errors."""

    values: tuple
    errors: tuple
    count: int

    def as_dict(self) -> dict:
        out = {"count": self.count}
        for j, (v, e) in enumerate(zip(self.values, self.errors), start=1):
            out[f"kappa{j}"] = v
            out[f"se{j}"] = e
        return out


def _jackknife_k(d, J):
    # delete-one k-statistics from centred power sums, all at once
    n = d.size
    m = n - 1
    t1 = float(np.sum(d))
    p = [None, t1, float(np.dot(d, d)), float(np.sum(d**3)), float(np.sum(d**4))]
    a1 = (t1 - d) / m  # leave-one-out mean shift
    raw = [None] + [p[r] - d**r for r in range(1, 5)]
    # central power sums about the leave-one-out mean
    c2 = raw[2] - m * a1**2
    c3 = raw[3] - 3 * a1 * raw[2] + 2 * m * a1**3
    c4 = raw[4] - 4 * a1 * raw[3] + 6 * a1**2 * raw[2] - 3 * m * a1**4
    ks = [a1]
    if J >= 2:
        ks.append(c2 / (m - 1))
    if J >= 3:
        ks.append(m * c3 / ((m - 1) * (m - 2)))
    if J >= 4:
        ks.append(m * ((m + 1) * c4 - 3 * (m - 1) * c2 * c2 / m) / ((m - 1) * (m - 2) * (m - 3)))
    return ks


def empirical_cumulants(batch, J: int = 4) -> EmpiricalCumulants:
    """k-statistics ``κ̂_1..κ̂_J`` and their jackknife standard errors.

    Accepts a :class:`SampleBatch` or a plain array. Needs ``10·J`` samples.
    """
    data = batch.samples if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float).ravel()
    n = data.size
    if not 1 <= J <= 4:
        raise InvalidArgument("J must lie in 1..4")
    if n < 10 * J:
        raise InvalidArgument(f"need at least {10 * J} samples for J={J}, got {n}")
    k = k_statistics(data, J)
    d = data - k[0]
    loo = _jackknife_k(d, J)
    errs = []
    for j in range(J):
        v = loo[j]
        errs.append(math.sqrt((n - 1) / n * float(np.sum((v - v.mean()) ** 2))))
    return EmpiricalCumulants(tuple(float(v) for v in k), tuple(errs), n)


def histogram(batch, grid) -> DistributionGrid:
    """Density histogram on bins centred at the grid points.

    End bins are half width, so the trapezoid integral of the result is
    exactly the fraction of samples inside ``[f_0, f_{N-1}]``.
    """
    data = batch.samples if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float).ravel()
    f = np.asarray(grid.f if isinstance(grid, DistributionGrid) else grid, dtype=float)
    base = DistributionGrid(f, np.zeros_like(f), {"method": "histogram"})
    edges = base.bin_edges()
    counts, _ = np.histogram(data, bins=edges)
    p = counts / (data.size * np.diff(edges))
    meta = {"method": "histogram", "count": int(data.size)}
    if isinstance(batch, SampleBatch):
        meta.update(batch.scale.describe())
    return DistributionGrid(f, p, meta)


def ks_compare(a, b) -> dict:
    """Two-sample Kolmogorov-Smirnov test; returns statistic, p-value and the 1% critical value."""
    from scipy.stats import ks_2samp

    x = a.samples if isinstance(a, SampleBatch) else np.asarray(a, dtype=float)
    y = b.samples if isinstance(b, SampleBatch) else np.asarray(b, dtype=float)
    res = ks_2samp(x, y)
    n, m = x.size, y.size
    crit = math.sqrt(-0.5 * math.log(0.01 / 2.0)) * math.sqrt((n + m) / (n * m))
    return {"statistic": float(res.statistic), "pvalue": float(res.pvalue), "critical_1pct": crit}
