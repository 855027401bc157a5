"""Empirical distribution utilities: ECDF distance, KDE, MC summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class DensityGrid:
    """Ascending evaluation points with non-negative density values."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "values", v)
        if p.ndim != 1 or p.shape != v.shape:
            raise ParameterError("points and values must be 1-d and equal length")
        if p.shape[0] >= 2 and not np.all(np.diff(p) > 0):
            raise ParameterError("points must be strictly ascending")

    def trapezoid_mass(self) -> float:
        return float(np.trapezoid(self.values, self.points))


def ks_two_sample(a, b) -> float:
    """Sup-norm distance between the two empirical CDFs (merge-scan)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ParameterError("both samples must be non-empty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_critical_value(na: int, nb: int, level: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at the given level."""
    if na < 1 or nb < 1:
        raise ParameterError("sample sizes must be >= 1")
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    coeff = math.sqrt(-math.log(level / 2.0) / 2.0)
    return coeff * math.sqrt((na + nb) / (na * nb))


def silverman_bandwidth(samples: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n**(-1/5) with the robust spread guard."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ParameterError("automatic bandwidth needs at least 2 samples")
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    if spread <= 0:
        raise ParameterError("degenerate sample: zero spread")
    return 0.9 * spread * x.size ** (-0.2)


def kde_gaussian(samples, bandwidth=None, grid=None, points: int = 512) -> DensityGrid:
    """Gaussian kernel density estimate on an explicit or automatic grid.

    Default bandwidth is Silverman's rule; default grid spans the sample
    range plus four bandwidths on each side.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("samples must be non-empty")
    if bandwidth is None:
        h = silverman_bandwidth(x)
    else:
        h = float(bandwidth)
        if h <= 0:
            raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    if grid is None:
        lo = x.min() - 4.0 * h
        hi = x.max() + 4.0 * h
        g = np.linspace(lo, hi, points)
    else:
        g = np.asarray(grid, dtype=float)
    norm = 1.0 / (x.size * h * math.sqrt(2.0 * math.pi))
    # Chunk the grid so the (grid x sample) matrix stays small.
    vals = np.empty(g.shape[0])
    step = max(1, 8_000_000 // max(1, x.size))
    for i in range(0, g.shape[0], step):
        z = (g[i : i + step, None] - x[None, :]) / h
        vals[i : i + step] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return DensityGrid(points=g, values=vals)


@dataclass(frozen=True)
class McSummary:
    mean: float
    sd: float
    standard_error: float
    count: int
    q01: float
    median: float
    q99: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "sd": self.sd,
            "standard_error": self.standard_error,
            "count": self.count,
            "q01": self.q01,
            "median": self.median,
            "q99": self.q99,
        }


def nearest_rank_quantile(sorted_samples: np.ndarray, p: float) -> float:
    """Nearest-rank quantile: the ceil(p*n)-th order statistic."""
    n = sorted_samples.size
    idx = max(1, math.ceil(p * n))
    return float(sorted_samples[idx - 1])


def mc_summary(samples) -> McSummary:
    """Mean, unbiased sd, standard error, and 1/50/99 percent quantiles."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("samples must be non-empty")
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    srt = np.sort(x)
    return McSummary(
        mean=mean,
        sd=sd,
        standard_error=sd / math.sqrt(x.size),
        count=int(x.size),
        q01=nearest_rank_quantile(srt, 0.01),
        median=nearest_rank_quantile(srt, 0.50),
        q99=nearest_rank_quantile(srt, 0.99),
    )
