"""Samplers for the limit gap variable V.

V is the weak limit of the rescaled gap between a path extreme and its
best grid approximation; up to sign it is also the limit of the terminal
reflection error.  Three constructions cover the three self-similar
small-time regimes:

* Brownian: V = min over integer shifts of a three-dimensional Bessel
  bridge pair, evaluated at `locations` integer-offset times per copy
  (the minimum over an independent uniform shift of two independent
  Bessel(3) processes; transience makes the truncation immaterial).
* Stable, non-monotone: nested-grid construction -- the running maximum
  of a length m*n walk on the fine grid minus the maximum over every m-th
  point, both including the origin.
* Monotone (drift, or one-sided stable with alpha < 1): |X_U| for a
  uniform time U, by self-similarity a one-liner.

All samplers factor the scale out of the randomness, so scaling the
driver by c > 0 scales every draw by exactly c on a fixed stream.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels, streams
from .errors import ParameterError
from .models import Brownian, Drift, LevyModel, StrictlyStable, is_monotone


@dataclass(frozen=True)
class BesselBrownian:
    """Bessel(3) construction for a standard Brownian driver."""

    locations: int = 150

    def __post_init__(self):
        if self.locations < 1:
            raise ParameterError(f"locations must be >= 1, got {self.locations}")


@dataclass(frozen=True)
class StableNested:
    """Nested-grid construction for a strictly stable driver."""

    alpha: float
    beta: float
    scale: float = 1.0
    fine_per_step: int = 100
    steps: int = 100

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ParameterError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must lie in [-1, 1], got {self.beta}")
        if self.alpha == 1.0 and self.beta != 0.0:
            raise ParameterError("alpha = 1 requires beta = 0")
        if not self.scale > 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if self.fine_per_step < 1 or self.steps < 1:
            raise ParameterError("fine_per_step and steps must be >= 1")


@dataclass(frozen=True)
class Monotone:
    """Uniform-time construction for a monotone small-time limit."""

    model: LevyModel

    def __post_init__(self):
        if not is_monotone(self.model):
            raise ParameterError(f"model {self.model} is not monotone")


VSamplerSpec = Union[BesselBrownian, StableNested, Monotone]


def default_v_sampler(model: LevyModel) -> VSamplerSpec:
    """Standardized sampler matching the model's small-time limit."""
    if isinstance(model, Brownian):
        return BesselBrownian()
    if isinstance(model, StrictlyStable):
        if is_monotone(model):
            return Monotone(StrictlyStable(model.alpha, model.beta, 1.0))
        return StableNested(model.alpha, model.beta, 1.0)
    return Monotone(Drift(1.0 if model.slope > 0 else -1.0))


def sample_v_brownian(locations: int, rng: np.random.Generator) -> float:
    """One draw of the Brownian-case V from `locations` offsets per copy.

    Deviates are drawn interleaved by offset (copy one then copy two per
    location), so a draw at smaller `locations` consumes a prefix of the
    same stream: on shared randomness the minimum is monotone in the
    truncation.
    """
    if locations < 1:
        raise ParameterError(f"locations must be >= 1, got {locations}")
    ups = rng.random()
    z = rng.standard_normal((locations, 2, 3))
    z1 = np.ascontiguousarray(z[:, 0, :])
    z2 = np.ascontiguousarray(z[:, 1, :])
    backend = kernels.get_backend()
    return float(
        backend.bessel_min(np.array([ups]), z1[None, :, :], z2[None, :, :])[0]
    )


def sample_v_stable(
    alpha: float,
    beta: float,
    scale: float,
    fine_per_step: int,
    steps: int,
    rng: np.random.Generator,
) -> float:
    """One draw of the stable-case V from the nested-grid construction.

    Simulates `fine_per_step * steps` unit-scale increments, each worth
    (1/fine_per_step)**(1/alpha) of a unit-time deviate, and returns the
    fine-grid running maximum minus the coarse-grid one (origin included
    in both, so the draw is >= 0 by set inclusion).  The final value is
    `scale` times the standardized statistic.
    """
    spec = StableNested(alpha, beta, scale, fine_per_step, steps)
    mn = spec.fine_per_step * spec.steps
    u = rng.random(mn)
    w = rng.standard_exponential(mn)
    backend = kernels.get_backend()
    x = backend.cms(u, w, spec.alpha, spec.beta)
    step_scale = (1.0 / spec.fine_per_step) ** (1.0 / spec.alpha)
    gap = float(backend.nested_gap((step_scale * x)[None, :], spec.fine_per_step)[0])
    return spec.scale * gap


def sample_v_monotone(model: LevyModel, rng: np.random.Generator) -> float:
    """One draw of V for a monotone limit: |X_U| at a uniform time U."""
    if not is_monotone(model):
        raise ParameterError(f"model {model} is not monotone")
    ups = rng.random()
    if isinstance(model, Drift):
        return abs(model.slope) * ups
    u = rng.random()
    w = rng.standard_exponential()
    backend = kernels.get_backend()
    x = float(backend.cms(np.array([u]), np.array([w]), model.alpha, model.beta)[0])
    return model.scale * (ups ** (1.0 / model.alpha) * abs(x))


def draw_v(spec: VSamplerSpec, rng: np.random.Generator) -> float:
    if isinstance(spec, BesselBrownian):
        return sample_v_brownian(spec.locations, rng)
    if isinstance(spec, StableNested):
        return sample_v_stable(
            spec.alpha, spec.beta, spec.scale, spec.fine_per_step, spec.steps, rng
        )
    return sample_v_monotone(spec.model, rng)


# ---------------------------------------------------------------------------
# Indexed batch sampling.  Draw i comes from the substream keyed by
# (seed, start + i, purpose), so a batch equals the corresponding loop of
# single draws bit for bit, under any chunking or worker count.
# ---------------------------------------------------------------------------


def _batch_bessel(spec, seed, purpose, lo, hi):
    count = hi - lo
    k = spec.locations
    ups = np.empty(count)
    z1 = np.empty((count, k, 3))
    z2 = np.empty((count, k, 3))
    for i in range(count):
        g = streams.substream(seed, lo + i, purpose)
        ups[i] = g.random()
        z = g.standard_normal((k, 2, 3))
        z1[i] = z[:, 0, :]
        z2[i] = z[:, 1, :]
    return kernels.get_backend().bessel_min(ups, z1, z2)


def _batch_stable(spec, seed, purpose, lo, hi):
    count = hi - lo
    mn = spec.fine_per_step * spec.steps
    backend = kernels.get_backend()
    step_scale = (1.0 / spec.fine_per_step) ** (1.0 / spec.alpha)
    out = np.empty(count)
    # Sub-chunks keep the deviate matrices around 4M doubles.
    rows = max(1, min(count, 4_000_000 // max(1, mn)))
    for c0 in range(0, count, rows):
        c1 = min(count, c0 + rows)
        u = np.empty((c1 - c0, mn))
        w = np.empty((c1 - c0, mn))
        for i in range(c0, c1):
            g = streams.substream(seed, lo + i, purpose)
            u[i - c0] = g.random(mn)
            w[i - c0] = g.standard_exponential(mn)
        x = backend.cms(u.ravel(), w.ravel(), spec.alpha, spec.beta).reshape(u.shape)
        out[c0:c1] = spec.scale * backend.nested_gap(step_scale * x, spec.fine_per_step)
    return out


def _batch_monotone(spec, seed, purpose, lo, hi):
    out = np.empty(hi - lo)
    for i in range(lo, hi):
        out[i - lo] = sample_v_monotone(spec.model, streams.substream(seed, i, purpose))
    return out


def _batch_range(spec, seed, purpose, lo, hi):
    if isinstance(spec, BesselBrownian):
        return _batch_bessel(spec, seed, purpose, lo, hi)
    if isinstance(spec, StableNested):
        return _batch_stable(spec, seed, purpose, lo, hi)
    return _batch_monotone(spec, seed, purpose, lo, hi)


def sample_v_batch(
    spec: VSamplerSpec,
    count: int,
    seed: int,
    purpose: int = streams.STANDALONE,
    start: int = 0,
    workers: int = 1,
) -> np.ndarray:
    """`count` indexed draws of V; bit-reproducible for any worker count."""
    if count < 0:
        raise ParameterError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.empty(0)
    if workers <= 1:
        return _batch_range(spec, seed, purpose, start, start + count)
    bounds = np.linspace(start, start + count, workers * 2 + 1).astype(int)
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        parts = list(
            pool.map(
                _batch_range,
                [spec] * (len(bounds) - 1),
                [seed] * (len(bounds) - 1),
                [purpose] * (len(bounds) - 1),
                bounds[:-1],
                bounds[1:],
            )
        )
    return np.concatenate(parts)
