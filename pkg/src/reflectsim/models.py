"""Driving Levy models: increment sampling, small-time scaling, regularity.

Three variants cover every non-degenerate small-time regime of a Levy
process on a unit horizon: Brownian motion with drift, strictly
alpha-stable processes, and deterministic drift.  The stable variant uses
the characteristic exponent

    log E exp(i*t*X_1) = -(scale**alpha) * |t|**alpha
                         * (1 - i*beta*tan(pi*alpha/2)*sgn(t)),

so ``beta = +1`` concentrates all jump weight on the positive side (the
skewness equals the normalized difference of the two power-tail weights)
and ``alpha = 1`` is admitted only with ``beta = 0`` (symmetric Cauchy),
the sole strictly stable member of that row.  ``alpha = 2`` is excluded
here and routed to ``Brownian(0, 2*scale**2)``, which has the same
characteristic exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .errors import ParameterError


@dataclass(frozen=True)
class Brownian:
    """Brownian motion with drift `mu` and variance `sigma2` per unit time."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2}")


@dataclass(frozen=True)
class StrictlyStable:
    """Strictly alpha-stable process, alpha in (0, 2), skewness beta, scale > 0."""

    alpha: float
    beta: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            if self.alpha == 2.0:
                raise ParameterError(
                    "alpha = 2 is Gaussian; use Brownian(0, 2*scale**2) instead"
                )
            raise ParameterError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must lie in [-1, 1], got {self.beta}")
        if self.alpha == 1.0 and self.beta != 0.0:
            raise ParameterError(
                "alpha = 1 with beta != 0 is not strictly stable; only the "
                "symmetric Cauchy case is supported"
            )
        if not self.scale > 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class Drift:
    """Deterministic linear drift with non-zero slope."""

    slope: float

    def __post_init__(self):
        if self.slope == 0:
            raise ParameterError("drift slope must be non-zero")


LevyModel = Union[Brownian, StrictlyStable, Drift]


@dataclass(frozen=True)
class RegularityFlags:
    """Whether the process enters each open half line immediately from 0."""

    regular_up: bool
    regular_down: bool


def sample_brownian_increment(mu: float, sigma2: float, dt: float, z: float) -> float:
    """Gaussian increment over time `dt` from a standard normal deviate `z`."""
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    return mu * dt + math.sqrt(sigma2 * dt) * z


def sample_stable_increment(
    alpha: float, beta: float, dt: float, u: float, w: float
) -> float:
    """Unit-scale stable increment over `dt` from a (uniform, exponential) pair.

    The transform is pure: the same deviates always map to the same value,
    and scaling in time factors out bit-exactly as ``dt**(1/alpha)`` times
    the value at ``dt = 1``.
    """
    _check_stable(alpha, beta)
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if not 0.0 < u < 1.0:
        raise ParameterError(f"u must lie in (0, 1), got {u}")
    if not w > 0:
        raise ParameterError(f"w must be positive, got {w}")
    backend = kernels.get_backend()
    x = float(backend.cms(np.array([u]), np.array([w]), alpha, beta)[0])
    return dt ** (1.0 / alpha) * x


def _check_stable(alpha, beta):
    if not 0.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    if not -1.0 <= beta <= 1.0:
        raise ParameterError(f"beta must lie in [-1, 1], got {beta}")
    if alpha == 1.0 and beta != 0.0:
        raise ParameterError("alpha = 1 requires beta = 0")


def small_time_scaling(model: LevyModel, eps: float) -> float:
    """Normalization of increments over a short time `eps`.

    Regularly varying at 0 with index 1/alpha: sqrt(sigma2)*sqrt(eps) for
    Brownian, scale*eps**(1/alpha) for stable, |slope|*eps for drift.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if isinstance(model, Brownian):
        return math.sqrt(model.sigma2) * math.sqrt(eps)
    if isinstance(model, StrictlyStable):
        return model.scale * eps ** (1.0 / model.alpha)
    return abs(model.slope) * eps


def self_similarity_index(model: LevyModel) -> float:
    """Exponent alpha of the small-time self-similar limit (2, alpha, or 1)."""
    if isinstance(model, Brownian):
        return 2.0
    if isinstance(model, StrictlyStable):
        return model.alpha
    return 1.0


def zoom_limit_params(model: LevyModel) -> tuple[float, float]:
    """(alpha, beta) of the standardized small-time limit process."""
    if isinstance(model, Brownian):
        return 2.0, 0.0
    if isinstance(model, StrictlyStable):
        return model.alpha, model.beta
    return 1.0, 0.0


def classify_regularity(model: LevyModel) -> RegularityFlags:
    if isinstance(model, Brownian):
        return RegularityFlags(True, True)
    if isinstance(model, StrictlyStable):
        if model.alpha >= 1.0 or abs(model.beta) < 1.0:
            return RegularityFlags(True, True)
        # One-sided jumps with alpha < 1: monotone paths.
        return RegularityFlags(model.beta > 0, model.beta < 0)
    return RegularityFlags(model.slope > 0, model.slope < 0)


def is_monotone(model: LevyModel) -> bool:
    flags = classify_regularity(model)
    return flags.regular_up != flags.regular_down


def sample_increments(
    model: LevyModel, n: int, rng: np.random.Generator
) -> np.ndarray:
    """The `n` increments of the model over a unit horizon (dt = 1/n each)."""
    if n < 1:
        raise ParameterError(f"resolution must be >= 1, got {n}")
    dt = 1.0 / n
    if isinstance(model, Brownian):
        z = rng.standard_normal(n)
        return model.mu * dt + math.sqrt(model.sigma2 * dt) * z
    if isinstance(model, StrictlyStable):
        u = rng.random(n)
        w = rng.standard_exponential(n)
        x = kernels.get_backend().cms(u, w, model.alpha, model.beta)
        return (model.scale * dt ** (1.0 / model.alpha)) * x
    return np.full(n, model.slope * dt)


def model_from_dict(spec: dict) -> LevyModel:
    """Build a model from a config mapping like {kind = "brownian", ...}."""
    try:
        kind = spec["kind"]
    except KeyError:
        raise ParameterError("model spec needs a 'kind' entry") from None
    if kind == "brownian":
        return Brownian(mu=float(spec["mu"]), sigma2=float(spec["sigma2"]))
    if kind == "stable":
        return StrictlyStable(
            alpha=float(spec["alpha"]),
            beta=float(spec["beta"]),
            scale=float(spec.get("scale", 1.0)),
        )
    if kind == "drift":
        return Drift(slope=float(spec["slope"]))
    raise ParameterError(f"unknown model kind {kind!r}")


def model_to_dict(model: LevyModel) -> dict:
    if isinstance(model, Brownian):
        return {"kind": "brownian", "mu": model.mu, "sigma2": model.sigma2}
    if isinstance(model, StrictlyStable):
        return {
            "kind": "stable",
            "alpha": model.alpha,
            "beta": model.beta,
            "scale": model.scale,
        }
    return {"kind": "drift", "slope": model.slope}
