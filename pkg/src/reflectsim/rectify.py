"""Rectification of coarse-grid terminal samples.

The terminal reflection error converges, after rescaling, to the gap
variable V with a sign given by the last barrier visited.  Rectification
therefore adds an independent draw of `scaling * V` to samples whose last
push was at the floor and subtracts it from samples whose last push was
at the ceiling; untouched paths pass through.  The mean-shift variant
replaces the random draw by its expectation and is used to sharpen a
fine-grid reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .models import LevyModel, small_time_scaling, zoom_limit_params
from .moments import expected_v
from .reflection import ReflectionOutcome
from .vlimit import VSamplerSpec, default_v_sampler, draw_v


@dataclass(frozen=True)
class RectifyPolicy:
    """Post-processing switches for rectified samples.

    `clamp_to_unit` clips results back into [0, 1] (off by default: the
    raw rectified values may legitimately fall outside).  With
    `skip_boundary_samples`, samples sitting exactly on a barrier pass
    through unchanged; useful for irregular drivers whose terminal law
    has barrier atoms.
    """

    clamp_to_unit: bool = False
    skip_boundary_samples: bool = False


def barrier_side(last_lower, last_upper) -> np.ndarray:
    """+1 where the floor was pushed last, -1 for the ceiling, 0 for neither."""
    ll = np.asarray(last_lower)
    lu = np.asarray(last_upper)
    return np.where(ll > lu, 1.0, np.where(lu > ll, -1.0, 0.0))


def apply_rectification(
    terminals: np.ndarray,
    last_lower: np.ndarray,
    last_upper: np.ndarray,
    step_scaling: float,
    v_draws: np.ndarray,
    policy: RectifyPolicy = RectifyPolicy(),
) -> np.ndarray:
    """Pure array form of the rectification rule (draws supplied by caller)."""
    terminals = np.asarray(terminals, dtype=float)
    side = barrier_side(last_lower, last_upper)
    out = terminals + step_scaling * side * np.asarray(v_draws, dtype=float)
    if policy.skip_boundary_samples:
        boundary = (terminals == 0.0) | (terminals == 1.0)
        out = np.where(boundary, terminals, out)
    if policy.clamp_to_unit:
        out = np.clip(out, 0.0, 1.0)
    return out


def rectify_samples(
    outcomes: Sequence[ReflectionOutcome],
    model: LevyModel,
    n: int,
    sampler: VSamplerSpec | None = None,
    policy: RectifyPolicy = RectifyPolicy(),
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Rectify reflection outcomes produced at resolution `n` under `model`.

    One standardized V draw is consumed from `rng` per outcome (whether or
    not that outcome gets adjusted), so toggling the policy never shifts
    the draws assigned to other outcomes.
    """
    if rng is None:
        raise ParameterError("rectify_samples needs an rng stream")
    for o in outcomes:
        if o.steps != n:
            raise ParameterError(
                f"outcome was produced at resolution {o.steps}, expected {n}"
            )
    if sampler is None:
        sampler = default_v_sampler(model)
    a = small_time_scaling(model, 1.0 / n)
    terminals = np.array([o.terminal for o in outcomes])
    last_lower = np.array([o.last_lower for o in outcomes])
    last_upper = np.array([o.last_upper for o in outcomes])
    v = np.array([draw_v(sampler, rng) for _ in outcomes])
    return apply_rectification(terminals, last_lower, last_upper, a, v, policy)


def mean_shift_reference(
    outcomes: Sequence[ReflectionOutcome],
    model: LevyModel,
    n_fine: int,
) -> np.ndarray:
    """Shift fine-grid terminals by the expected error instead of a draw.

    Adds `scaling * E V` where the floor was pushed last and subtracts it
    where the ceiling was; available only when the limit mean is finite
    (self-similarity index above 1).
    """
    for o in outcomes:
        if o.steps != n_fine:
            raise ParameterError(
                f"outcome was produced at resolution {o.steps}, expected {n_fine}"
            )
    alpha, beta = zoom_limit_params(model)
    ev = expected_v(alpha, beta)
    a = small_time_scaling(model, 1.0 / n_fine)
    terminals = np.array([o.terminal for o in outcomes])
    side = barrier_side(
        np.array([o.last_lower for o in outcomes]),
        np.array([o.last_upper for o in outcomes]),
    )
    return terminals + a * ev * side
