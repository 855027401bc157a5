"""Discrete two-sided Skorokhod reflection of a random-walk skeleton.

The skeleton samples a process on a uniform grid over [0, 1] and reflects
it inside [0, 1] by the clipping recursion; the lower and upper regulator
totals record how much the path was pushed up at the floor and down at
the ceiling.  Barrier bookkeeping (last push per side, alternation count,
clean-switching flag) feeds the error-rectification stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError


@dataclass(frozen=True)
class SkeletonPath:
    """Grid resolution `n` plus the n increments over the unit horizon."""

    n: int
    increments: np.ndarray

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=float)
        object.__setattr__(self, "increments", inc)
        if self.n < 1:
            raise ParameterError(f"resolution must be >= 1, got {self.n}")
        if inc.ndim != 1 or inc.shape[0] != self.n:
            raise ParameterError(
                f"expected {self.n} increments, got shape {inc.shape}"
            )


@dataclass
class ReflectionOutcome:
    """Result of reflecting one skeleton inside [0, 1].

    `last_lower` / `last_upper` are the last step indices at which the
    respective regulator increased (0 when it never did), `switch_count`
    counts barrier alternations including the first push, and
    `clean_switching` is False exactly when the path jumped from the floor
    to the ceiling and then returned to the floor (or ran out of steps)
    without touching the ceiling again.  Full paths are attached only on
    request to keep large experiments memory-feasible.
    """

    start: float
    steps: int
    terminal: float
    lower_total: float
    upper_total: float
    last_lower: int
    last_upper: int
    switch_count: int
    clean_switching: bool
    positions: np.ndarray | None = None
    lower_path: np.ndarray | None = None
    upper_path: np.ndarray | None = None


def reflect_two_sided(
    x0: float,
    path: SkeletonPath,
    keep_paths: bool = False,
    compensated: bool = False,
) -> ReflectionOutcome:
    """Apply the two-sided reflection recursion from initial position `x0`.

    Proposals below 0 are clipped to the floor (the deficit goes into the
    lower regulator), proposals above 1 to the ceiling; landing exactly on
    a barrier is not a push.  `compensated` switches the regulator
    accumulation to Kahan-style compensated summation.
    """
    if not 0.0 <= x0 <= 1.0:
        raise ParameterError(f"x0 must lie in [0, 1], got {x0}")
    backend = kernels.get_backend()
    xi = path.increments
    # Barrier statistics always come from the branch-tracking batch kernel: a
    # push whose size underflows the regulator accumulator (L + d == L) is
    # still a push, which path differences cannot recover.
    res = backend.reflect_batch(x0, xi[None, :], compensated)
    terminal, lower, upper, last_lower, last_upper, switches, clean = res
    outcome = ReflectionOutcome(
        start=x0,
        steps=path.n,
        terminal=float(terminal[0]),
        lower_total=float(lower[0]),
        upper_total=float(upper[0]),
        last_lower=int(last_lower[0]),
        last_upper=int(last_upper[0]),
        switch_count=int(switches[0]),
        clean_switching=bool(clean[0]),
    )
    if keep_paths:
        y, lower_path, upper_path = backend.reflect_full(x0, xi, compensated)
        outcome.positions = y
        outcome.lower_path = lower_path
        outcome.upper_path = upper_path
    return outcome


def has_clean_switching(positions) -> bool:
    """True when no floor-to-ceiling jump lacks a later ceiling visit.

    Scans the position sequence for an index i with y[i-1] = 0 and
    y[i] = 1 such that the path stays strictly below 1 from i+1 until its
    first return to 0 (or the end of the sequence).  Returns False when
    such an index exists.  Comparisons are exact: barrier values are the
    literal 0.0 and 1.0 produced by clipping.
    """
    y = np.asarray(positions, dtype=float)
    n = y.shape[0] - 1
    pending = False
    for i in range(1, n + 1):
        if pending:
            if y[i] == 0.0:
                return False
            if y[i] == 1.0:
                pending = False
        if not pending and i <= n - 1 and y[i - 1] == 0.0 and y[i] == 1.0:
            pending = True
    return not pending


def reflect_one_sided(path: SkeletonPath) -> np.ndarray:
    """One-sided reflection at the floor: walk minus its running minimum."""
    walk = np.concatenate(([0.0], np.cumsum(path.increments)))
    return walk - np.minimum.accumulate(walk)


def coarsen(path: SkeletonPath, m: int) -> SkeletonPath:
    """Accumulate blocks of `m` fine increments into one coarse increment.

    Block sums run left to right, so the coarse terminal matches the fine
    terminal up to float associativity (~1e-12 relative).
    """
    if m < 1:
        raise ParameterError(f"block size must be >= 1, got {m}")
    if path.n % m != 0:
        raise ParameterError(f"block size {m} does not divide resolution {path.n}")
    if m == 1:
        return path
    backend = kernels.get_backend()
    coarse = backend.block_sums(path.increments[None, :], m)[0]
    return SkeletonPath(n=path.n // m, increments=coarse)


def reflect_many(
    x0: float, increments: np.ndarray, compensated: bool = False
) -> dict[str, np.ndarray]:
    """Reflect a batch of skeletons (rows of `increments`); terminals only."""
    if not 0.0 <= x0 <= 1.0:
        raise ParameterError(f"x0 must lie in [0, 1], got {x0}")
    backend = kernels.get_backend()
    res = backend.reflect_batch(x0, np.ascontiguousarray(increments, float), compensated)
    terminal, lower, upper, last_lower, last_upper, switches, clean = res
    return {
        "terminal": terminal,
        "lower_total": lower,
        "upper_total": upper,
        "last_lower": last_lower,
        "last_upper": last_upper,
        "switch_count": switches,
        "clean_switching": clean,
    }
