"""Private inversion of the removal loss: pick a grid value sandwiched
between the envelope of the full input and the envelope after a bounded
number of removals.

Two flavors.  The pure flavor scores every grid point with the shifted loss
and runs the exponential mechanism; its realised removal tolerance is twice
the shift.  The concentrated flavor binary-searches the grid for the point
where the removal loss crosses the calibrated tolerance; its realised
removal tolerance is twice that tolerance, rounded up.  Neither flavor
touches the black box: both read only the oracle cache.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import OracleCache, removal_loss, shifted_loss_table
from .mechanisms import (
    NoiseSource,
    SearchCalibration,
    calibrate_noisy_search,
    exponential_mechanism,
    exponential_mechanism_distribution,
    noisy_binary_search,
)


@dataclass(frozen=True)
class ShiftedInverseResult:
    y: float
    t_used: int
    flavor: str
    beta: float
    index: int
    shift: float
    eta: float | None = None


def pure_shift(epsilon: float, beta: float, grid_size: int) -> int:
    """Score offset for the pure flavor: ceil((2/epsilon) log(grid/beta))."""
    if epsilon <= 0 or not 0.0 < beta < 1.0 or grid_size < 1:
        raise ValueError(f"invalid parameters epsilon={epsilon} beta={beta} grid={grid_size}")
    return max(1, math.ceil((2.0 / epsilon) * math.log(grid_size / beta)))


def removal_tolerance_pure(epsilon: float, beta: float, grid_size: int) -> int:
    """Removals the pure flavor may charge: twice the score offset."""
    return 2 * pure_shift(epsilon, beta, grid_size)


def removal_tolerance_zcdp(rho: float, beta: float, grid_size: int) -> int:
    """Removals the concentrated flavor may charge, from its calibration."""
    cal = calibrate_noisy_search(grid_size, rho, beta)
    return max(1, math.ceil(2.0 * cal.eta))


def shifted_inverse_pure(
    cache: OracleCache, epsilon: float, beta: float, rng: NoiseSource
) -> ShiftedInverseResult:
    """Exponential mechanism over the shifted-loss scores, sensitivity one.

    With probability at least 1 - beta the output is at most the envelope of
    the input and at least the minimum envelope over inputs shrunk by up to
    ``t_used = 2 * shift`` entries.
    """
    shift = pure_shift(epsilon, beta, len(cache.grid))
    scores = shifted_loss_table(cache, shift)
    index = exponential_mechanism(scores, 1.0, epsilon, rng)
    return ShiftedInverseResult(
        y=cache.grid[index],
        t_used=2 * shift,
        flavor="pure",
        beta=beta,
        index=index,
        shift=float(shift),
    )


def pure_output_distribution(cache: OracleCache, epsilon: float, beta: float) -> np.ndarray:
    """Closed-form output law of the pure flavor, for exact privacy audits."""
    shift = pure_shift(epsilon, beta, len(cache.grid))
    scores = shifted_loss_table(cache, shift)
    return exponential_mechanism_distribution(scores, 1.0, epsilon)


def shifted_inverse_zcdp(
    cache: OracleCache, rho: float, beta: float, rng: NoiseSource
) -> ShiftedInverseResult:
    """Noisy binary search for the smallest grid point with small removal loss.

    The comparison target equals the calibrated tolerance, so on success the
    chosen point has loss below twice the tolerance (hence lies above the
    minimum envelope over ``t_used`` removals) while the point before it has
    positive loss (hence the choice does not exceed the input's envelope).
    """
    grid = cache.grid
    cal: SearchCalibration = calibrate_noisy_search(len(grid), rho, beta)
    memo: dict[int, float] = {}

    def loss_at(i: int) -> float:
        if i not in memo:
            memo[i] = float(removal_loss(cache, grid[i - 1]))
        return memo[i]

    result = noisy_binary_search(loss_at, len(grid), cal.eta, rho, beta, rng)
    index = min(result.index, len(grid))  # top overflow only on a failed run
    return ShiftedInverseResult(
        y=grid[index - 1],
        t_used=max(1, math.ceil(2.0 * cal.eta)),
        flavor="zcdp",
        beta=beta,
        index=index - 1,
        shift=cal.eta,
        eta=cal.eta,
    )
