"""Weak adaptive shrinkage: scale off-diagonal mass by xi, picking the xi
that minimizes the original-covariance variance of the long-only-clipped
minimum-variance portfolio."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import DEFAULT_RCOND
from .covmat import cov_values
from .errors import AllNonPositive, NoFeasibleXi, XiOutOfRange

# Grid resolution for the xi search. 0.001 resolves the reference 4x4
# example's true minimizer (0.976); a 0.005 grid misses it.
DEFAULT_GRID_STEP = 0.001


@dataclass
class ShrinkageResult:
    xi: float
    shrunk: np.ndarray
    weights: np.ndarray          # min-var weights of the shrunk matrix (may be slightly short)
    clipped_variance: float      # variance of the clipped weights under the ORIGINAL matrix
    curve: list[tuple[float, float]] = field(default_factory=list)   # (xi, clipped variance)
    skipped: list[float] = field(default_factory=list)               # grid points that failed to solve


def scale_off_diagonal(cov, xi: float) -> np.ndarray:
    """xi * Sigma + (1 - xi) * diag(Sigma): diagonal untouched, off-diagonal scaled."""
    values = cov_values(cov)
    if not (0.0 <= xi <= 1.0):
        raise XiOutOfRange(f"xi={xi} outside [0, 1]")
    return xi * values + (1.0 - xi) * np.diag(np.diag(values))


def long_only_clip(weights) -> np.ndarray:
    """Zero out short positions and renormalize the surviving weights to sum 1."""
    weights = np.asarray(weights, dtype=float)
    clipped = np.where(weights > 0.0, weights, 0.0)
    total = clipped.sum()
    if total <= 0.0:
        raise AllNonPositive("no positive weight to renormalize")
    return clipped / total


def weak_shrink(cov, grid_step: float = DEFAULT_GRID_STEP,
                rcond: float = DEFAULT_RCOND) -> ShrinkageResult:
    """Grid-search xi in [0, 1]; ties broken toward smaller xi.

    At each xi the min-var portfolio of the shrunk matrix is clipped long-only
    and its variance is judged by the original matrix. Singular or otherwise
    infeasible grid points are skipped and recorded. The whole grid is solved
    as one batched linear-algebra call.
    """
    values = cov_values(cov)
    if not (0.0 < grid_step <= 1.0):
        raise XiOutOfRange(f"grid_step={grid_step} outside (0, 1]")
    steps = int(round(1.0 / grid_step))
    grid = np.linspace(0.0, 1.0, steps + 1)
    n = values.shape[0]

    diag = np.diag(np.diag(values))
    stack = grid[:, None, None] * values + (1.0 - grid)[:, None, None] * diag

    singular = np.linalg.svd(stack, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        rc = singular[:, -1] / singular[:, 0]
    valid = np.isfinite(rc) & (rc >= rcond)

    x = np.full((len(grid), n), np.nan)
    if valid.any():
        try:
            x[valid] = np.linalg.solve(stack[valid], np.ones(n))
        except np.linalg.LinAlgError:
            for idx in np.nonzero(valid)[0]:
                try:
                    x[idx] = np.linalg.solve(stack[idx], np.ones(n))
                except np.linalg.LinAlgError:
                    valid[idx] = False

    denom = x.sum(axis=1)
    with np.errstate(invalid="ignore"):
        valid &= np.isfinite(denom) & (
            np.abs(denom) > rcond * np.maximum(1.0, np.abs(x).sum(axis=1))
        )
    weights = np.where(valid[:, None], x / denom[:, None], np.nan)
    clipped = np.where(weights > 0.0, weights, 0.0)
    mass = clipped.sum(axis=1)
    valid &= mass > 0.0
    with np.errstate(invalid="ignore"):
        clipped = clipped / mass[:, None]
    variances = np.einsum("gi,ij,gj->g", clipped, values, clipped)

    if not valid.any():
        raise NoFeasibleXi("minimum-variance solve failed at every grid point")
    masked = np.where(valid, variances, np.inf)
    best = int(np.argmin(masked))
    xi = float(grid[best])
    return ShrinkageResult(
        xi=xi,
        shrunk=stack[best],
        weights=x[best] / denom[best],
        clipped_variance=float(variances[best]),
        curve=[(float(g), float(v)) for g, v, ok in zip(grid, variances, valid) if ok],
        skipped=[float(g) for g, ok in zip(grid, valid) if not ok],
    )
