"""Closed-form minimum-variance portfolios and sub-portfolio fitness measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_RCOND, checked_solve
from .covmat import cov_values
from .errors import (
    DegenerateConstraint,
    DimensionMismatch,
    InputError,
    SingularCovariance,
    SingularQ,
    ZeroNormalizer,
)

# Inverse fitness measures nu(). Inter-group capital is split 1/nu : 1/nu.
#   subportfolio_variance  w_child' Sigma w_child for the child's own weights
#   minvar_variance        1 / (1' Sigma^-1 1)
#   weak_minvar_variance   variance (under Sigma) of the min-var weights of the
#                          weak-shrunk Sigma
#   diag_sum_squares       sum_i Sigma_ii^2 -- a diagonal-only rule kept for
#                          regression tests; not recommended
FITNESS_KINDS = (
    "subportfolio_variance",
    "minvar_variance",
    "weak_minvar_variance",
    "diag_sum_squares",
)


@dataclass
class ScaledSolution:
    """Solution of Q x = b read as a scaled minimum-variance portfolio.

    values = Q^-1 b, weights satisfy b' w = 1 and fitness is the variance
    of that constrained portfolio, so values = weights / fitness.
    """

    values: np.ndarray
    fitness: float
    weights: np.ndarray


def min_var_unit(cov, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Minimum-variance weights with a unit budget constraint: Sigma^-1 1 normalized."""
    values = cov_values(cov)
    ones = np.ones(values.shape[0])
    x = checked_solve(values, ones, rcond=rcond, exc=SingularCovariance)
    denom = float(ones @ x)
    if abs(denom) <= rcond * max(1.0, float(np.abs(x).sum())):
        raise ZeroNormalizer("1' Sigma^-1 1 vanishes; weights undefined")
    return x / denom


def min_var_general(q, b, rcond: float = DEFAULT_RCOND) -> ScaledSolution:
    """Minimum variance subject to b' w = 1 (general linear budget)."""
    q = cov_values(q)
    b = np.asarray(b, dtype=float)
    if b.shape != (q.shape[0],):
        raise DimensionMismatch(f"b has shape {b.shape} for a {q.shape} matrix")
    x = checked_solve(q, b, rcond=rcond, exc=SingularQ)
    denom = float(b @ x)
    if abs(denom) <= rcond * max(1.0, float(np.abs(x).sum())):
        raise DegenerateConstraint("b' Q^-1 b vanishes; constrained portfolio undefined")
    return ScaledSolution(values=x, fitness=1.0 / denom, weights=x / denom)


def portfolio_variance(cov, w) -> float:
    values = cov_values(cov)
    w = np.asarray(w, dtype=float)
    if w.shape != (values.shape[0],):
        raise DimensionMismatch(f"weights shape {w.shape} for a {values.shape} matrix")
    return float(w @ values @ w)


def fitness(cov, kind: str, child_weights=None,
            shrink_grid_step: float = 0.001, rcond: float = DEFAULT_RCOND) -> float:
    """Evaluate the inverse fitness nu of a (possibly augmented) covariance block."""
    values = cov_values(cov)
    if kind == "subportfolio_variance":
        if child_weights is None:
            raise InputError("subportfolio_variance requires child weights")
        return portfolio_variance(values, child_weights)
    if kind == "minvar_variance":
        ones = np.ones(values.shape[0])
        x = checked_solve(values, ones, rcond=rcond, exc=SingularCovariance)
        denom = float(ones @ x)
        if abs(denom) <= rcond * max(1.0, float(np.abs(x).sum())):
            raise ZeroNormalizer("1' Sigma^-1 1 vanishes")
        return 1.0 / denom
    if kind == "weak_minvar_variance":
        from .shrinkage import weak_shrink

        result = weak_shrink(values, grid_step=shrink_grid_step, rcond=rcond)
        return portfolio_variance(values, result.weights)
    if kind == "diag_sum_squares":
        return float(np.sum(np.diag(values) ** 2))
    raise InputError(f"unknown fitness kind {kind!r}; expected one of {FITNESS_KINDS}")
