"""Recursive top-down allocation.

Three modes share one recursion:

  hrp             raw blocks, b = 1, no off-block information (gamma pinned to 0)
  schur_literal   children run on the intra matrices A'', D''; each child vector
                  is concatenated with a 1/nu(inter) scaling
  schur_debiased  as literal, but each child's weights are divided elementwise
                  by that side's b-vector first; at gamma = 1 with minvar
                  fitness and terminal this reproduces the global minimum
                  variance portfolio exactly

allocate_exact propagates the budget constraint itself through the splits and
is exact at gamma = 1 by block inversion, for any split index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np

from ._linalg import DEFAULT_RCOND, checked_solve
from .covmat import CovarianceMatrix, cov_values
from .errors import InputError, NumericalError, SingularComplement, ZeroVariance
from .portfolio import FITNESS_KINDS, ScaledSolution, fitness, min_var_unit
from .schur import (
    DEFAULT_EPS_B,
    DEFAULT_EPS_PD,
    GammaPair,
    augment_inter,
    augment_intra,
    b_vector,
    max_feasible_gamma,
    schur_complement,
    split,
)
from .seriation import (
    SERIATION_METHODS,
    Permutation,
    permute_matrix,
    seriate,
    unpermute_weights,
)
from .shrinkage import weak_shrink

MODES = ("hrp", "schur_literal", "schur_debiased")
TERMINALS = ("minvar", "weak_minvar", "equal_weight", "inverse_variance")

# Retries when a b-vector degenerates: halve gamma this many times, then zero it.
MAX_GAMMA_HALVINGS = 5


@dataclass
class AllocationConfig:
    gammas: GammaPair = field(default_factory=lambda: GammaPair(0.0))
    mode: str = "schur_debiased"
    fitness: str = "subportfolio_variance"
    terminal: str = "minvar"
    terminal_size: int = 5
    seriation: str = "single_linkage"
    adaptive_cap: bool = True
    eps_pd: float = DEFAULT_EPS_PD
    eps_b: float = DEFAULT_EPS_B
    rcond: float = DEFAULT_RCOND
    shrink_grid_step: float = 0.001

    def __post_init__(self):
        if isinstance(self.gammas, (tuple, list)):
            self.gammas = GammaPair(*self.gammas)
        elif isinstance(self.gammas, (int, float)):
            self.gammas = GammaPair(float(self.gammas))
        if self.mode not in MODES:
            raise InputError(f"mode {self.mode!r} not one of {MODES}")
        if self.fitness not in FITNESS_KINDS:
            raise InputError(f"fitness {self.fitness!r} not one of {FITNESS_KINDS}")
        if self.terminal not in TERMINALS:
            raise InputError(f"terminal {self.terminal!r} not one of {TERMINALS}")
        if self.seriation not in SERIATION_METHODS:
            raise InputError(f"seriation {self.seriation!r} not one of {SERIATION_METHODS}")
        if self.terminal_size < 1:
            raise InputError(f"terminal_size must be >= 1, got {self.terminal_size}")
        if self.mode == "hrp":
            self.gammas = GammaPair(0.0, 0.0)

    def with_gamma(self, gamma: float, gamma_b: float | None = None) -> "AllocationConfig":
        return AllocationConfig(
            gammas=GammaPair(gamma, gamma_b),
            mode=self.mode, fitness=self.fitness, terminal=self.terminal,
            terminal_size=self.terminal_size, seriation=self.seriation,
            adaptive_cap=self.adaptive_cap, eps_pd=self.eps_pd, eps_b=self.eps_b,
            rcond=self.rcond, shrink_grid_step=self.shrink_grid_step,
        )

    def to_dict(self) -> dict:
        return {
            "gamma": self.gammas.gamma_c,
            "gamma_b": self.gammas.gamma_b,
            "mode": self.mode,
            "fitness": self.fitness,
            "terminal": self.terminal,
            "terminal_size": self.terminal_size,
            "seriation": self.seriation,
            "adaptive_cap": self.adaptive_cap,
            "eps_pd": self.eps_pd,
            "eps_b": self.eps_b,
            "rcond": self.rcond,
            "shrink_grid_step": self.shrink_grid_step,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AllocationConfig":
        data = dict(data)
        gamma = data.pop("gamma", 0.0)
        gamma_b = data.pop("gamma_b", None)
        return cls(gammas=GammaPair(gamma, gamma_b), **data)


@dataclass
class SplitDiagnostics:
    offset: int              # start of this block in the seriated order
    size: int
    k: int
    gamma_c: float           # effective values actually used at this split
    gamma_b: float
    nu_head: float
    nu_tail: float
    b_min: float
    b_max: float
    halvings: int = 0        # retries spent before this split succeeded
    gamma_zeroed: bool = False


@dataclass
class AllocationReport:
    weights: np.ndarray
    order: Permutation
    splits: list[SplitDiagnostics]
    config: AllocationConfig
    labels: list[str] | None = None


def _terminal_weights(block: np.ndarray, config: AllocationConfig) -> np.ndarray:
    n = block.shape[0]
    if n == 1:
        return np.ones(1)
    if config.terminal == "minvar":
        return min_var_unit(block, rcond=config.rcond)
    if config.terminal == "weak_minvar":
        shrunk = weak_shrink(block, grid_step=config.shrink_grid_step,
                             rcond=config.rcond).shrunk
        return min_var_unit(shrunk, rcond=config.rcond)
    if config.terminal == "equal_weight":
        return np.full(n, 1.0 / n)
    if config.terminal == "inverse_variance":
        diag = np.diag(block)
        if diag.min() <= 0.0:
            raise ZeroVariance("inverse-variance terminal needs positive variances")
        inv = 1.0 / diag
        return inv / inv.sum()
    raise InputError(f"unknown terminal {config.terminal!r}")


def _split_matrices(sp, gammas: GammaPair, config: AllocationConfig):
    """Augmented blocks and b-vectors for one split at given effective gammas."""
    if gammas.gamma_c == 0.0 and gammas.gamma_b == 0.0:
        # Raw-block path: identical arithmetic to HRP, no solves involved.
        a, d = sp.a.copy(), sp.d.copy()
        return {
            "intra": (a, d),
            "inter": (a, d),
            "b": (np.ones(sp.k), np.ones(sp.parent.shape[0] - sp.k)),
        }
    intra = tuple(
        augment_intra(sp, side, gammas, eps_b=config.eps_b, rcond=config.rcond)
        for side in ("A", "D")
    )
    inter = tuple(
        augment_inter(sp, side, gammas, eps_b=config.eps_b, rcond=config.rcond)
        for side in ("A", "D")
    )
    bs = tuple(
        b_vector(sp, side, gammas.gamma_b, rcond=config.rcond)
        for side in ("A", "D")
    )
    return {"intra": intra, "inter": inter, "b": bs}


def _recurse(block: np.ndarray, offset: int, config: AllocationConfig,
             diagnostics: list[SplitDiagnostics]) -> np.ndarray:
    n = block.shape[0]
    if n <= config.terminal_size:
        return _terminal_weights(block, config)
    k = math.ceil(n / 2)
    sp = split(block, k)

    user = config.gammas
    if user.gamma_c == 0.0 and user.gamma_b == 0.0:
        effective = GammaPair(0.0, 0.0)
    elif config.adaptive_cap:
        cap = min(
            max_feasible_gamma(sp, "A", eps_pd=config.eps_pd, eps_b=config.eps_b,
                               rcond=config.rcond),
            max_feasible_gamma(sp, "D", eps_pd=config.eps_pd, eps_b=config.eps_b,
                               rcond=config.rcond),
        )
        effective = user.scaled(cap)
    else:
        effective = user

    halvings = 0
    gamma_zeroed = False
    while True:
        try:
            parts = _split_matrices(sp, effective, config)
            break
        except NumericalError:
            if halvings < MAX_GAMMA_HALVINGS:
                halvings += 1
                effective = effective.scaled(0.5)
            elif not gamma_zeroed:
                gamma_zeroed = True
                effective = GammaPair(0.0, 0.0)
            else:
                raise

    a_intra, d_intra = parts["intra"]
    a_inter, d_inter = parts["inter"]
    b_head, b_tail = parts["b"]

    w_head = _recurse(a_intra, offset, config, diagnostics)
    w_tail = _recurse(d_intra, offset + k, config, diagnostics)

    nu_head = fitness(a_inter, config.fitness, child_weights=w_head,
                      shrink_grid_step=config.shrink_grid_step, rcond=config.rcond)
    nu_tail = fitness(d_inter, config.fitness, child_weights=w_tail,
                      shrink_grid_step=config.shrink_grid_step, rcond=config.rcond)

    head, tail = w_head, w_tail
    if config.mode == "schur_debiased" and not (
        effective.gamma_c == 0.0 and effective.gamma_b == 0.0
    ):
        head = head / b_head
        tail = tail / b_tail

    combined = np.concatenate([head / nu_head, tail / nu_tail])
    combined = combined / combined.sum()

    diagnostics.append(SplitDiagnostics(
        offset=offset, size=n, k=k,
        gamma_c=effective.gamma_c, gamma_b=effective.gamma_b,
        nu_head=float(nu_head), nu_tail=float(nu_tail),
        b_min=float(min(b_head.min(), b_tail.min())),
        b_max=float(max(b_head.max(), b_tail.max())),
        halvings=halvings, gamma_zeroed=gamma_zeroed,
    ))
    return combined


def allocate(cov, config: AllocationConfig | None = None) -> AllocationReport:
    """Seriate once, recursively bisect, and return normalized weights."""
    if config is None:
        config = AllocationConfig()
    values = cov_values(cov)
    labels = cov.labels if isinstance(cov, CovarianceMatrix) else None
    if np.diag(values).min() <= 0.0:
        raise ZeroVariance("allocator requires strictly positive variances")

    perm = seriate(values, method=config.seriation)
    ordered = permute_matrix(values, perm)

    diagnostics: list[SplitDiagnostics] = []
    weights = _recurse(ordered, 0, config, diagnostics)
    weights = weights / weights.sum()
    weights = unpermute_weights(weights, perm)
    return AllocationReport(weights=weights, order=perm, splits=diagnostics,
                            config=config, labels=labels)


def allocate_exact(cov, b=None, gammas: GammaPair | float = 1.0, m: int = 1,
                   split_at: Callable[[int], int] | None = None,
                   rcond: float = DEFAULT_RCOND) -> ScaledSolution:
    """Constraint-propagating recursion; equals Sigma^-1 b exactly at gamma = 1.

    split_at maps a block size n to a split index in [1, n-1]; the default is
    the midpoint ceil(n / 2).
    """
    values = cov_values(cov)
    n = values.shape[0]
    if isinstance(gammas, (int, float)):
        gammas = GammaPair(float(gammas))
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    if b is None:
        b = np.ones(n)
    else:
        b = np.asarray(b, dtype=float)
        if b.shape != (n,):
            raise InputError(f"b has shape {b.shape}, expected ({n},)")

    def recurse(block: np.ndarray, carry: np.ndarray) -> np.ndarray:
        size = block.shape[0]
        if size <= m:
            return checked_solve(block, carry, rcond=rcond, exc=SingularComplement)
        k = split_at(size) if split_at is not None else math.ceil(size / 2)
        sp = split(block, k)
        comp_head = schur_complement(sp, "A", gammas.gamma_c, rcond=rcond)
        comp_tail = schur_complement(sp, "D", gammas.gamma_c, rcond=rcond)
        carry_head = b_vector(sp, "A", gammas.gamma_b, carry=carry, rcond=rcond)
        carry_tail = b_vector(sp, "D", gammas.gamma_b, carry=carry, rcond=rcond)
        return np.concatenate([
            recurse(comp_head, carry_head),
            recurse(comp_tail, carry_tail),
        ])

    x = recurse(values, b)
    denom = float(b @ x)
    if abs(denom) <= rcond * max(1.0, float(np.abs(x).sum())):
        raise NumericalError("b' x vanishes; cannot normalize exact solution")
    return ScaledSolution(values=x, fitness=1.0 / denom, weights=x / denom)
