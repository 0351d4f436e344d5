"""Block splitting and Schur-complement covariance augmentations.

For a split Sigma = [[A, B], [C, D]] with C = B' the blended complement is
A^c(gamma) = A - gamma * B D^-1 C and the inherited constraint vector is
b_A(gamma) = 1 - gamma * B D^-1 1. The intra-group matrix A'' divides the
complement elementwise by b_A b_A', the inter-group matrix A' multiplies
the complement's inverse elementwise by b_A b_A' and inverts back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_RCOND, checked_solve, symmetrize
from .covmat import cov_values
from .errors import (
    BadIndex,
    DegenerateBVector,
    InputError,
    SingularComplement,
    SingularComplementBlock,
    SingularPrecisionProduct,
)

# Floor on b-vector entries before pointwise division.
DEFAULT_EPS_B = 1e-6
# Positive-definiteness margin used by the adaptive gamma cap.
DEFAULT_EPS_PD = 1e-8

HEAD, TAIL = "A", "D"


@dataclass(frozen=True)
class GammaPair:
    """Blend strengths: gamma_c for the Schur complement, gamma_b for the b-vector."""

    gamma_c: float
    gamma_b: float | None = None

    def __post_init__(self):
        if self.gamma_b is None:
            object.__setattr__(self, "gamma_b", self.gamma_c)
        for name in ("gamma_c", "gamma_b"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise InputError(f"{name}={value} outside [0, 1]")

    def scaled(self, factor: float) -> "GammaPair":
        return GammaPair(self.gamma_c * factor, self.gamma_b * factor)


@dataclass
class BlockSplit:
    """Views of a covariance matrix split at index k."""

    parent: np.ndarray
    k: int

    @property
    def a(self) -> np.ndarray:
        return self.parent[: self.k, : self.k]

    @property
    def b(self) -> np.ndarray:
        return self.parent[: self.k, self.k:]

    @property
    def c(self) -> np.ndarray:
        return self.parent[self.k:, : self.k]

    @property
    def d(self) -> np.ndarray:
        return self.parent[self.k:, self.k:]


def split(cov, k: int) -> BlockSplit:
    values = cov_values(cov)
    n = values.shape[0]
    if not (1 <= k < n):
        raise BadIndex(f"split index k={k} outside [1, {n - 1}]")
    return BlockSplit(values, k)


def _own_and_other(sp: BlockSplit, side: str):
    """(own block, cross block from own rows, complementary block)."""
    if side == HEAD:
        return sp.a, sp.b, sp.d
    if side == TAIL:
        return sp.d, sp.c, sp.a
    raise InputError(f"side must be {HEAD!r} or {TAIL!r}, got {side!r}")


def schur_complement(sp: BlockSplit, side: str, gamma_c: float,
                     rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Blended complement: own - gamma_c * cross @ other^-1 @ cross'."""
    own, cross, other = _own_and_other(sp, side)
    if gamma_c == 0.0:
        return own.copy()
    solved = checked_solve(other, cross.T, rcond=rcond, exc=SingularComplementBlock)
    return symmetrize(own - gamma_c * (cross @ solved))


def b_vector(sp: BlockSplit, side: str, gamma_b: float,
             carry: np.ndarray | None = None,
             rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Constraint vector inherited from the complementary block.

    With the default all-ones carry this is b = 1 - gamma_b * cross @ other^-1 @ 1;
    a non-default carry propagates an outer constraint through the split.
    """
    own, cross, other = _own_and_other(sp, side)
    n = sp.parent.shape[0]
    if carry is None:
        carry = np.ones(n)
    else:
        carry = np.asarray(carry, dtype=float)
        if carry.shape != (n,):
            raise InputError(f"carry has shape {carry.shape}, expected ({n},)")
    if side == HEAD:
        carry_own, carry_other = carry[: sp.k], carry[sp.k:]
    else:
        carry_own, carry_other = carry[sp.k:], carry[: sp.k]
    if gamma_b == 0.0:
        return carry_own.copy()
    solved = checked_solve(other, carry_other, rcond=rcond, exc=SingularComplementBlock)
    return carry_own - gamma_b * (cross @ solved)


def augment_intra(sp: BlockSplit, side: str, gammas: GammaPair,
                  eps_b: float = DEFAULT_EPS_B,
                  rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Intra-group matrix: complement divided elementwise by b b'."""
    if gammas.gamma_c == 0.0 and gammas.gamma_b == 0.0:
        own, _, _ = _own_and_other(sp, side)
        return own.copy()
    comp = schur_complement(sp, side, gammas.gamma_c, rcond=rcond)
    b = b_vector(sp, side, gammas.gamma_b, rcond=rcond)
    if np.abs(b).min() < eps_b:
        raise DegenerateBVector(f"|b| entry below {eps_b} before pointwise division")
    return comp / np.outer(b, b)


def augment_inter(sp: BlockSplit, side: str, gammas: GammaPair,
                  eps_b: float = DEFAULT_EPS_B,
                  rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Inter-group matrix: (complement^-1 elementwise* b b')^-1."""
    if gammas.gamma_c == 0.0 and gammas.gamma_b == 0.0:
        own, _, _ = _own_and_other(sp, side)
        return own.copy()
    comp = schur_complement(sp, side, gammas.gamma_c, rcond=rcond)
    b = b_vector(sp, side, gammas.gamma_b, rcond=rcond)
    if np.abs(b).min() < eps_b:
        raise DegenerateBVector(f"|b| entry below {eps_b} in precision-domain product")
    size = comp.shape[0]
    precision = checked_solve(comp, np.eye(size), rcond=rcond, exc=SingularComplement)
    product = symmetrize(precision * np.outer(b, b))
    inverse = checked_solve(product, np.eye(size), rcond=rcond,
                            exc=SingularPrecisionProduct)
    return symmetrize(inverse)


def max_feasible_gamma(sp: BlockSplit, side: str,
                       eps_pd: float = DEFAULT_EPS_PD,
                       eps_b: float = DEFAULT_EPS_B,
                       rcond: float = DEFAULT_RCOND,
                       resolution: float = 1e-6,
                       max_iter: int = 40) -> float:
    """Largest gamma in [0, 1] keeping the complement PD and b entries >= eps_b.

    Bisection; the allocator multiplies the user's gamma by this cap.
    Returns 0.0 when no positive gamma is feasible.
    """

    def feasible(gamma: float) -> bool:
        try:
            comp = schur_complement(sp, side, gamma, rcond=rcond)
            b = b_vector(sp, side, gamma, rcond=rcond)
        except SingularComplementBlock:
            return False
        if b.min() < eps_b:
            return False
        try:
            return bool(np.linalg.eigvalsh(comp).min() > eps_pd)
        except np.linalg.LinAlgError:
            return False

    if feasible(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        if hi - lo < resolution:
            break
        mid = (lo + hi) / 2.0
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
