import numpy as np
import pytest

# The unstable 4x4 covariance used for the shrinkage and min-var golden tests.
UNSTABLE_4X4 = np.array([
    [1.09948514, -1.02926114, 0.22402055, 0.10727343],
    [-1.02926114, 2.54302628, 1.05338531, -0.12481515],
    [0.22402055, 1.05338531, 1.79162765, -0.78962956],
    [0.10727343, -0.12481515, -0.78962956, 0.86316527],
])

# Its printed minimum-variance weights and post-shrinkage weights.
UNSTABLE_MINVAR = np.array([-9.008, -6.871, 8.749, 8.130])
SHRUNK_MINVAR = np.array([0.0674, -0.0068, 0.3658, 0.5735])


def equicorrelated(n: int, rho: float) -> np.ndarray:
    cov = np.full((n, n), float(rho))
    np.fill_diagonal(cov, 1.0)
    return cov


def random_pd(rng: np.random.Generator, n: int, ridge: float | None = None) -> np.ndarray:
    m = rng.standard_normal((n, n))
    cov = m @ m.T + (n if ridge is None else ridge) * np.eye(n)
    return (cov + cov.T) / 2.0


@pytest.fixture
def unstable_4x4():
    return UNSTABLE_4X4.copy()
