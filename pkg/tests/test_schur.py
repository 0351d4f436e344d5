import numpy as np
import pytest

from schur_alloc import (
    GammaPair,
    augment_inter,
    augment_intra,
    b_vector,
    max_feasible_gamma,
    schur_complement,
    split,
)
from schur_alloc.errors import BadIndex, DegenerateBVector, InputError

from conftest import equicorrelated, random_pd


@pytest.fixture
def equi3_split():
    # the 3-asset equicorrelated example at rho = 0.5, split {1,2} | {3}
    return split(equicorrelated(3, 0.5), 2)


class TestGammaPair:
    def test_default_gamma_b(self):
        pair = GammaPair(0.7)
        assert pair.gamma_b == 0.7

    def test_range_checked(self):
        with pytest.raises(InputError):
            GammaPair(1.2)
        with pytest.raises(InputError):
            GammaPair(0.5, -0.1)


class TestSplit:
    def test_equicorrelated_blocks(self, equi3_split):
        np.testing.assert_array_equal(equi3_split.a, [[1.0, 0.5], [0.5, 1.0]])
        np.testing.assert_array_equal(equi3_split.b, [[0.5], [0.5]])
        np.testing.assert_array_equal(equi3_split.c, [[0.5, 0.5]])
        np.testing.assert_array_equal(equi3_split.d, [[1.0]])

    def test_two_assets(self):
        sp = split(np.array([[1.0, 0.2], [0.2, 2.0]]), 1)
        assert sp.a.shape == sp.b.shape == sp.c.shape == sp.d.shape == (1, 1)

    def test_bad_index(self):
        with pytest.raises(BadIndex):
            split(np.eye(3), 3)
        with pytest.raises(BadIndex):
            split(np.eye(3), 0)

    def test_c_is_b_transpose(self):
        rng = np.random.default_rng(0)
        cov = random_pd(rng, 7)
        sp = split(cov, 3)
        np.testing.assert_array_equal(sp.c, sp.b.T)


class TestSchurComplement:
    def test_head_side_full_gamma(self, equi3_split):
        comp = schur_complement(equi3_split, "A", 1.0)
        np.testing.assert_allclose(comp, [[0.75, 0.25], [0.25, 0.75]])
        np.testing.assert_allclose(np.linalg.inv(comp), [[1.5, -0.5], [-0.5, 1.5]])

    def test_gamma_zero_is_raw_block(self, equi3_split):
        np.testing.assert_array_equal(schur_complement(equi3_split, "A", 0.0),
                                      equi3_split.a)

    def test_tail_side_full_gamma(self, equi3_split):
        comp = schur_complement(equi3_split, "D", 1.0)
        np.testing.assert_allclose(comp, [[2.0 / 3.0]])

    def test_outputs_symmetric(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            cov = random_pd(rng, 6)
            sp = split(cov, 3)
            for side in ("A", "D"):
                comp = schur_complement(sp, side, 0.8)
                assert np.abs(comp - comp.T).max() < 1e-10


class TestBVector:
    def test_head_side(self, equi3_split):
        np.testing.assert_allclose(b_vector(equi3_split, "A", 1.0), [0.5, 0.5])

    def test_gamma_zero_is_ones(self, equi3_split):
        np.testing.assert_array_equal(b_vector(equi3_split, "A", 0.0), [1.0, 1.0])

    def test_tail_side(self, equi3_split):
        np.testing.assert_allclose(b_vector(equi3_split, "D", 1.0), [1.0 / 3.0])

    def test_carry_propagation(self, equi3_split):
        carry = np.array([2.0, 3.0, 4.0])
        expected = carry[:2] - equi3_split.b @ np.linalg.solve(equi3_split.d, carry[2:])
        np.testing.assert_allclose(b_vector(equi3_split, "A", 1.0, carry=carry), expected)


class TestAugmentations:
    def test_intra_head(self, equi3_split):
        np.testing.assert_allclose(
            augment_intra(equi3_split, "A", GammaPair(1.0)), [[3.0, 1.0], [1.0, 3.0]]
        )

    def test_intra_tail(self, equi3_split):
        np.testing.assert_allclose(
            augment_intra(equi3_split, "D", GammaPair(1.0)), [[6.0]]
        )

    def test_inter_head(self, equi3_split):
        np.testing.assert_allclose(
            augment_inter(equi3_split, "A", GammaPair(1.0)), [[3.0, 1.0], [1.0, 3.0]]
        )

    def test_inter_tail(self, equi3_split):
        np.testing.assert_allclose(
            augment_inter(equi3_split, "D", GammaPair(1.0)), [[6.0]]
        )

    def test_gamma_zero_exact_raw_block(self):
        rng = np.random.default_rng(2)
        cov = random_pd(rng, 5)
        sp = split(cov, 2)
        zero = GammaPair(0.0, 0.0)
        np.testing.assert_array_equal(augment_intra(sp, "A", zero), sp.a)
        np.testing.assert_array_equal(augment_inter(sp, "D", zero), sp.d)

    def test_intra_congruence_form(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            cov = random_pd(rng, 6)
            sp = split(cov, 3)
            gammas = GammaPair(rng.uniform(0.1, 1.0))
            intra = augment_intra(sp, "A", gammas)
            b = b_vector(sp, "A", gammas.gamma_b)
            comp = schur_complement(sp, "A", gammas.gamma_c)
            d_inv = np.diag(1.0 / b)
            np.testing.assert_allclose(intra, d_inv @ comp @ d_inv, atol=1e-12)

    def test_intra_equals_inter_for_constant_b(self):
        # equicorrelated blocks make b constant, where the two coincide
        for rho in (0.2, 0.5):
            sp = split(equicorrelated(4, rho), 2)
            gammas = GammaPair(0.7)
            np.testing.assert_allclose(
                augment_intra(sp, "A", gammas), augment_inter(sp, "A", gammas),
                atol=1e-10,
            )

    def test_degenerate_b_vector_raises(self):
        eps = 5e-7
        cov = np.array([[1.0, 1.0 - eps], [1.0 - eps, 1.0]])
        sp = split(cov, 1)
        with pytest.raises(DegenerateBVector):
            augment_intra(sp, "A", GammaPair(1.0))


class TestBlockInversionIdentity:
    def test_concatenated_solves_match_direct(self):
        # b_D must be 1 - C A^-1 1 for this to hold
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(3, 11))
            cov = random_pd(rng, n)
            k = int(rng.integers(1, n))
            sp = split(cov, k)
            head = np.linalg.solve(schur_complement(sp, "A", 1.0), b_vector(sp, "A", 1.0))
            tail = np.linalg.solve(schur_complement(sp, "D", 1.0), b_vector(sp, "D", 1.0))
            direct = np.linalg.solve(cov, np.ones(n))
            np.testing.assert_allclose(np.concatenate([head, tail]), direct, atol=1e-8)


class TestMaxFeasibleGamma:
    def test_equicorrelated_head_is_one(self, equi3_split):
        assert max_feasible_gamma(equi3_split, "A") == 1.0

    def test_duplicate_asset_caps_below_one(self):
        rho = 0.5
        cov = np.array([[1.0, rho, 1.0], [rho, 1.0, rho], [1.0, rho, 1.0]])
        cap = max_feasible_gamma(split(cov, 2), "A")
        assert cap < 1.0

    def test_diagonal_matrix_is_one(self):
        sp = split(np.diag([1.0, 2.0, 3.0]), 2)
        assert max_feasible_gamma(sp, "A") == 1.0
        assert max_feasible_gamma(sp, "D") == 1.0

    def test_cap_is_feasible(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            cov = random_pd(rng, 6, ridge=0.01)
            sp = split(cov, 3)
            cap = max_feasible_gamma(sp, "A")
            if cap > 0.0:
                comp = schur_complement(sp, "A", cap)
                assert np.linalg.eigvalsh(comp).min() > 0.0
