import math

import numpy as np
import pytest

from torus.catmap import build_propagator, coupled_spec
from torus.entropy import von_neumann
from torus.errors import (BudgetExceededError, DimensionMismatchError, ZeroSeriesError,
                          NonNormalizedStateError)
from torus.hilbert import partial_trace_pure, dft_matrix
from torus.states import (coherent_state, product_state, evolve_state, random_pure_state,
                          random_density_matrix, density_of)
from torus.wigner import (operator_schmidt, spectrum_entropy, wse, wse_pure_fast, wigner_grid,
                          wigner_grid_1d, wigner_transform_matrix, wigner_schmidt_crosscheck,
                          SchmidtSpectrum)

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


class TestOperatorSchmidt:

    def testProductRankOne(self, rng):
        rho = np.kron(random_density_matrix(3, rng), random_density_matrix(3, rng))
        assert operator_schmidt(rho, (3, 3)).rank == 1

    def testBell(self):
        spec = operator_schmidt(density_of(BELL), (2, 2))
        # Σσ² = Tr ρ² = 1
        np.testing.assert_allclose(spec.sigmas, [0.5, 0.5, 0.5, 0.5], atol=1e-14)
        assert wse(spec) == pytest.approx(math.log(4))

    def testParseval(self, rng):
        for _ in range(5):
            rho = random_density_matrix(9, rng)
            spec = operator_schmidt(rho, (3, 3))
            assert np.sum(spec.sigmas ** 2) == pytest.approx(np.real(np.vdot(rho, rho)), abs=1e-10)
            assert np.sum(spec.normalized ** 2) == pytest.approx(1.0, abs=1e-10)
            assert np.all(np.diff(spec.sigmas) <= 0)

    def testMismatch(self):
        with pytest.raises(DimensionMismatchError):
            operator_schmidt(np.eye(6), (2, 2))


class TestEntropy:

    def testSingle(self):
        assert spectrum_entropy([2.0, 0.0, 1e-16]) == 0.0

    @pytest.mark.parametrize('k', [2, 3, 7])
    def testEqual(self, k):
        assert spectrum_entropy(np.ones(k)) == pytest.approx(math.log(k))

    def testZero(self):
        with pytest.raises(ZeroSeriesError):
            wse(SchmidtSpectrum(np.zeros(3), 0.0))

    def testPureRelation(self, rng):
        n = 8
        for _ in range(20):
            psi = random_pure_state(n * n, rng)
            full = wse(operator_schmidt(density_of(psi), (n, n)))
            s_vn = von_neumann(partial_trace_pure(psi, (n, n), 1))
            assert full == pytest.approx(2 * s_vn, abs=1e-9)
            assert wse_pure_fast(psi, (n, n)) == pytest.approx(full, abs=1e-9)
            assert full <= math.log(n ** 4) + 1e-12

    def testFastPathSpecialStates(self):
        assert wse_pure_fast(BELL, (2, 2)) == pytest.approx(2 * math.log(2))
        psi = product_state(coherent_state(8, (0.2, 0.4)), coherent_state(8, (0.5, 0.5)))
        assert wse_pure_fast(psi, (8, 8)) == pytest.approx(0.0, abs=1e-10)

    def testFastPathLarge(self):
        n = 64
        prop = build_propagator(coupled_spec("HH", n))
        psi = evolve_state(product_state(coherent_state(n, (0.5, 0.5)),
                                         coherent_state(n, (0.5, 0.5))), prop, 8)
        s_vn = von_neumann(partial_trace_pure(psi, (n, n), 1))
        assert wse_pure_fast(psi, (n, n)) == pytest.approx(2 * s_vn, abs=1e-9)

    def testNotNormalized(self):
        with pytest.raises(NonNormalizedStateError):
            wse_pure_fast(np.ones(4), (2, 2))


class TestWignerGrid1D:

    def testRealAndNormalized(self, rng):
        grid = wigner_grid_1d(random_pure_state(8, rng), 8)
        assert grid.values.shape == (16, 16)
        assert grid.values.dtype == np.float64
        assert grid.values.sum() == pytest.approx(1.0, abs=1e-12)
        assert grid.imag_residue <= 1e-9

    def testPositionEigenstate(self):
        psi = np.zeros(4)
        psi[0] = 1.0
        grid = wigner_grid_1d(psi, 4)
        np.testing.assert_allclose(grid.position_marginal(), [1, 0, 0, 0], atol=1e-14)
        np.testing.assert_allclose(grid.values.sum(axis=1)[1::2], 0, atol=1e-14)

    def testMarginals(self, rng):
        n = 8
        psi = random_pure_state(n, rng)
        grid = wigner_grid_1d(psi, n)
        np.testing.assert_allclose(grid.position_marginal(), np.abs(psi) ** 2, atol=1e-8)
        np.testing.assert_allclose(grid.momentum_marginal(),
                                   np.abs(dft_matrix(n).conj().T @ psi) ** 2, atol=1e-8)

    def testOverlap(self, rng):
        n = 8
        for _ in range(20):
            psi, phi = random_pure_state(n, rng), random_pure_state(n, rng)
            lhs = np.sum(wigner_grid_1d(psi, n).values * wigner_grid_1d(phi, n).values)
            assert lhs == pytest.approx(abs(np.vdot(psi, phi)) ** 2 / (2 * n), abs=1e-8)

    def testMaximallyMixed(self):
        n = 4
        values = wigner_grid_1d(np.eye(n) / n, n).values
        np.testing.assert_allclose(values[::2], 1 / (2 * n * n), atol=1e-15)
        np.testing.assert_allclose(values[1::2], 0, atol=1e-15)

    def testMatchesTransformMatrix(self, rng):
        n = 5
        rho = random_density_matrix(n, rng)
        direct = (wigner_transform_matrix(n) @ rho.reshape(-1)).reshape(2 * n, 2 * n)
        np.testing.assert_allclose(wigner_grid_1d(rho, n).values, direct.real, atol=1e-13)

    def testCoherentMaximum(self):
        n = 8
        values = wigner_grid_1d(coherent_state(n, (0.5, 0.5)), n).values
        assert values[n, n] == pytest.approx(values.max())
        # 偶数行上 W(a, b+n) = W(a, b)
        np.testing.assert_allclose(values[::2, n:], values[::2, :n], atol=1e-13)

    def testMetadata(self):
        grid = wigner_grid_1d(np.eye(4) / 4, 4)
        assert grid.metadata()["convention"] == "doubled-lattice-midpoint/v1"


class TestWignerGrid2D:

    def testShapeAndNorm(self, rng):
        grid = wigner_grid(random_pure_state(16, rng), 4)
        assert grid.values.shape == (8, 8, 8, 8)
        assert grid.dof == 2
        assert grid.values.sum() == pytest.approx(1.0, abs=1e-12)

    def testBudget(self):
        with pytest.raises(BudgetExceededError):
            wigner_grid(np.eye(256) / 256, 16)

    def testWrongDimension(self):
        with pytest.raises(DimensionMismatchError):
            wigner_grid(np.eye(5) / 5, 4)

    def testCrosscheckRandom(self, rng):
        report = wigner_schmidt_crosscheck(random_pure_state(16, rng), (4, 4))
        assert report.max_deviation <= 1e-6

    def testCrosscheckProduct(self):
        psi = product_state(coherent_state(4, (0.5, 0.5)), coherent_state(4, (0.25, 0.75)))
        report = wigner_schmidt_crosscheck(psi, (4, 4))
        assert report.grid_rank == report.operator_rank == 1

    def testCrosscheckEvolved(self):
        n = 8
        prop = build_propagator(coupled_spec("HH", n))
        psi = evolve_state(product_state(coherent_state(n, (0.5, 0.5)),
                                         coherent_state(n, (0.3, 0.6))), prop, 3)
        assert wigner_schmidt_crosscheck(psi, (n, n)).max_deviation <= 1e-6
