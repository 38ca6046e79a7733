import numpy as np
import pytest

from torus.catmap import build_propagator, coupled_spec
from torus.states import (PhasePoint, wrap_unit, image_window, coherent_state, product_state,
                          density_of, evolve_state, phase_space_centroid, random_pure_state,
                          random_density_matrix, random_unitary, is_normalized, fidelity,
                          marginal_variances)
from torus.hilbert import position_operator, shift_operator
from utils.check_utils import unitarity_residual


class TestPhasePoint:

    @pytest.mark.parametrize('value,expected', [((1.25, -0.25), (0.25, 0.75)),
                                                ("0.1, 0.2", (0.1, 0.2)),
                                                ((0.5, 0.5), (0.5, 0.5))])
    def testParse(self, value, expected):
        np.testing.assert_allclose(PhasePoint.parse(value).as_tuple(), expected, atol=1e-15)

    def testBadString(self):
        with pytest.raises(ValueError):
            PhasePoint.parse("0.1")

    @pytest.mark.parametrize('x', [-1e-20, 1.0, 3.0, -2.0])
    def testWrapClosed(self, x):
        r = wrap_unit(x)
        assert 0.0 <= r < 1.0

    def testImageWindow(self):
        assert image_window(64) == 3
        assert image_window(4) > image_window(8)


class TestCoherent:

    @pytest.mark.parametrize('n', [2, 4, 8, 64])
    def testNormalized(self, n):
        assert is_normalized(coherent_state(n, (0.3, 0.6)))

    @pytest.mark.parametrize('center', [(0.3, 0.6), (0.5, 0.5), (0.8, 0.1)])
    def testCentroid(self, center):
        n = 64
        q, p = phase_space_centroid(coherent_state(n, center))
        assert q == pytest.approx(center[0], abs=1.0 / n)
        assert p == pytest.approx(center[1], abs=1.0 / n)

    @pytest.mark.parametrize('center', [(0.3, 0.6), (0.71, 0.15), (0.0, 0.5)])
    def testTranslationCovariance(self, center):
        n = 32
        moved = coherent_state(n, (center[0] + 1.0 / n, center[1]))
        shifted = shift_operator(n) @ coherent_state(n, center)
        assert fidelity(moved, shifted) >= 1 - 1e-8

    @pytest.mark.parametrize('center', [(0.3, 0.6), (0.1, 0.4), (0.6, 0.9)])
    def testMinimalUncertainty(self, center):
        n = 64
        var_q, var_p = marginal_variances(coherent_state(n, center), center)
        assert 0.9 <= var_q / var_p <= 1.1
        assert var_q == pytest.approx(n / (4 * np.pi), rel=0.1)

    def testPositionAtCenter(self):
        n = 64
        psi = coherent_state(n, (0.5, 0.5))
        assert abs(np.vdot(psi, position_operator(n) @ psi)) <= 1e-6

    def testDistantOverlap(self):
        n = 64
        assert abs(np.vdot(coherent_state(n, (0.1, 0.1)), coherent_state(n, (0.6, 0.6)))) < 1e-6

    def testProductOrdering(self):
        a = np.array([1.0, 0.0])
        b = np.array([0.0, 1.0, 0.0])
        psi = product_state(a, b)
        assert psi[1] == 1.0

    def testDensity(self):
        rho = density_of(coherent_state(8, (0.5, 0.5)))
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-13)


class TestEvolution:

    def testIdentityAtZero(self):
        psi = product_state(coherent_state(4, (0.2, 0.3)), coherent_state(4, (0.5, 0.5)))
        prop = build_propagator(coupled_spec("HH", 4))
        np.testing.assert_array_equal(evolve_state(psi, prop, 0), psi)

    def testNormPreserved(self):
        psi = product_state(coherent_state(8, (0.2, 0.3)), coherent_state(8, (0.5, 0.5)))
        prop = build_propagator(coupled_spec("HE", 8))
        assert is_normalized(evolve_state(psi, prop, 20), tol=1e-10)


class TestRandom:

    def testUnitary(self, rng):
        assert unitarity_residual(random_unitary(6, rng)) <= 1e-12

    def testDensity(self, rng):
        rho = random_density_matrix(6, rng, rank=2)
        assert np.trace(rho).real == pytest.approx(1.0)
        evals = np.linalg.eigvalsh(rho)
        assert evals.min() >= -1e-12
        assert np.count_nonzero(evals > 1e-10) == 2

    def testPure(self, rng):
        assert is_normalized(random_pure_state(10, rng))
