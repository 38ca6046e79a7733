import math

import numpy as np
import pytest

from torus.catmap import build_propagator, coupled_spec
from torus.entropy import (purity, linear_entropy, von_neumann, renyi2, entropy_sample,
                           rmt_saturation, clipped_eigenvalues, shannon_entropy)
from torus.errors import NumericalHealthError
from torus.hilbert import partial_trace_pure
from torus.states import random_pure_state, coherent_state, product_state, evolve_state


class TestEntropy:

    def testPure(self):
        rho = np.zeros((4, 4))
        rho[0, 0] = 1.0
        sample = entropy_sample(0, rho)
        assert (sample.s_linear, sample.s_vn, sample.s_renyi2) == pytest.approx((0, 0, 0), abs=1e-12)

    @pytest.mark.parametrize('n', [2, 4, 64])
    def testMaximallyMixed(self, n):
        rho = np.eye(n) / n
        assert linear_entropy(rho) == pytest.approx(1 - 1 / n)
        assert von_neumann(rho) == pytest.approx(math.log(n))
        assert renyi2(rho) == pytest.approx(math.log(n))

    def testCrossIdentities(self, rng):
        for _ in range(10):
            psi = random_pure_state(36, rng)
            rho1 = partial_trace_pure(psi, (6, 6), 1)
            rho2 = partial_trace_pure(psi, (6, 6), 2)
            assert math.exp(-renyi2(rho1)) == pytest.approx(purity(rho1), abs=1e-12)
            assert renyi2(rho1) <= von_neumann(rho1) + 1e-12
            assert von_neumann(rho1) == pytest.approx(von_neumann(rho2), abs=1e-9)

    @pytest.mark.parametrize('dynamics', ['HE', 'HH'])
    def testGlobalPhase(self, dynamics):
        n = 8
        prop = build_propagator(coupled_spec(dynamics, n))
        shifted = prop.with_phase(0.7)
        psi0 = product_state(coherent_state(n, (0.5, 0.5)), coherent_state(n, (0.3, 0.6)))
        for t in (1, 4, 9):
            a = entropy_sample(t, partial_trace_pure(evolve_state(psi0, prop, t), (n, n), 1))
            b = entropy_sample(t, partial_trace_pure(evolve_state(psi0, shifted, t), (n, n), 1))
            assert (a.s_linear, a.s_vn, a.s_renyi2) == \
                pytest.approx((b.s_linear, b.s_vn, b.s_renyi2), abs=1e-10)

    def testShannonZero(self):
        assert shannon_entropy([1.0, 0.0, 0.0]) == 0.0
        assert shannon_entropy([0.5, 0.5]) == pytest.approx(math.log(2))


class TestClipping:

    def testSmallNegativeClipped(self):
        evals = clipped_eigenvalues(np.diag([1.0 + 1e-11, -1e-11]))
        assert evals.min() == 0.0

    def testLargeNegativeRaises(self):
        with pytest.raises(NumericalHealthError):
            clipped_eigenvalues(np.diag([1.0, -1e-6]))


class TestSaturation:

    def testClosedForm(self):
        sat = rmt_saturation(64)
        assert sat.purity_sat == pytest.approx(128 / 4097)
        assert sat.s_l_sat == pytest.approx(1 - 128 / 4097)
        assert sat.s_vn_sat == pytest.approx(math.log(64) - 0.5)
        assert set(sat.provenance) == {"purity_sat", "s_l_sat", "s_vn_sat"}

    @pytest.mark.parametrize('n', [4, 8])
    def testHaarAverage(self, n, rng):
        samples = [purity(partial_trace_pure(random_pure_state(n * n, rng), (n, n), 1))
                   for _ in range(2000)]
        err = np.std(samples) / math.sqrt(len(samples))
        assert abs(np.mean(samples) - rmt_saturation(n).purity_sat) <= 5 * err
