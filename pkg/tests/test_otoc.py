import math

import numpy as np
import pytest

from torus.catmap import build_propagator, coupled_spec
from torus.entropy import purity, renyi2
from torus.errors import (DimensionMismatchError, NonPureStateError, ZeroSeriesError,
                          NumericalHealthError)
from torus.hilbert import partial_trace_pure
from torus.otoc import (OtocConfig, CorrelatorSample, heisenberg_evolve, otoc_full,
                        otoc_time_series, correlators_2_4, split_identity, otoc_re_sum,
                        clock_shift_basis, re_prefactor, rescale_factor, rescale_for_comparison,
                        check_sample, x2d, p2d, X2D, P2D, INITIAL_DENSITY, NORMALIZED_TRACE)
from torus.states import (coherent_state, product_state, evolve_state, random_hermitian,
                          random_density_matrix)


def _setup(n, dynamics="HH"):
    prop = build_propagator(coupled_spec(dynamics, n))
    psi0 = product_state(coherent_state(n, (0.5, 0.5)), coherent_state(n, (0.3, 0.6)))
    return prop, psi0


class TestHeisenberg:

    def testZeroSteps(self, rng):
        a = random_hermitian(16, rng)
        np.testing.assert_array_equal(heisenberg_evolve(a, build_propagator(coupled_spec("HH", 4)), 0), a)

    def testIdentity(self):
        prop = build_propagator(coupled_spec("HH", 4))
        np.testing.assert_allclose(heisenberg_evolve(np.eye(16), prop, 7), np.eye(16), atol=1e-12)

    def testSpectrum(self, rng):
        prop = build_propagator(coupled_spec("HH", 8))
        a = random_hermitian(64, rng)
        a_t = heisenberg_evolve(a, prop, 5)
        np.testing.assert_allclose(a_t, a_t.conj().T, atol=1e-9)
        np.testing.assert_allclose(np.linalg.eigvalsh(a_t), np.linalg.eigvalsh(a), atol=1e-9)

    def testNegative(self):
        with pytest.raises(ValueError):
            heisenberg_evolve(np.eye(16), build_propagator(coupled_spec("HH", 4)), -1)

    def testMismatch(self):
        with pytest.raises(DimensionMismatchError):
            heisenberg_evolve(np.eye(9), build_propagator(coupled_spec("HH", 4)), 1)


class TestKronOperators:

    def testApplyMatchesDense(self, rng):
        n = 4
        psi = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
        for op in (x2d(n), p2d(n)):
            np.testing.assert_allclose(op.apply(psi), op.dense() @ psi, atol=1e-13)


class TestSplitIdentity:

    def testRandomPairs(self, rng):
        n = 8
        u = build_propagator(coupled_spec("HH", n)).dense()
        for i in range(50):
            a, b = random_hermitian(n * n, rng), random_hermitian(n * n, rng)
            t = i % 11
            cfg = OtocConfig(a, b, NORMALIZED_TRACE)
            sample = otoc_full(cfg, np.eye(n * n) / (n * n), u, t)
            assert sample.norm == n * n
            assert sample.c >= -1e-10
            assert sample.split_residual <= 1e-8

    @pytest.mark.parametrize('b', [P2D, INITIAL_DENSITY])
    def testVectorPath(self, b):
        prop, psi0 = _setup(8)
        for t in range(11):
            sample = otoc_full(OtocConfig(X2D, b), psi0, prop, t)
            assert sample.split_residual <= 1e-8
            assert sample.real_c4 == (b == INITIAL_DENSITY)
            if sample.real_c4:
                assert abs(sample.c4_imag) <= 1e-8

    def testSplitFormula(self):
        assert split_identity(3.0, 1.0, 2.0) == pytest.approx(2.0)


class TestPaths:

    @pytest.mark.parametrize('b', [P2D, INITIAL_DENSITY])
    def testVectorMatchesDense(self, b):
        prop, psi0 = _setup(4)
        for t in (0, 1, 3, 6):
            fast = otoc_full(OtocConfig(X2D, b), psi0, prop, t, path="vector")
            slow = otoc_full(OtocConfig(X2D, b), psi0, prop, t, path="dense")
            assert fast.c == pytest.approx(slow.c, abs=1e-10)
            assert fast.c2 == pytest.approx(slow.c2, abs=1e-10)
            assert fast.c4_real == pytest.approx(slow.c4_real, abs=1e-10)
            assert fast.c4_imag == pytest.approx(slow.c4_imag, abs=1e-10)

    def testFourPointUnsymmetrized(self):
        n = 4
        prop, psi0 = _setup(n)
        a, b = x2d(n).dense(), p2d(n).dense()
        rho = np.outer(psi0, psi0.conj())
        for t in range(6):
            sample = otoc_full(OtocConfig(X2D, P2D), psi0, prop, t, path="vector")
            a_t = heisenberg_evolve(a, prop, t)
            expected = np.trace(rho @ a_t @ b @ a_t @ b)
            assert sample.c4_real == pytest.approx(expected.real, abs=1e-10)
            assert sample.c4_imag == pytest.approx(expected.imag, abs=1e-10)
            corr = correlators_2_4(a, b, prop, t, average="state_expectation", rho=psi0)
            assert complex(sample.c4_real, sample.c4_imag) == pytest.approx(corr.c4, abs=1e-10)

    def testNormalizedTraceFourPointReal(self, rng):
        n = 4
        prop, _ = _setup(n)
        a, b = random_hermitian(n * n, rng), random_hermitian(n * n, rng)
        sample = otoc_full(OtocConfig(a, b, NORMALIZED_TRACE), np.eye(n * n) / (n * n), prop, 3)
        assert sample.real_c4
        assert abs(sample.c4_imag) <= 1e-8 * max(1.0, abs(sample.c4_real))

    def testInitialDensityIsVariance(self):
        n = 8
        prop, psi0 = _setup(n)
        x = x2d(n).dense()
        for t in (0, 2, 5):
            psi_t = evolve_state(psi0, prop, t)
            mean = np.vdot(psi_t, x @ psi_t).real
            var = np.vdot(psi_t, x @ x @ psi_t).real - mean ** 2
            assert otoc_full(OtocConfig(X2D, INITIAL_DENSITY), psi0, prop, t).c == \
                pytest.approx(var, abs=1e-10)

    def testInitialDensityMatchesNormalizedTrace(self):
        n = 8
        prop, psi0 = _setup(n)
        state = otoc_full(OtocConfig(X2D, INITIAL_DENSITY), psi0, prop, 3).c
        trace = otoc_full(OtocConfig(X2D, INITIAL_DENSITY, NORMALIZED_TRACE), psi0, prop, 3).c
        assert state == pytest.approx(0.5 * trace * n * n, abs=1e-9)

    def testMixedStateRejectedOnVectorPath(self, rng):
        prop, _ = _setup(4)
        with pytest.raises(NonPureStateError):
            otoc_full(OtocConfig(X2D, P2D), random_density_matrix(16, rng), prop, 1, path="vector")

    def testMixedStateDensePath(self, rng):
        prop, _ = _setup(4)
        sample = otoc_full(OtocConfig(X2D, P2D), random_density_matrix(16, rng), prop, 2)
        assert sample.c >= -1e-10
        assert sample.split_residual <= 1e-8

    def testCustomShape(self):
        prop, psi0 = _setup(4)
        with pytest.raises(DimensionMismatchError):
            otoc_full(OtocConfig(np.eye(9), P2D), psi0, prop, 1)

    def testGlobalPhase(self):
        prop, psi0 = _setup(4)
        cfg = OtocConfig(X2D, P2D)
        a = otoc_full(cfg, psi0, prop, 4).c
        b = otoc_full(cfg, psi0, prop.with_phase(1.3), 4).c
        assert a == pytest.approx(b, abs=1e-12)

    @pytest.mark.parametrize('kwargs', [dict(average="bogus"), dict(operator_a="Q2D"),
                                        dict(operator_b="X2D")])
    def testConfigValidation(self, kwargs):
        with pytest.raises(ValueError):
            OtocConfig(**kwargs)

    def testDenseCorrelatorsNeedState(self, rng):
        prop, _ = _setup(4)
        a = random_hermitian(16, rng)
        with pytest.raises(ValueError):
            correlators_2_4(a, a, prop, 1, average="state_expectation")


class TestTimeSeries:

    def testLengthAndStart(self):
        n = 8
        prop, psi0 = _setup(n)
        series = otoc_time_series(OtocConfig(X2D, INITIAL_DENSITY), psi0, prop, 6)
        assert [s.t for s in series] == list(range(7))
        single = otoc_full(OtocConfig(X2D, INITIAL_DENSITY), psi0, prop, 4)
        assert series[4].c == pytest.approx(single.c, abs=1e-12)

    def testHealthCheck(self):
        with pytest.raises(NumericalHealthError):
            check_sample(CorrelatorSample(t=1, c=-1.0, c2=0.0, c4_real=0.5, c4_imag=0.0))
        with pytest.raises(NumericalHealthError):
            check_sample(CorrelatorSample(t=1, c=1.0, c2=0.0, c4_real=0.0, c4_imag=0.0))
        with pytest.raises(NumericalHealthError):
            check_sample(CorrelatorSample(t=1, c=1.0, c2=0.5, c4_real=0.0, c4_imag=0.1,
                                          real_c4=True))
        check_sample(CorrelatorSample(t=1, c=1.0, c2=0.5, c4_real=0.0, c4_imag=0.1))


class TestOtocRe:

    def testBasisOrthonormal(self):
        n = 4
        basis = clock_shift_basis(n)
        gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
        np.testing.assert_allclose(gram, np.eye(n * n), atol=1e-12)

    @pytest.mark.parametrize('n', [4, 8])
    def testPrefactor(self, n):
        assert re_prefactor(n) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize('dynamics', ['EE', 'HE', 'HH'])
    @pytest.mark.parametrize('t', [0, 1, 2, 4, 8])
    def testTheorem(self, dynamics, t):
        n = 8
        prop, psi0 = _setup(n, dynamics)
        rho1 = partial_trace_pure(evolve_state(psi0, prop, t), (n, n), 1)
        for method in ("vector", "dense"):
            total = otoc_re_sum(psi0, prop, t, method=method)
            assert total == pytest.approx(purity(rho1), abs=1e-8)
            assert total == pytest.approx(math.exp(-renyi2(rho1)), abs=1e-8)

    @pytest.mark.parametrize('k', [0.0, 0.25])
    def testUncoupledStaysPure(self, k):
        n = 8
        prop = build_propagator(coupled_spec("HH", n, k=k, kc=0.0))
        psi0 = product_state(coherent_state(n, (0.3, 0.6)), coherent_state(n, (0.2, 0.7)))
        for t in range(11):
            assert otoc_re_sum(psi0, prop, t) == pytest.approx(1.0, abs=1e-9)

    def testSubsystemChoice(self):
        n = 8
        prop, psi0 = _setup(n)
        assert otoc_re_sum(psi0, prop, 3, basis_subsystem=1) == \
            pytest.approx(otoc_re_sum(psi0, prop, 3, basis_subsystem=2), abs=1e-10)


class TestRescale:

    def testLeastSquares(self):
        assert rescale_factor([1, 2, 3], [2, 4, 6]) == pytest.approx(2.0)
        np.testing.assert_allclose(rescale_for_comparison([1, 2, 3], [2, 4, 6]), [2, 4, 6])

    def testClippedAtZero(self):
        assert rescale_factor([1, 2, 3], [-1, -2, -3]) == 0.0

    def testZeroSeries(self):
        with pytest.raises(ZeroSeriesError):
            rescale_factor([0, 0, 0], [1, 2, 3])

    def testShapeMismatch(self):
        with pytest.raises(DimensionMismatchError):
            rescale_factor([1, 2], [1, 2, 3])
