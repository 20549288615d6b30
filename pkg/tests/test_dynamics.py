"""Particle SDE, moment hierarchy ODE, and their cross-checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betajacobi import (
    ConvergenceError,
    JacobiParams,
    ModelKind,
    MomentPath,
    ParameterError,
    ParticleState,
    drift,
    em_step,
    integrate_moments,
    lambda_hat0,
    moment11,
    moment_drift_finite_n,
    ode_rhs,
    simulate_moments,
    stationary_uk,
    substream,
)

P_REF = JacobiParams(0.3, 0.7, 1.2)


class TestParticleState:
    def test_properties(self):
        s = ParticleState(0.5, np.array([0.2, 0.4, 0.9]))
        assert s.n == 3
        assert s.moment(2) == pytest.approx((0.04 + 0.16 + 0.81) / 3.0)

    def test_validation(self):
        with pytest.raises(ParameterError):
            ParticleState(0.0, np.array([0.4, 0.2]))  # unsorted
        with pytest.raises(ParameterError):
            ParticleState(0.0, np.array([-0.1, 0.5]))  # out of box
        with pytest.raises(ParameterError):
            ParticleState(0.0, np.array([0.1, np.nan]))


class TestMomentPath:
    def test_shape_and_final(self):
        path = MomentPath(np.array([0.0, 1.0]), np.array([[1.0, 0.5], [1.0, 0.4]]))
        assert path.k_max == 1
        assert path.final()[1] == 0.4

    def test_validation(self):
        with pytest.raises(ParameterError):
            MomentPath(np.array([0.0]), np.array([[1.0, 0.5], [1.0, 0.4]]))
        with pytest.raises(ParameterError):
            MomentPath(np.array([0.0]), np.array([[0.7, 0.5]]))


class TestDrift:
    def test_single_particle(self):
        mu, sigma = drift(ParticleState(0.0, np.array([0.5])), 0.0, 0.0, 2.0)
        assert mu[0] == 0.0
        assert sigma[0] == pytest.approx(np.sqrt(0.5))
        mu0, sigma0 = drift(ParticleState(0.0, np.array([0.0])), 0.0, 0.0, 2.0)
        assert mu0[0] == 1.0 and sigma0[0] == 0.0

    def test_two_particle_repulsion(self):
        mu, _ = drift(ParticleState(0.0, np.array([0.25, 0.75])), 0.0, 0.0, 2.0)
        np.testing.assert_allclose(mu, [-0.25, 0.25], rtol=1e-14)

    def test_tied_pair_contributes_nothing(self):
        # coincident particles see each other with zero force; both still
        # feel the third particle
        mu, _ = drift(ParticleState(0.0, np.array([0.3, 0.3, 0.8])), 0.0, 0.0, 2.0)
        assert mu[0] == mu[1]
        assert np.all(np.isfinite(mu))
        solo, _ = drift(ParticleState(0.0, np.array([0.3, 0.8])), 0.0, 0.0, 2.0)
        lone_interaction = 2.0 * 0.3 * 0.7 / (0.3 - 0.8)
        assert mu[0] == pytest.approx(solo[0], rel=1e-14)
        assert mu[0] == pytest.approx(1.0 - 2.0 * 0.3 + lone_interaction, rel=1e-13)

    def test_point_mass_start_is_finite(self):
        mu, _ = drift(ParticleState(0.0, np.full(5, 0.5)), 0.0, 0.0, 2.0)
        np.testing.assert_array_equal(mu, np.zeros(5))


class TestEmStep:
    def test_advances_time_and_sorts(self):
        s = ParticleState(1.0, np.array([0.3, 0.6]))
        out = em_step(s, 0.5, 0.5, 2.0, 1e-3, substream(4, 0))
        assert out.time == pytest.approx(1.001)
        assert np.all(np.diff(out.positions) >= 0.0)

    def test_bad_dt_raises(self):
        s = ParticleState(0.0, np.array([0.5]))
        with pytest.raises(ParameterError):
            em_step(s, 0.0, 0.0, 2.0, 0.0, substream(4, 0))

    @given(
        seed=st.integers(0, 10_000),
        n=st.integers(1, 8),
        beta=st.floats(0.0, 4.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_stays_in_box(self, seed, n, beta):
        rng = substream(seed, 0)
        start = ParticleState(0.0, np.sort(rng.uniform(size=n)))
        s = start
        for _ in range(5):
            s = em_step(s, 0.5, 0.5, beta, 1e-3, rng)
        assert np.all((s.positions >= 0.0) & (s.positions <= 1.0))
        assert np.all(np.diff(s.positions) >= 0.0)


class TestSimulateMoments:
    def test_initial_record_is_exact(self):
        path, se = simulate_moments(4, 0.0, 0.0, 2.0, 0.5, 0.01, 1e-3, 50, 3, seed=2)
        np.testing.assert_array_equal(path.moments[0], 0.5 ** np.arange(4.0))
        np.testing.assert_array_equal(se[0], np.zeros(4))
        assert path.times[0] == 0.0
        assert path.times[-1] == pytest.approx(0.01)

    def test_short_time_variance(self):
        # from a point mass the variance grows like sigma^2(x0) t
        paths = 4000
        _, se = simulate_moments(1, 0.0, 0.0, 2.0, 0.5, 0.01, 1e-4, paths, 2, seed=9)
        var = (se[-1, 1] * np.sqrt(paths)) ** 2
        assert var == pytest.approx(2.0 * 0.25 * 0.01, rel=0.15)

    def test_reproducible(self):
        p1, s1 = simulate_moments(3, 0.2, 0.4, 2.0, 0.5, 0.02, 1e-3, 40, 2, seed=5)
        p2, s2 = simulate_moments(3, 0.2, 0.4, 2.0, 0.5, 0.02, 1e-3, 40, 2, seed=5)
        np.testing.assert_array_equal(p1.moments, p2.moments)
        np.testing.assert_array_equal(s1, s2)

    def test_array_start(self):
        x0 = np.array([0.2, 0.5, 0.8])
        path, _ = simulate_moments(3, 0.0, 0.0, 1.0, x0, 0.01, 1e-3, 20, 2, seed=3)
        assert path.moments[0, 1] == pytest.approx(0.5)

    def test_guards(self):
        with pytest.raises(ParameterError):
            simulate_moments(2, 0.0, 0.0, 2.0, 0.5, 0.01, 1e-3, 1, 2, seed=1)
        with pytest.raises(ParameterError):
            simulate_moments(2, 0.0, 0.0, 2.0, 1.5, 0.01, 1e-3, 10, 2, seed=1)
        with pytest.raises(ParameterError):
            simulate_moments(2, 0.0, 0.0, 2.0, np.array([0.5]), 0.01, 1e-3, 10, 2, seed=1)

    def test_generator_one_step_drift(self):
        # path-mean finite difference of m_k over one EM step against the
        # hierarchy drift with its finite-N correction
        n, c, a, b = 6, 1.2, 0.3, 0.7
        beta = 2.0 * c / n
        x0 = np.linspace(0.2, 0.8, n)
        dt = 2e-3
        paths = 100_000
        path, se = simulate_moments(
            n, a, b, beta, x0, dt, dt, paths, 3, seed=77, record_every=1
        )
        m0 = path.moments[0]
        for k in (1, 2, 3):
            est = (path.moments[-1, k] - m0[k]) / dt
            pred = moment_drift_finite_n(m0, k, a, b, c, n)
            band = 4.0 * se[-1, k] / dt + 0.02  # noise plus Euler bias
            assert abs(est - pred) <= band


class TestOdeRhs:
    def test_first_component_formula(self):
        # m_1' = -(2c+a+b+2) m_1 + (a+1) + c
        p = JacobiParams(0.3, 0.7, 1.2)
        rhs = ode_rhs(np.array([1.0, 0.4]), p)
        want = -(2 * 1.2 + 0.3 + 0.7 + 2.0) * 0.4 + 1.3 + 1.2
        assert rhs[0] == 0.0
        assert rhs[1] == pytest.approx(want, rel=1e-14)

    def test_symmetric_midpoint_is_stationary(self):
        rhs = ode_rhs(np.array([1.0, 0.5]), JacobiParams(0.0, 0.0, 1.0))
        assert rhs[1] == 0.0

    def test_vanishes_at_stationary_vector(self, params):
        u = stationary_uk(params, 8)
        rhs = ode_rhs(u.values, params)
        assert np.max(np.abs(rhs)) < 1e-12

    def test_order_zero_vector(self):
        np.testing.assert_array_equal(ode_rhs(np.array([1.0]), P_REF), [0.0])


class TestStationaryMoments:
    def test_head_is_spectral_entry(self, params):
        u = stationary_uk(params, 3)
        assert u[0] == 1.0
        assert u[1] == pytest.approx(lambda_hat0(params), abs=1e-12)

    def test_uniform_case(self):
        u = stationary_uk(JacobiParams(0.0, 0.0, 0.0), 10)
        for k in range(11):
            assert u[k] == pytest.approx(1.0 / (k + 1.0), rel=1e-14)

    def test_matches_operator_moments(self, params):
        u = stationary_uk(params, 12)
        for k in range(13):
            want = moment11(ModelKind.ASSOC_III, params, k)
            assert u[k] == pytest.approx(want, abs=1e-10)

    def test_negative_kmax_raises(self):
        with pytest.raises(ParameterError):
            stationary_uk(P_REF, -1)


class TestIntegrateMoments:
    def test_fixed_point_stays_put(self):
        u = stationary_uk(P_REF, 6)
        path = integrate_moments(u.values, P_REF, 1.0, 1e-3)
        assert np.max(np.abs(path.moments - u.values)) < 1e-10

    def test_relaxes_to_fixed_point(self):
        start = 0.5 ** np.arange(7.0)
        path = integrate_moments(start, P_REF, 30.0, 1e-3)
        u = stationary_uk(P_REF, 6)
        assert np.max(np.abs(path.final().values - u.values)) < 1e-10

    def test_step_halving_consistency(self):
        start = 0.5 ** np.arange(7.0)
        a = integrate_moments(start, P_REF, 2.0, 1e-2).final().values
        b = integrate_moments(start, P_REF, 2.0, 5e-3).final().values
        assert np.max(np.abs(a - b)) < 1e-10

    def test_c0_first_moment_closed_form(self):
        # at c = 0 the m_1 equation closes: exponential relaxation to
        # (a+1)/(a+b+2) at rate a+b+2
        p = JacobiParams(0.4, 0.9, 0.0)
        lam = p.a + p.b + 2.0
        mstar = (p.a + 1.0) / lam
        path = integrate_moments(np.array([1.0, 0.2]), p, 2.0, 1e-3)
        exact = mstar + (0.2 - mstar) * np.exp(-lam * path.times)
        assert np.max(np.abs(path.moments[:, 1] - exact)) < 1e-10

    def test_moment_shape_preserved(self):
        start = 0.5 ** np.arange(7.0)
        path = integrate_moments(start, P_REF, 5.0, 1e-3)
        final = path.final().values
        assert np.all((final >= 0.0) & (final <= 1.0))
        assert np.all(np.diff(final) <= 1e-12)

    def test_blow_up_raises(self):
        with pytest.raises(ConvergenceError):
            integrate_moments(
                np.array([1.0, 0.5, 0.3]), JacobiParams(0.0, 0.0, -5.0), 5.0, 1e-3
            )

    def test_guards(self):
        with pytest.raises(ParameterError):
            integrate_moments(np.array([0.5, 0.5]), P_REF, 1.0, 1e-3)
        with pytest.raises(ParameterError):
            integrate_moments(np.array([1.0, 0.5]), P_REF, -1.0, 1e-3)


class TestFiniteNCorrection:
    def test_correction_fades_with_n(self):
        m = 0.5 ** np.arange(4.0)
        inf_n = ode_rhs(m, P_REF)[2]
        d_small = moment_drift_finite_n(m, 2, 0.3, 0.7, 1.2, 10)
        d_large = moment_drift_finite_n(m, 2, 0.3, 0.7, 1.2, 10_000)
        assert abs(d_large - inf_n) < abs(d_small - inf_n)
        assert d_large == pytest.approx(inf_n, abs=1e-3)

    def test_k_range_guard(self):
        with pytest.raises(ParameterError):
            moment_drift_finite_n(np.array([1.0, 0.5]), 2, 0.3, 0.7, 1.2, 10)
