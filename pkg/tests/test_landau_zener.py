import math

import numpy as np
import pytest
from scipy.integrate import quad

from semiref import (
    CouplingSpec,
    CrossingProfile,
    DomainError,
    Method,
    PhysicalConstants,
    PotentialModel,
    adiabatic_reflection,
    default_t_span,
    evolve_tdse,
    instantaneous_eigensystem,
    lz_closed_form,
    mixing_angle,
    reflection_momentum_space,
)
from semiref import landau_zener as lz

UNIT = PhysicalConstants()

# Pinned by adaptive quadrature of the profile continuation (oracle below).
TANH_TAU5_EPS03_LOG = -1.383263693721153


@pytest.fixture(scope="module")
def linear_tdse_runs():
    """Reflection probabilities for T eps^2 in {1, 2, 3} at eps = 1."""
    out = {}
    for T in (1.0, 2.0, 3.0):
        profile = CrossingProfile.linear(T)
        trans, refl = evolve_tdse(profile, CouplingSpec(1.0), UNIT)
        out[T] = (trans, refl)
    return out


class TestProfiles:
    def test_validation(self):
        with pytest.raises(DomainError):
            CrossingProfile.linear(0.0)
        with pytest.raises(DomainError):
            CrossingProfile.tanh(1.0, -1.0)
        with pytest.raises(DomainError):
            CrossingProfile(kind="linear", T=1.0, tau=2.0)
        with pytest.raises(DomainError):
            CouplingSpec(0.0)

    def test_values(self):
        lin = CrossingProfile.linear(2.0)
        assert lin.value(1.0) == 0.5
        tanh = CrossingProfile.tanh(2.0, 3.0)
        assert tanh.value(0.0) == 0.0
        assert tanh.value(1e9) == pytest.approx(3.0)

    def test_im_inverse(self):
        assert CrossingProfile.linear(3.0).im_inverse(0.5) == pytest.approx(1.5)
        tanh = CrossingProfile.tanh(2.0, 1.0)
        assert tanh.im_inverse(1.0) == pytest.approx(2.0 * math.pi / 4)


class TestMixingAngle:
    def test_crossing_point(self):
        for profile in (CrossingProfile.linear(1.0), CrossingProfile.tanh(1.0, 1.0)):
            assert mixing_angle(profile, CouplingSpec(0.7), 0.0) == pytest.approx(
                math.pi / 2
            )

    def test_tanh_asymptotes(self):
        profile = CrossingProfile.tanh(1.0, 1.0)
        eps = CouplingSpec(1.0)
        # Increasing sweep: f -> +e_sat at late times, -e_sat at early times.
        assert mixing_angle(profile, eps, 1e9) == pytest.approx(math.pi / 4)
        assert mixing_angle(profile, eps, -1e9) == pytest.approx(3 * math.pi / 4)

    def test_linear_limits(self):
        profile = CrossingProfile.linear(1.0)
        eps = CouplingSpec(1.0)
        assert mixing_angle(profile, eps, 1e12) == pytest.approx(0.0, abs=1e-11)
        assert mixing_angle(profile, eps, -1e12) == pytest.approx(math.pi, abs=1e-11)

    def test_continuous_and_decreasing(self):
        # Range limited to where tanh has not yet saturated in double
        # precision, so strict monotonicity is meaningful.
        profile = CrossingProfile.tanh(1.0, 2.0)
        eps = CouplingSpec(0.3)
        ts = np.linspace(-8.0, 8.0, 101)
        thetas = [mixing_angle(profile, eps, t) for t in ts]
        assert all(0.0 < th < math.pi for th in thetas)
        assert all(b < a for a, b in zip(thetas, thetas[1:]))


class TestEigensystem:
    def test_crossing_values(self):
        profile = CrossingProfile.linear(1.0)
        e_plus, e_minus, phi_p, _ = instantaneous_eigensystem(
            profile, CouplingSpec(2.0), 0.0
        )
        assert e_plus == pytest.approx(2.0)
        assert e_minus == pytest.approx(-2.0)
        np.testing.assert_allclose(phi_p, [1 / math.sqrt(2)] * 2, rtol=1e-12)

    def test_tanh_saturated_energy(self):
        profile = CrossingProfile.tanh(1.0, 4.0)
        e_plus, _, _, _ = instantaneous_eigensystem(profile, CouplingSpec(3.0), -1e9)
        assert e_plus == pytest.approx(5.0)

    @pytest.mark.parametrize("t", [-7.3, -0.2, 0.0, 1.7, 12.9])
    def test_residual_and_orthogonality(self, t):
        profile = CrossingProfile.tanh(2.0, 3.0)
        eps = CouplingSpec(0.7)
        f = profile.value(t)
        h = np.array([[f, eps.epsilon], [eps.epsilon, -f]])
        e_plus, e_minus, phi_p, phi_m = instantaneous_eigensystem(profile, eps, t)
        assert np.max(np.abs(h @ phi_p - e_plus * phi_p)) <= 1e-12
        assert np.max(np.abs(h @ phi_m - e_minus * phi_m)) <= 1e-12
        assert abs(float(phi_p @ phi_m)) <= 1e-15


class TestAdiabaticReflection:
    @pytest.mark.parametrize("T,eps", [(1.0, 1.0), (2.0, 1.0), (2.0, 0.5), (5.0, 0.25)])
    def test_linear_equals_closed_form(self, T, eps):
        coupling = CouplingSpec(eps)
        adiab = adiabatic_reflection(CrossingProfile.linear(T), coupling, UNIT)
        closed = lz_closed_form(T, coupling, UNIT)
        assert adiab.log_prob == pytest.approx(closed.log_prob, rel=1e-12)
        assert adiab.method is Method.ADIABATIC

    def test_shared_kernel_bit_identity(self):
        # Substituting V -> -f^2, E -> eps^2, 2m -> 1 maps the linear sweep
        # onto an inverse-oscillator barrier; with power-of-two parameters
        # the two code paths must agree bit for bit.
        T, eps = 2.0, 1.0
        adiab = adiabatic_reflection(CrossingProfile.linear(T), CouplingSpec(eps), UNIT)
        ho = PotentialModel.inverse_ho(2.0 / T**2)
        barrier = reflection_momentum_space(
            ho, eps**2, PhysicalConstants(hbar=1.0, mass=0.5)
        )
        assert adiab.log_prob == barrier.log_prob

    def test_epsilon_scaling_is_quadratic(self):
        profile = CrossingProfile.linear(1.5)
        small = adiabatic_reflection(profile, CouplingSpec(0.25), UNIT)
        large = adiabatic_reflection(profile, CouplingSpec(0.5), UNIT)
        assert large.log_prob / small.log_prob == pytest.approx(4.0, rel=1e-9)

    def test_tanh_pinned_by_quadrature_oracle(self):
        profile = CrossingProfile.tanh(5.0, 1.0)
        res = adiabatic_reflection(profile, CouplingSpec(0.3), UNIT)
        oracle, _ = quad(
            lambda p: 5.0 * math.atan(math.sqrt(0.09 - p * p)),
            -0.3,
            0.3,
            epsabs=1e-14,
            epsrel=1e-14,
        )
        assert res.log_prob == pytest.approx(-2.0 * oracle, rel=1e-10)
        assert res.log_prob == pytest.approx(TANH_TAU5_EPS03_LOG, rel=1e-12)

    def test_diabatic_limit(self):
        res = adiabatic_reflection(CrossingProfile.linear(1.0), CouplingSpec(1e-9), UNIT)
        assert res.prob > 1.0 - 1e-10

    def test_tanh_rejects_strong_coupling(self):
        profile = CrossingProfile.tanh(1.0, 1.0)
        with pytest.raises(DomainError):
            adiabatic_reflection(profile, CouplingSpec(1.0), UNIT)

    def test_hbar_scaling(self):
        profile = CrossingProfile.tanh(3.0, 1.0)
        eps = CouplingSpec(0.3)
        logs = [
            adiabatic_reflection(profile, eps, PhysicalConstants(hbar=h)).log_prob * h
            for h in (1.0, 0.5)
        ]
        assert logs[0] == pytest.approx(logs[1], rel=1e-12)


class TestClosedForm:
    def test_trivial_limit(self):
        res = lz_closed_form(1e-300, CouplingSpec(1.0), UNIT)
        assert res.prob == pytest.approx(1.0)

    def test_direct_value(self):
        res = lz_closed_form(2.0, CouplingSpec(1.0), UNIT)
        assert res.prob == pytest.approx(1.8674e-3, rel=1e-4)


class TestTDSE:
    def test_diabatic_limit_follows_crossing_branch(self):
        trans, refl = evolve_tdse(
            CrossingProfile.linear(1.0),
            CouplingSpec(1e-8),
            UNIT,
            t_span=(-0.01, 0.01),
        )
        assert refl >= 1.0 - 1e-6

    def test_linear_matches_closed_form(self, linear_tdse_runs):
        for T, (_, refl) in linear_tdse_runs.items():
            target = -math.pi * T
            assert abs(math.log(refl) - target) / abs(target) <= 0.05

    def test_reflection_decreases_with_sweep_time(self, linear_tdse_runs):
        refls = [linear_tdse_runs[T][1] for T in (1.0, 2.0, 3.0)]
        assert refls[0] > refls[1] > refls[2]

    def test_probabilities_sum_to_one(self, linear_tdse_runs):
        for trans, refl in linear_tdse_runs.values():
            assert abs(trans + refl - 1.0) <= 10.0 * 1e-10

    def test_tanh_matches_adiabatic_exponent(self):
        profile = CrossingProfile.tanh(5.0, 1.0)
        eps = CouplingSpec(0.3)
        trans, refl = evolve_tdse(profile, eps, UNIT)
        adiab = adiabatic_reflection(profile, eps, UNIT)
        assert abs(math.log(refl) - adiab.log_prob) / abs(adiab.log_prob) <= 0.05

    def test_norm_conserved_along_trajectory(self):
        profile = CrossingProfile.linear(2.0)
        eps = CouplingSpec(1.0)
        rel_tol = 1e-10
        span = default_t_span(profile, eps, UNIT)
        sol = lz._integrate(
            profile, eps, UNIT, span, rel_tol, t_eval=np.linspace(*span, 11)
        )
        drift = np.max(np.abs(np.sum(sol.y**2, axis=0) - 1.0))
        assert drift <= 100.0 * rel_tol

    def test_unattainable_tolerance_raises_norm_drift(self):
        from semiref import NormDriftError

        with pytest.warns(UserWarning):
            with pytest.raises(NormDriftError):
                evolve_tdse(
                    CrossingProfile.linear(2.0),
                    CouplingSpec(1.0),
                    UNIT,
                    rel_tol=1e-16,
                )

    def test_two_level_state_norm(self):
        from semiref import TwoLevelState

        state = TwoLevelState(a=0.6 + 0.0j, b=0.0 + 0.8j, t=0.0)
        assert state.norm_sq() == pytest.approx(1.0)

    def test_narrow_span_rejected(self):
        with pytest.raises(DomainError):
            evolve_tdse(
                CrossingProfile.linear(1.0),
                CouplingSpec(1.0),
                UNIT,
                t_span=(-1.0, 1.0),
            )
        with pytest.raises(DomainError):
            evolve_tdse(
                CrossingProfile.tanh(1.0, 1.0),
                CouplingSpec(0.3),
                UNIT,
                t_span=(-2.0, 2.0),
            )

    def test_default_span_covers_preconditions(self):
        profile = CrossingProfile.tanh(3.0, 1.0)
        eps = CouplingSpec(0.3)
        span = default_t_span(profile, eps, UNIT)
        assert span[0] == -span[1]
        assert span[1] >= 60.0
