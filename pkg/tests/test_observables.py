import cmath
import math

import numpy as np
import pytest

from latticeglow.geometry import (
    GeometryCoefficients,
    LatticeSpec,
    ModeSpec,
    STANDING,
    TRAVELING,
    closed_form_traveling_sum,
    coefficients,
)
from latticeglow.observables import (
    ScanError,
    ScatterModel,
    angular_scan,
    cavity_example,
    dispersion_shift_stats,
    expected_amplitude,
    fourth_moment,
    fourth_moment_traveling,
    incoherent_intensity,
    intensity,
    light_quadrature_variance,
    noise_r,
    photon_number_variance,
    quadrature_stats,
)
from latticeglow.oracle import enumerate_state, oracle_d_moments
from latticeglow.states import (
    AtomState,
    MomentsUnavailableError,
    moment_set,
)

MOTT30 = moment_set(AtomState.mott_insulator(30, 30))
SF30 = moment_set(AtomState.superfluid(30, 30))
COH30 = moment_set(AtomState.coherent_product(30, 30))

CAVITY4 = GeometryCoefficients.from_values([1.0, -1.0, 1.0, -1.0])


def tt_coeffs(theta0, theta1, m=30, k=30):
    return coefficients(
        ModeSpec(TRAVELING, theta0), ModeSpec(TRAVELING, theta1), LatticeSpec(m, k)
    )


class TestAmplitudeIntensity:
    def test_cavity_amplitude_vanishes_for_all_states(self):
        for ms in (moment_set(AtomState.superfluid(4, 4)), moment_set(AtomState.mott_insulator(4, 4))):
            assert expected_amplitude(CAVITY4, ms) == 0.0

    def test_maximum_amplitude(self):
        assert expected_amplitude(tt_coeffs(0.0, 0.0), MOTT30) == 30.0 + 0.0j

    def test_amplitude_matches_diffraction_sum(self):
        cf = tt_coeffs(0.0, 0.3)
        closed = closed_form_traveling_sum(cf.alpha_minus, 30)
        assert expected_amplitude(cf, SF30) == pytest.approx(closed, abs=1e-11)

    def test_cavity_intensity_mott_zero_sf_window_number(self):
        assert intensity(CAVITY4, moment_set(AtomState.mott_insulator(4, 4))) == 0.0
        assert intensity(CAVITY4, moment_set(AtomState.superfluid(4, 4))) == pytest.approx(
            4.0, abs=1e-12
        )

    def test_single_site_reduces_to_second_moment(self):
        cf = GeometryCoefficients.from_values([1.0])
        ms = moment_set(AtomState.superfluid(4, 4))
        assert intensity(cf, ms) == ms.m2


class TestNoise:
    def test_mott_noise_identically_zero(self):
        rng = np.random.default_rng(3)
        for theta in rng.uniform(-math.pi, math.pi, 40):
            assert noise_r(tt_coeffs(0.0, float(theta)), MOTT30) == 0.0

    def test_coherent_noise_isotropic(self):
        rng = np.random.default_rng(4)
        for theta in rng.uniform(-math.pi, math.pi, 40):
            assert noise_r(tt_coeffs(0.0, float(theta)), COH30) == pytest.approx(
                30.0, abs=1e-9
            )

    def test_superfluid_suppression_at_maximum(self):
        assert noise_r(tt_coeffs(0.0, 0.0), SF30) == pytest.approx(0.0, abs=1e-12)

    def test_matches_traveling_wave_reduction(self):
        # R = cov * (sin(K a/2)/sin(a/2))^2 + (var - cov) K
        ms = SF30
        for theta in (0.17, 0.5, 1.2, 2.8):
            cf = tt_coeffs(0.0, theta)
            ratio_sq = abs(closed_form_traveling_sum(cf.alpha_minus, 30)) ** 2
            expected = ms.cov_site * ratio_sq + (ms.var_site - ms.cov_site) * 30
            assert noise_r(cf, ms) == pytest.approx(expected, rel=1e-10)

    def test_identity_with_intensity(self):
        rng = np.random.default_rng(5)
        for ms in (MOTT30, SF30, COH30):
            for theta in rng.uniform(-math.pi, math.pi, 20):
                cf = coefficients(
                    ModeSpec(TRAVELING, 0.2),
                    ModeSpec(STANDING, float(theta)),
                    LatticeSpec(30, 30),
                )
                amp = expected_amplitude(cf, ms)
                lhs = noise_r(cf, ms)
                rhs = intensity(cf, ms) - abs(amp) ** 2
                assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


class TestIncoherent:
    def test_mott_level(self):
        state = AtomState.mott_insulator(30, 30)
        assert incoherent_intensity(state, 30, TRAVELING, TRAVELING) == 30.0

    def test_coherent_level(self):
        state = AtomState.coherent_product(30, 30)
        assert incoherent_intensity(state, 30, TRAVELING, TRAVELING) == 60.0

    def test_standing_pair_quarter(self):
        state = AtomState.superfluid(12, 12)
        full = incoherent_intensity(state, 12, TRAVELING, TRAVELING)
        assert incoherent_intensity(state, 12, STANDING, STANDING) == 0.25 * full
        assert incoherent_intensity(state, 12, STANDING, TRAVELING) == 0.5 * full


class TestQuadratures:
    def test_mott_variance_zero(self):
        for beta in (0.0, 0.3, math.pi / 2):
            cf = tt_coeffs(0.0, 0.9)
            assert quadrature_stats(cf, beta, MOTT30)[1] == 0.0

    def test_orthogonal_projection_kills_real_coeffs(self):
        cf = GeometryCoefficients.from_values([1.0, 1.0, 1.0])
        mean, var = quadrature_stats(cf, math.pi / 2, SF30)
        assert abs(mean) < 1e-12
        assert abs(var) < 1e-12

    def test_structural_reuse_at_zero_phase(self):
        cf = GeometryCoefficients.from_values([0.7, -0.2, 1.0, 0.4])
        ms = moment_set(AtomState.superfluid(8, 8))
        mean, var = quadrature_stats(cf, 0.0, ms)
        assert mean == pytest.approx(expected_amplitude(cf, ms).real, rel=1e-14)
        assert var == pytest.approx(noise_r(cf, ms), rel=1e-12, abs=1e-14)

    def test_light_quadrature_floor(self):
        assert light_quadrature_variance(None, 0.0) == 0.25
        model = ScatterModel(g0=1.0, kappa=1.0)
        assert light_quadrature_variance(model, 7.5) == 0.25 + model.coupling_abs2 * 7.5
        zero = ScatterModel(g0=0.0, kappa=2.0)
        assert light_quadrature_variance(zero, 123.0) == 0.25
        with pytest.raises(ValueError):
            light_quadrature_variance(None, -1.0)


class TestFourthMoment:
    def test_coherent_maximum_value(self):
        coh4 = moment_set(AtomState.coherent_product(4, 4))
        cf = GeometryCoefficients.from_values([1.0] * 4)
        assert fourth_moment(cf, coh4) == pytest.approx(756.0, rel=1e-12)

    def test_mott_variance_zero_any_geometry(self):
        rng = np.random.default_rng(6)
        for theta in rng.uniform(-math.pi, math.pi, 25):
            cf = coefficients(
                ModeSpec(TRAVELING, 0.1),
                ModeSpec(STANDING, float(theta)),
                LatticeSpec(30, 30),
            )
            fourth = fourth_moment(cf, MOTT30)
            ivalue = intensity(cf, MOTT30)
            assert fourth - ivalue * ivalue == pytest.approx(0.0, abs=1e-9 * max(1.0, fourth))

    def test_superfluid_cavity_matches_oracle_exactly(self):
        sf4 = AtomState.superfluid(4, 4)
        closed = fourth_moment(CAVITY4, moment_set(sf4))
        oracle = oracle_d_moments(enumerate_state(sf4), CAVITY4).fourth
        assert closed == pytest.approx(oracle, abs=1e-12)
        assert closed == 40.0

    def test_requires_four_sites(self):
        ms = moment_set(AtomState.superfluid(3, 3))
        with pytest.raises(MomentsUnavailableError):
            fourth_moment(GeometryCoefficients.from_values([1.0, 1.0, 1.0]), ms)

    def test_traveling_reduction_agrees(self):
        for ms in (MOTT30, SF30, COH30):
            for theta in np.linspace(-math.pi, math.pi, 64, endpoint=False):
                cf = tt_coeffs(0.0, float(theta))
                general = fourth_moment(cf, ms)
                reduced = fourth_moment_traveling(cf.alpha_minus, 30, ms)
                assert general == pytest.approx(reduced, rel=1e-10, abs=1e-12)


class TestPhotonVariance:
    def test_mott_cavity_dark(self):
        ms = moment_set(AtomState.mott_insulator(4, 4))
        fourth = fourth_moment(CAVITY4, ms)
        ivalue = intensity(CAVITY4, ms)
        model = ScatterModel(g0=2.0, a0=1.5, delta_0a=3.0, kappa=0.5, delta_01=0.2)
        assert photon_number_variance(model, fourth, ivalue) == 0.0

    def test_decoupled_field(self):
        assert photon_number_variance(ScatterModel(g0=0.0, kappa=1.0), 10.0, 3.0) == 0.0

    def test_linear_map(self):
        got = photon_number_variance(None, 40.0, 4.0)
        assert got == 40.0 - 16.0 + 4.0

    def test_coupling_modulus(self):
        model = ScatterModel(g0=2.0, a0=1 + 2j, delta_0a=3.0, kappa=0.7, delta_01=-1.1)
        expected = 2.0**4 * abs(1 + 2j) ** 2 / (3.0**2 * (0.7**2 + 1.1**2))
        assert model.coupling_abs2 == pytest.approx(expected, rel=1e-14)
        with pytest.raises(ValueError):
            ScatterModel(g0=1.0, kappa=0.0)
        with pytest.raises(ValueError):
            ScatterModel(g0=1.0, kappa=1.0, delta_0a=0.0)


class TestCavityExample:
    def test_mott_values(self):
        for size in (4, 30):
            got = cavity_example(AtomState.mott_insulator(size, size), size)
            assert got.amp == 0.0
            assert got.intensity == 0.0
            assert got.fourth_var == 0.0
            assert got.selforg_intensity == float(size * size)

    def test_superfluid_values(self):
        got = cavity_example(AtomState.superfluid(4, 4), 4)
        assert got.amp == 0.0
        assert got.intensity == pytest.approx(4.0, abs=1e-12)
        assert got.fourth_var == pytest.approx(24.0, abs=1e-12)
        # leading order 2 N_K^2 with a relative 1/N_K finite-size correction
        assert abs(got.fourth_var - 32.0) / 32.0 <= 0.25 + 1e-12

    def test_small_superfluid_uses_oracle(self):
        got = cavity_example(AtomState.superfluid(2, 2), 2)
        oracle = oracle_d_moments(
            enumerate_state(AtomState.superfluid(2, 2)),
            GeometryCoefficients.from_values([1.0, -1.0]),
        )
        assert got.intensity == pytest.approx(oracle.intensity, abs=1e-14)
        assert got.fourth_var == pytest.approx(
            oracle.fourth - oracle.intensity**2, abs=1e-12
        )

    def test_rejects_odd_window(self):
        with pytest.raises(ValueError, match="even"):
            cavity_example(AtomState.superfluid(4, 4), 3)
        with pytest.raises(ValueError):
            cavity_example(AtomState.superfluid(4, 4), 6)


class TestDispersionShift:
    def test_mott_traveling_probe_fixed(self):
        lattice = LatticeSpec(30, 30)
        probe = ModeSpec(TRAVELING, 0.4)
        mean, var = dispersion_shift_stats(AtomState.mott_insulator(30, 30), probe, lattice, 30)
        assert (mean, var) == (30.0, 0.0)

    def test_coherent_traveling_probe_poissonian(self):
        lattice = LatticeSpec(30, 30)
        probe = ModeSpec(TRAVELING, 0.4)
        mean, var = dispersion_shift_stats(AtomState.coherent_product(30, 30), probe, lattice, 15)
        assert mean == var == 15.0

    def test_superfluid_standing_probe_matches_oracle(self):
        state = AtomState.superfluid(4, 4)
        lattice = LatticeSpec(4, 4)
        probe = ModeSpec(STANDING, 0.7, wavelength_ratio=0.5, phase=0.2)
        mean, var = dispersion_shift_stats(state, probe, lattice, 4)
        from latticeglow.geometry import mode_function

        weights = [abs(mode_function(probe, m)) ** 2 for m in range(1, 5)]
        dist = enumerate_state(state)
        totals = dist.occupations.astype(float) @ np.array(weights)
        p = dist.probabilities
        o_mean = float(p @ totals)
        o_var = float(p @ (totals * totals)) - o_mean * o_mean
        assert mean == pytest.approx(o_mean, rel=1e-13)
        assert var == pytest.approx(o_var, rel=1e-11, abs=1e-13)


class TestAngularScan:
    def test_mott_noise_column_zero(self):
        rows = angular_scan(
            ModeSpec(TRAVELING, 0.0),
            ModeSpec(TRAVELING, 0.0),
            LatticeSpec(30, 30),
            AtomState.mott_insulator(30, 30),
            grid=np.linspace(-math.pi, math.pi, 101),
        )
        assert all(r.noise_r == 0.0 for r in rows)

    def test_coherent_noise_column_constant(self):
        rows = angular_scan(
            ModeSpec(TRAVELING, 0.0),
            ModeSpec(TRAVELING, 0.0),
            LatticeSpec(30, 30),
            AtomState.coherent_product(30, 30),
            grid=np.linspace(-math.pi, math.pi, 101),
        )
        assert all(abs(r.noise_r - 30.0) < 1e-9 for r in rows)

    def test_singleton_grid_matches_direct_calls(self):
        theta = 0.77
        rows = angular_scan(
            ModeSpec(TRAVELING, 0.1),
            ModeSpec(STANDING, 0.0),
            LatticeSpec(8, 8),
            AtomState.superfluid(8, 8),
            beta=0.3,
            grid=[theta],
        )
        assert len(rows) == 1
        cf = coefficients(ModeSpec(TRAVELING, 0.1), ModeSpec(STANDING, theta), LatticeSpec(8, 8))
        ms = moment_set(AtomState.superfluid(8, 8))
        assert rows[0].intensity == intensity(cf, ms)
        assert rows[0].noise_r == noise_r(cf, ms)
        assert rows[0].fourth == fourth_moment(cf, ms)
        assert rows[0].quad_var == quadrature_stats(cf, 0.3, ms)[1]

    def test_threaded_scan_matches_serial(self):
        grid = list(np.linspace(-math.pi, math.pi, 57))
        args = (
            ModeSpec(TRAVELING, 0.1),
            ModeSpec(STANDING, 0.0),
            LatticeSpec(10, 9, offset=2),
            AtomState.superfluid(10, 10),
        )
        serial = angular_scan(*args, grid=grid, threads=1)
        threaded = angular_scan(*args, grid=grid, threads=4)
        assert serial == threaded

    def test_small_lattice_falls_back_to_oracle(self):
        rows = angular_scan(
            ModeSpec(TRAVELING, 0.0),
            ModeSpec(TRAVELING, 0.0),
            LatticeSpec(3, 3),
            AtomState.superfluid(3, 3),
            grid=[0.0, 0.4, 1.1],
        )
        dist = enumerate_state(AtomState.superfluid(3, 3))
        for row in rows:
            cf = tt_coeffs(0.0, row.theta1, m=3, k=3)
            assert row.fourth == pytest.approx(
                oracle_d_moments(dist, cf).fourth, rel=1e-12
            )

    def test_positivity_across_scans(self):
        rows = angular_scan(
            ModeSpec(TRAVELING, 0.1),
            ModeSpec(STANDING, 0.0),
            LatticeSpec(30, 30),
            AtomState.superfluid(30, 30),
            beta=0.6,
            grid=np.linspace(-math.pi, math.pi, 201),
        )
        for row in rows:
            assert row.intensity >= 0.0
            assert row.noise_r >= 0.0
            assert row.quad_var >= 0.0
            assert row.fourth >= 0.0

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            angular_scan(
                ModeSpec(TRAVELING, 0.0),
                ModeSpec(TRAVELING, 0.0),
                LatticeSpec(4, 4),
                AtomState.superfluid(4, 4),
                grid=[],
            )

    def test_error_tagged_with_angle(self):
        # wavelength_ratio poisoned after construction to force a failure
        probe = ModeSpec(TRAVELING, 0.0)
        object.__setattr__(probe, "wavelength_ratio", float("nan"))
        with pytest.raises(ScanError, match="theta1"):
            angular_scan(
                ModeSpec(TRAVELING, 0.0),
                probe,
                LatticeSpec(4, 4),
                AtomState.superfluid(4, 4),
                grid=[0.25],
            )
