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
    mode_function,
    quadrature_coefficients,
)


def direct_sum(alpha, k):
    terms = [cmath.exp(1j * m * alpha) for m in range(1, k + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


class TestModeFunction:
    def test_traveling_normal_incidence_is_unity(self):
        mode = ModeSpec(TRAVELING, 0.0)
        for m in (1, 2, 17):
            assert mode_function(mode, m) == 1.0 + 0.0j

    def test_standing_full_period(self):
        mode = ModeSpec(STANDING, math.pi / 2, wavelength_ratio=0.5)
        assert mode_function(mode, 2).real == pytest.approx(1.0, abs=1e-15)
        assert mode_function(mode, 2).imag == 0.0

    def test_traveling_half_wavelength_alternates(self):
        mode = ModeSpec(TRAVELING, math.pi / 2, wavelength_ratio=0.5)
        assert abs(mode_function(mode, 1) - (-1.0)) < 1e-15

    def test_traveling_modulus_one(self):
        mode = ModeSpec(TRAVELING, 0.37, wavelength_ratio=0.7, phase=1.1)
        for m in range(1, 40):
            assert abs(abs(mode_function(mode, m)) - 1.0) < 1e-14

    def test_standing_real_bounded(self):
        mode = ModeSpec(STANDING, -1.234, wavelength_ratio=0.8, phase=0.3)
        for m in range(1, 40):
            u = mode_function(mode, m)
            assert u.imag == 0.0
            assert -1.0 <= u.real <= 1.0

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            ModeSpec("plane", 0.0)
        with pytest.raises(ValueError):
            ModeSpec(TRAVELING, 0.0, wavelength_ratio=0.0)
        with pytest.raises(ValueError):
            ModeSpec(TRAVELING, math.nan)


class TestLatticeSpec:
    def test_window(self):
        assert list(LatticeSpec(10, 3, offset=4).window()) == [4, 5, 6]

    @pytest.mark.parametrize(
        "m,k,offset", [(4, 5, 1), (4, 2, 4), (4, 0, 1), (4, 4, 0), (0, 1, 1)]
    )
    def test_rejects_bad_windows(self, m, k, offset):
        with pytest.raises(ValueError):
            LatticeSpec(m, k, offset)


class TestCoefficients:
    def test_transmission_maximum(self):
        pump = ModeSpec(TRAVELING, 0.4)
        probe = ModeSpec(TRAVELING, 0.4)
        got = coefficients(pump, probe, LatticeSpec(8, 8))
        assert all(z == 1.0 + 0.0j for z in got.a)
        assert got.sum_a == 8.0 + 0.0j
        assert got.sum_abs2 == 8.0

    def test_cavity_geometry_alternates(self):
        # orthogonal pump, probe along the axis, half-wavelength spacing
        pump = ModeSpec(TRAVELING, 0.0)
        probe = ModeSpec(TRAVELING, math.pi / 2)
        got = coefficients(pump, probe, LatticeSpec(4, 4))
        for m, z in zip(range(1, 5), got.a):
            assert abs(z - (-1.0) ** m) < 1e-13
        assert abs(got.sum_a) < 1e-13

    def test_matches_closed_form(self):
        pump = ModeSpec(TRAVELING, 0.0)
        probe = ModeSpec(TRAVELING, 0.3)
        got = coefficients(pump, probe, LatticeSpec(30, 30))
        closed = closed_form_traveling_sum(got.alpha_minus, 30)
        assert abs(abs(got.sum_a) - abs(closed)) < 1e-12

    def test_aggregates_consistent_with_list(self):
        pump = ModeSpec(STANDING, 0.2, wavelength_ratio=0.6, phase=0.4)
        probe = ModeSpec(TRAVELING, -0.9, wavelength_ratio=0.5, phase=0.1)
        got = coefficients(pump, probe, LatticeSpec(12, 7, offset=3))
        a = np.array(got.a)
        assert got.sum_a == pytest.approx(a.sum(), abs=1e-14)
        assert got.sum_abs2 == pytest.approx(float(np.sum(np.abs(a) ** 2)), abs=1e-14)
        assert got.sum_sq == pytest.approx(complex(np.sum(a**2)), abs=1e-14)
        assert got.sum_abs2_a == pytest.approx(complex(np.sum(np.abs(a) ** 2 * a)), abs=1e-14)
        assert got.sum_abs4 == pytest.approx(float(np.sum(np.abs(a) ** 4)), abs=1e-14)

    def test_conjugate_swap_symmetry(self):
        pump = ModeSpec(TRAVELING, 0.31, wavelength_ratio=0.55, phase=0.2)
        probe = ModeSpec(STANDING, -0.7, wavelength_ratio=0.5, phase=0.9)
        lattice = LatticeSpec(9, 6, offset=2)
        forward = coefficients(pump, probe, lattice)
        backward = coefficients(probe, pump, lattice)
        for x, y in zip(forward.a, backward.a):
            assert x == y.conjugate()

    def test_standing_pair_zero_phase_real(self):
        pump = ModeSpec(STANDING, 0.5, wavelength_ratio=0.6)
        probe = ModeSpec(STANDING, -0.8, wavelength_ratio=0.45)
        got = coefficients(pump, probe, LatticeSpec(10, 10))
        assert all(z.imag == 0.0 for z in got.a)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            pump = ModeSpec(TRAVELING, rng.uniform(-3, 3), wavelength_ratio=rng.uniform(0.3, 1.2))
            probe = ModeSpec(
                STANDING if rng.random() < 0.5 else TRAVELING,
                rng.uniform(-3, 3),
                wavelength_ratio=rng.uniform(0.3, 1.2),
            )
            k = int(rng.integers(1, 16))
            got = coefficients(pump, probe, LatticeSpec(16, k))
            assert 0.0 <= got.sum_abs2 <= k + 1e-12
            assert abs(got.sum_a) ** 2 <= k * got.sum_abs2 + 1e-9

    def test_from_values_rejects_empty(self):
        with pytest.raises(ValueError):
            GeometryCoefficients.from_values([])


class TestClosedFormTravelingSum:
    def test_aligned_phases(self):
        assert closed_form_traveling_sum(0.0, 5) == 5.0 + 0.0j

    def test_alternating_cancellation(self):
        assert abs(closed_form_traveling_sum(math.pi, 4)) < 1e-12

    def test_matches_direct_sum_fixed_angle(self):
        assert closed_form_traveling_sum(2 * math.pi / 3, 30) == pytest.approx(
            direct_sum(2 * math.pi / 3, 30), abs=1e-12
        )

    def test_matches_direct_sum_random_angles(self):
        rng = np.random.default_rng(123)
        for k in (1, 2, 3, 8, 33, 64):
            for alpha in rng.uniform(-8, 8, 50):
                assert closed_form_traveling_sum(float(alpha), k) == pytest.approx(
                    direct_sum(float(alpha), k), abs=1e-12
                )

    @pytest.mark.parametrize("lobe", [0, 1, 2, 5])
    @pytest.mark.parametrize("k", [3, 4, 30])
    def test_exact_limit_and_continuity_at_maxima(self, lobe, k):
        center = 2 * math.pi * lobe
        at = closed_form_traveling_sum(center, k)
        assert at == pytest.approx(k, abs=1e-9)
        for eps in (-1e-12, 1e-12):
            near = closed_form_traveling_sum(center + eps, k)
            assert abs(near - at) < 1e-6 * k

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            closed_form_traveling_sum(0.3, 0)


class TestQuadratureCoefficients:
    def test_zero_phase_projection(self):
        coeffs = GeometryCoefficients.from_values([1.0, 2.0, 0.5])
        projected, total = quadrature_coefficients(coeffs, 0.0)
        assert projected == [1.0, 2.0, 0.5]
        assert total == 3.5

    def test_orthogonal_quadrature(self):
        coeffs = GeometryCoefficients.from_values([1.0, 2.0, 0.5])
        projected, total = quadrature_coefficients(coeffs, math.pi / 2)
        assert all(abs(x) < 1e-15 for x in projected)
        assert abs(total) < 1e-15

    def test_phase_matched_projection(self):
        coeffs = GeometryCoefficients.from_values([cmath.exp(1j * math.pi / 4)])
        projected, _ = quadrature_coefficients(coeffs, math.pi / 4)
        assert projected[0] == pytest.approx(1.0, abs=1e-15)
