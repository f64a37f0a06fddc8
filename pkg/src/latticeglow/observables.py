"""Measurable quantities of the scattered light.

Every observable is an expectation of the geometry-weighted occupation sum
D = sum_i A_i n_i: the coherent amplitude <D>, the intensity <D* D>, the
noise quantity R = <D* D> - |<D>|^2, homodyne quadrature statistics, the
fourth-order moment <D*^2 D^2> that fixes photon-number fluctuations, and
the angle-independent intensity under an incoherent pump.  The closed
forms take a GeometryCoefficients and a MomentSet; states whose moment set
lacks the four-site entries fall back to the enumeration oracle.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .geometry import (
    GeometryCoefficients,
    LatticeSpec,
    ModeSpec,
    TRAVELING,
    closed_form_traveling_sum,
    coefficients,
    mode_function,
    quadrature_coefficients,
)
from .oracle import enumerate_state, oracle_d_moments
from .states import (
    AtomState,
    MomentSet,
    MomentsUnavailableError,
    moment_set,
    n_k_statistics,
    raw_moment,
    window_statistics,
)

THREADS_ENV_VAR = "LATTICEGLOW_THREADS"

# Cancellation in a difference of closed forms can leave a tiny negative
# residue where the exact value is zero; anything this close to zero from
# below is reported as zero (the raw value is kept where it matters).
_NEGATIVE_RESIDUE_FLOOR = 1e-9


def clamp_small_negative(x: float) -> float:
    if -_NEGATIVE_RESIDUE_FLOOR < x < 0.0:
        return 0.0
    return x


def _abs2(z: complex) -> float:
    return z.real * z.real + z.imag * z.imag


@dataclass(frozen=True)
class ScatterModel:
    """Pump/probe coupling that converts D-moments into photon units.

    The stationary probe amplitude is coupling * D with
    coupling = -i g0^2 a0 / (delta_0a (kappa - i delta_01)).
    """

    g0: float
    a0: complex = 1.0 + 0.0j
    delta_0a: float = 1.0
    kappa: float = 1.0
    delta_01: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.delta_0a == 0:
            raise ValueError("delta_0a must be nonzero")

    @property
    def coupling(self) -> complex:
        return -1j * self.g0**2 * complex(self.a0) / (
            self.delta_0a * (self.kappa - 1j * self.delta_01)
        )

    @property
    def coupling_abs2(self) -> float:
        return _abs2(self.coupling)


def _coupling_abs2(model: ScatterModel | None) -> float:
    # Scans report bare D-moments unless a coupling model is supplied.
    return 1.0 if model is None else model.coupling_abs2


def expected_amplitude(coeffs: GeometryCoefficients, moments: MomentSet) -> complex:
    """<D> = n * sum_a; the classical diffraction amplitude."""
    return moments.m1 * coeffs.sum_a


def intensity(coeffs: GeometryCoefficients, moments: MomentSet) -> float:
    """<D* D> from the density-density correlations.

    Equal to m11 |sum_a|^2 + (m2 - m11) sum|A_i|^2 under site-independent
    correlations; the single-site case needs no pair moment.
    """
    if moments.m11 is None:
        return clamp_small_negative(moments.m2 * coeffs.sum_abs2)
    value = moments.m11 * _abs2(coeffs.sum_a) + moments.m2_minus_m11 * coeffs.sum_abs2
    return clamp_small_negative(value)


def noise_r(coeffs: GeometryCoefficients, moments: MomentSet) -> float:
    """Noise quantity R = <D* D> - |<D>|^2.

    Written in fluctuation form: cov |sum_a|^2 + (var - cov) sum|A_i|^2,
    so states without pair correlations get a strictly isotropic-looking
    second term and the Mott insulator gives exactly zero.
    """
    value = moments.cov_site * _abs2(coeffs.sum_a) + (
        moments.var_site - moments.cov_site
    ) * coeffs.sum_abs2
    return clamp_small_negative(value)


def incoherent_intensity(
    state: AtomState, K: int, pump_kind: str, probe_kind: str
) -> float:
    """Angle-independent intensity when the mode phases are randomized.

    Only same-site terms survive the phase average, leaving p0 K <n^2>
    with p0 = 1 for two traveling waves, 1/2 with one standing wave and
    1/4 with two.
    """
    p0 = 1.0
    if pump_kind != TRAVELING:
        p0 *= 0.5
    if probe_kind != TRAVELING:
        p0 *= 0.5
    return p0 * K * raw_moment(state, [2])


def quadrature_stats(
    coeffs: GeometryCoefficients, beta: float, moments: MomentSet
) -> tuple[float, float]:
    """Mean and variance of the D quadrature at homodyne phase beta.

    Structurally the amplitude/noise formulas with A_i replaced by the
    projections Re(A_i e^{-i beta}).
    """
    projected, total = quadrature_coefficients(coeffs, beta)
    sum_sq = math.fsum(x * x for x in projected)
    mean = moments.m1 * total
    var = moments.cov_site * total * total + (
        moments.var_site - moments.cov_site
    ) * sum_sq
    return mean, clamp_small_negative(var)


def light_quadrature_variance(model: ScatterModel | None, dvar: float) -> float:
    """Field quadrature variance: shot-noise 1/4 plus |coupling|^2 * dvar."""
    if dvar < 0:
        raise ValueError(f"dvar must be >= 0, got {dvar}")
    return 0.25 + _coupling_abs2(model) * dvar


def fourth_moment(coeffs: GeometryCoefficients, moments: MomentSet) -> float:
    """<D*^2 D^2> from the seven-prefactor closed form.

    Each geometric prefactor multiplies a fixed combination of the raw
    moments m1111, m211, m22, m31, m4; the combination attached to a
    prefactor is exactly the inclusion-exclusion weight of the matching
    site-coincidence pattern.  Raises MomentsUnavailableError when the
    state has fewer than four sites.
    """
    moments.require_fourth_order()
    m1111, m211, m22 = moments.m1111, moments.m211, moments.m22
    m31, m4 = moments.m31, moments.m4
    s1, s2 = coeffs.sum_a, coeffs.sum_sq
    t, u, v = coeffs.sum_abs2, coeffs.sum_abs2_a, coeffs.sum_abs4
    abs_s1_sq = _abs2(s1)
    value = (
        abs_s1_sq * abs_s1_sq * m1111
        + 2.0 * (2.0 * (u * s1.conjugate()).real) * (2 * m1111 - 3 * m211 + m31)
        + 2.0 * (s2 * s1.conjugate() ** 2).real * (m211 - m1111)
        + 2.0 * t * t * (m1111 - 2 * m211 + m22)
        + _abs2(s2) * (m1111 - 2 * m211 + m22)
        + 4.0 * abs_s1_sq * t * (m211 - m1111)
        + v * (-6 * m1111 + 12 * m211 - 4 * m31 - 3 * m22 + m4)
    )
    return clamp_small_negative(value)


def fourth_moment_traveling(alpha_minus: float, K: int, moments: MomentSet) -> float:
    """<D*^2 D^2> for two traveling waves via closed diffraction sums.

    The per-site coefficients are unit phasors, so the aggregate sums
    collapse to the diffraction sums at phase steps alpha and 2*alpha; the
    isotropic terms carry plain powers of K.
    """
    moments.require_fourth_order()
    m1111, m211, m22 = moments.m1111, moments.m211, moments.m22
    m31, m4 = moments.m31, moments.m4
    s1 = closed_form_traveling_sum(alpha_minus, K)
    s2 = closed_form_traveling_sum(2.0 * alpha_minus, K)
    q1 = _abs2(s1)
    value = (
        q1 * q1 * m1111
        + 2.0 * (s2 * s1.conjugate() ** 2).real * (m211 - m1111)
        - 4.0 * q1 * ((K - 2) * m1111 - (K - 3) * m211 - m31)
        + _abs2(s2) * (m1111 - 2 * m211 + m22)
        + 2.0 * K * K * (m1111 - 2 * m211 + m22)
        + K * (-6 * m1111 + 12 * m211 - 4 * m31 - 3 * m22 + m4)
    )
    return clamp_small_negative(value)


def photon_number_variance(
    model: ScatterModel | None, fourth: float, intensity_value: float
) -> float:
    """Photon-number variance |C|^4 (<D*^2 D^2> - <D* D>^2) + |C|^2 <D* D>."""
    if fourth < 0 or intensity_value < 0:
        raise ValueError("fourth and intensity must be >= 0")
    c2 = _coupling_abs2(model)
    return clamp_small_negative(
        c2 * c2 * (fourth - intensity_value * intensity_value) + c2 * intensity_value
    )


@dataclass(frozen=True)
class CavityExample:
    """Transversally pumped cavity values for one state."""

    amp: complex
    intensity: float
    fourth_var: float
    selforg_intensity: float


def cavity_example(state: AtomState, K: int) -> CavityExample:
    """Scattering into a cavity along the lattice axis, pump orthogonal.

    Neighboring sites radiate with opposite signs, so the coefficients
    alternate +1/-1 over the window (K even: the amplitude cancels for any
    state).  selforg_intensity is the value after self-organization onto
    every second site, where the alternation disappears and the window
    population radiates in phase: N_K^2 for the period-doubled Mott state.
    """
    if K % 2 != 0:
        raise ValueError(
            f"cavity example assumes an even number of illuminated sites, got K={K}"
        )
    if K > state.n_sites:
        raise ValueError(f"K={K} exceeds the number of sites {state.n_sites}")
    coeffs = GeometryCoefficients.from_values(
        [1.0 if m % 2 == 1 else -1.0 for m in range(1, K + 1)]
    )
    moments = moment_set(state)
    amp = expected_amplitude(coeffs, moments)
    intensity_value = intensity(coeffs, moments)
    try:
        fourth = fourth_moment(coeffs, moments)
    except MomentsUnavailableError:
        fourth = oracle_d_moments(enumerate_state(state), coeffs).fourth
    n_k = state.n_atoms * K / state.n_sites
    return CavityExample(
        amp=amp,
        intensity=intensity_value,
        fourth_var=clamp_small_negative(fourth - intensity_value * intensity_value),
        selforg_intensity=n_k * n_k,
    )


def dispersion_shift_stats(
    state: AtomState, probe: ModeSpec, lattice: LatticeSpec, K: int
) -> tuple[float, float]:
    """Mean and variance of the probe dispersion-shift operator.

    The shift is sum_i |u_probe(x_i)|^2 n_i over K illuminated sites: for
    a traveling probe this is the window atom number, for a standing probe
    a cos^2-weighted occupation sum.
    """
    if not (1 <= K <= lattice.M) or lattice.offset + K - 1 > lattice.M:
        raise ValueError(
            f"K={K} with offset {lattice.offset} does not fit M={lattice.M}"
        )
    if probe.kind == TRAVELING:
        return n_k_statistics(state, K)
    weights = [
        _abs2(mode_function(probe, m))
        for m in range(lattice.offset, lattice.offset + K)
    ]
    mean, var = window_statistics(moment_set(state), weights)
    return mean, clamp_small_negative(var)


@dataclass(frozen=True)
class ObservableRow:
    """All closed-form observables at one probe angle."""

    theta1: float
    amp: complex
    intensity: float
    noise_r: float
    quad_mean: float
    quad_var: float
    fourth: float
    fourth_var: float
    fourth_var_raw: float


class ScanError(RuntimeError):
    """An observable failed at a specific grid angle."""


def _scan_row(
    theta1: float,
    pump: ModeSpec,
    probe: ModeSpec,
    lattice: LatticeSpec,
    moments: MomentSet,
    beta: float,
    oracle_dist,
) -> ObservableRow:
    coeffs = coefficients(pump, replace(probe, theta=theta1), lattice)
    amp = expected_amplitude(coeffs, moments)
    intensity_value = intensity(coeffs, moments)
    quad_mean, quad_var = quadrature_stats(coeffs, beta, moments)
    if oracle_dist is None:
        fourth = fourth_moment(coeffs, moments)
    else:
        fourth = oracle_d_moments(oracle_dist, coeffs).fourth
    fourth_var_raw = fourth - intensity_value * intensity_value
    return ObservableRow(
        theta1=theta1,
        amp=amp,
        intensity=intensity_value,
        noise_r=noise_r(coeffs, moments),
        quad_mean=quad_mean,
        quad_var=quad_var,
        fourth=fourth,
        fourth_var=clamp_small_negative(fourth_var_raw),
        fourth_var_raw=fourth_var_raw,
    )


def scan_thread_count() -> int:
    """Worker cap from the LATTICEGLOW_THREADS environment variable."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return value


def angular_scan(
    pump: ModeSpec,
    probe: ModeSpec,
    lattice: LatticeSpec,
    state: AtomState,
    model: ScatterModel | None = None,
    beta: float = 0.0,
    grid=None,
    threads: int | None = None,
) -> list[ObservableRow]:
    """Evaluate every observable over a grid of probe angles.

    Rows are independent, so the grid may be split across worker threads
    (capped by `threads` or LATTICEGLOW_THREADS); the output order always
    matches the grid order.  Rows carry bare D-moments; `model` only
    matters when converting to photon units downstream, so it is accepted
    here for call-site symmetry and otherwise unused.
    """
    grid = list(grid) if grid is not None else []
    if not grid:
        raise ValueError("angle grid must be nonempty")
    moments = moment_set(state)
    oracle_dist = None
    if moments.m1111 is None:
        # Too few sites for the closed fourth moment: enumerate once.
        oracle_dist = enumerate_state(state)

    def row(theta1: float) -> ObservableRow:
        try:
            return _scan_row(theta1, pump, probe, lattice, moments, beta, oracle_dist)
        except (ValueError, ArithmeticError) as exc:
            raise ScanError(f"observable evaluation failed at theta1={theta1!r}: {exc}") from exc

    workers = threads if threads is not None else scan_thread_count()
    workers = max(1, min(workers, len(grid)))
    if workers == 1:
        return [row(t) for t in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row, grid))
