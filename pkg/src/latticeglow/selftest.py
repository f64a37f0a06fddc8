"""Cross-certification of the closed-form engine against the oracle.

Every closed form in the package is checked against brute-force
enumeration: the diffraction sum against term-by-term summation, the
moment engine against weighted occupation sums, and all light observables
against direct expectations of D over the enumerated basis.  The suites
are shared by the command-line ``--selftest`` and by the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    LatticeSpec,
    ModeSpec,
    STANDING,
    TRAVELING,
    closed_form_traveling_sum,
    coefficients,
)
from .observables import (
    expected_amplitude,
    fourth_moment,
    fourth_moment_traveling,
    intensity,
    noise_r,
    quadrature_stats,
)
from .oracle import (
    enumerate_state,
    oracle_d_moments,
    oracle_d_moments_batch,
    oracle_raw_moment,
)
from .states import (
    AtomState,
    MomentsUnavailableError,
    falling_factorial_moment,
    moment_set,
    n_k_statistics,
    raw_moment,
)

# Largest coherent-product lattice whose truncated Poisson grid fits the
# enumeration cap; superfluid and Mott suites are not limited by this.
COHERENT_SIZE_CAP = 5

# Tail cutoffs: raw-moment certification needs the tighter one because a
# fourth moment amplifies the truncated tail by q^4.
_CERTIFY_CUTOFF = 1e-16
_DMOMENT_CUTOFF = 1e-14

_MOMENT_PATTERNS = (
    (1,),
    (2,),
    (3,),
    (4,),
    (1, 1),
    (2, 1),
    (3, 1),
    (2, 2),
    (1, 1, 1),
    (2, 1, 1),
    (1, 1, 1, 1),
)

_STATE_BUILDERS = (
    ("mott", AtomState.mott_insulator),
    ("superfluid", AtomState.superfluid),
    ("coherent", AtomState.coherent_product),
)


@dataclass
class SuiteResult:
    """Outcome of one comparison suite."""

    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def compare(self, label: str, closed: float, oracle: float, tol: float) -> None:
        self.checks += 1
        floor = tol * 1e-2
        if abs(closed - oracle) > max(floor, tol * max(abs(closed), abs(oracle))):
            self.failures.append(
                f"{label}: closed={closed!r} oracle={oracle!r} "
                f"diff={abs(closed - oracle):.3e}"
            )


def _angle_grid(count: int) -> list[float]:
    return [float(t) for t in np.linspace(-math.pi, math.pi, count, endpoint=False)]


def _geometries(theta0: float):
    return (
        ("trav/trav", ModeSpec(TRAVELING, theta0), TRAVELING),
        ("trav/stand", ModeSpec(TRAVELING, theta0), STANDING),
        ("stand/stand", ModeSpec(STANDING, theta0), STANDING),
    )


def geometry_suite(tolerance: float) -> SuiteResult:
    """Closed diffraction sum versus direct summation, plus continuity."""
    suite = SuiteResult("diffraction-sum vs direct sum")
    rng = np.random.default_rng(20240817)
    for k in (1, 2, 5, 13, 30, 64):
        angles = list(rng.uniform(-7.0, 7.0, 24)) + [
            0.0,
            math.pi,
            2 * math.pi,
            -2 * math.pi,
            2 * math.pi / 3,
        ]
        for alpha in angles:
            direct = sum(
                complex(math.cos(m * alpha), math.sin(m * alpha))
                for m in range(1, k + 1)
            )
            closed = closed_form_traveling_sum(alpha, k)
            suite.compare(f"K={k} alpha={alpha:.6f}", abs(closed - direct), 0.0, tolerance)
        for lobe in (0, 1, 3):
            center = 2 * math.pi * lobe
            at = closed_form_traveling_sum(center, k)
            suite.checks += 1
            if abs(at - k) > 1e-6 * k:
                suite.failures.append(f"K={k}: value at maximum {lobe} is {at!r}, not {k}")
            for eps in (-1e-12, 1e-12):
                near = closed_form_traveling_sum(center + eps, k)
                suite.checks += 1
                if abs(near - at) > 1e-6 * k:
                    suite.failures.append(
                        f"K={k}: discontinuity at maximum {lobe}: {near!r} vs {at!r}"
                    )
    return suite


def _sites_for(pattern, n_sites: int):
    return list(range(1, len(pattern) + 1)) if len(pattern) <= n_sites else None


def moment_suite(max_nm: int, tolerance: float) -> SuiteResult:
    """Closed-form raw moments versus the enumeration oracle."""
    suite = SuiteResult("raw moments vs oracle")
    for label, build in _STATE_BUILDERS:
        top = min(max_nm, COHERENT_SIZE_CAP) if label == "coherent" else max_nm
        for nm in range(2, top + 1):
            state = build(nm, nm)
            dist = enumerate_state(state, cutoff_tail=_CERTIFY_CUTOFF)
            for pattern in _MOMENT_PATTERNS:
                sites = _sites_for(pattern, nm)
                if sites is None:
                    continue
                closed = raw_moment(state, list(pattern))
                oracle = oracle_raw_moment(dist, sites, list(pattern))
                suite.compare(f"{label} N=M={nm} powers={pattern}", closed, oracle, tolerance)
                if all(p == 1 for p in pattern):
                    ff = falling_factorial_moment(state, list(pattern))
                    suite.compare(
                        f"{label} N=M={nm} falling-factorial {pattern}",
                        ff,
                        oracle,
                        tolerance,
                    )
    return suite


def window_suite(max_nm: int, tolerance: float) -> SuiteResult:
    """Window atom-number statistics versus the oracle."""
    suite = SuiteResult("window statistics vs oracle")
    for label, build in _STATE_BUILDERS:
        top = min(max_nm, COHERENT_SIZE_CAP) if label == "coherent" else max_nm
        for nm in range(2, top + 1):
            state = build(nm, nm)
            dist = enumerate_state(state, cutoff_tail=_CERTIFY_CUTOFF)
            window = dist.occupations.astype(np.float64)
            p = dist.probabilities
            norm = float(p.sum())
            for k in range(1, nm + 1):
                mean, var = n_k_statistics(state, k)
                totals = window[:, :k].sum(axis=1)
                o_mean = float(p @ totals) / norm
                o_var = float(p @ (totals * totals)) / norm - o_mean * o_mean
                suite.compare(f"{label} N=M={nm} K={k} mean", mean, o_mean, tolerance)
                suite.compare(f"{label} N=M={nm} K={k} var", var, o_var, tolerance)
    return suite


def observable_suite(
    max_nm: int,
    tolerance: float,
    angle_count: int = 32,
    betas=(0.0, math.pi / 4, math.pi / 2),
) -> SuiteResult:
    """Closed-form light observables versus oracle D-moments."""
    suite = SuiteResult("observables vs oracle")
    angles = _angle_grid(angle_count)
    for label, build in _STATE_BUILDERS:
        top = min(max_nm, COHERENT_SIZE_CAP) if label == "coherent" else max_nm
        for nm in range(2, top + 1):
            state = build(nm, nm)
            moments = moment_set(state)
            dist = enumerate_state(state, cutoff_tail=_DMOMENT_CUTOFF)
            k_values = sorted({2, max(2, nm // 2), nm})
            for geom_label, pump, probe_kind in _geometries(0.1 * math.pi):
                plans = []
                for k in k_values:
                    lattice = LatticeSpec(nm, k)
                    for theta1 in angles:
                        plans.append(
                            (
                                k,
                                theta1,
                                coefficients(pump, ModeSpec(probe_kind, theta1), lattice),
                            )
                        )
                for beta in betas:
                    oracle_rows = oracle_d_moments_batch(dist, [c for _, _, c in plans], beta)
                    for (k, theta1, coeffs), om in zip(plans, oracle_rows):
                        tag = f"{label} N=M={nm} K={k} {geom_label} theta1={theta1:.4f} beta={beta:.3f}"
                        if beta == betas[0]:
                            amp = expected_amplitude(coeffs, moments)
                            suite.compare(f"{tag} amp", abs(amp - om.amp), 0.0, tolerance)
                            suite.compare(
                                f"{tag} intensity", intensity(coeffs, moments), om.intensity, tolerance
                            )
                            suite.compare(
                                f"{tag} noise",
                                noise_r(coeffs, moments),
                                om.intensity - abs(om.amp) ** 2,
                                tolerance,
                            )
                            try:
                                closed_fourth = fourth_moment(coeffs, moments)
                            except MomentsUnavailableError:
                                closed_fourth = None
                            if closed_fourth is not None:
                                suite.compare(f"{tag} fourth", closed_fourth, om.fourth, tolerance)
                        qm, qv = quadrature_stats(coeffs, beta, moments)
                        suite.compare(f"{tag} quad mean", qm, om.quad_mean, tolerance)
                        suite.compare(f"{tag} quad var", qv, om.quad_var, tolerance)
    return suite


def traveling_reduction_suite(max_nm: int, tolerance: float, angle_count: int = 64) -> SuiteResult:
    """General fourth-moment closed form versus its traveling-wave reduction."""
    suite = SuiteResult("fourth moment traveling reduction")
    angles = _angle_grid(angle_count)
    pump = ModeSpec(TRAVELING, 0.1 * math.pi)
    for label, build in _STATE_BUILDERS:
        for nm in range(4, max_nm + 1):
            state = build(nm, nm)
            moments = moment_set(state)
            lattice = LatticeSpec(nm, nm)
            for theta1 in angles:
                coeffs = coefficients(pump, ModeSpec(TRAVELING, theta1), lattice)
                general = fourth_moment(coeffs, moments)
                reduced = fourth_moment_traveling(coeffs.alpha_minus, nm, moments)
                suite.compare(
                    f"{label} N=M={nm} theta1={theta1:.4f}", general, reduced, tolerance
                )
    return suite


def identity_suite(max_nm: int, tolerance: float, angle_count: int = 48) -> SuiteResult:
    """Internal identities: R = intensity - |amp|^2, positivity, quad reuse."""
    suite = SuiteResult("internal identities")
    angles = _angle_grid(angle_count)
    pump = ModeSpec(TRAVELING, 0.0)
    for label, build in _STATE_BUILDERS:
        for nm in (max_nm,):
            state = build(nm, nm)
            moments = moment_set(state)
            lattice = LatticeSpec(nm, nm)
            for theta1 in angles:
                coeffs = coefficients(pump, ModeSpec(TRAVELING, theta1), lattice)
                amp = expected_amplitude(coeffs, moments)
                ivalue = intensity(coeffs, moments)
                rvalue = noise_r(coeffs, moments)
                suite.compare(
                    f"{label} N=M={nm} theta1={theta1:.4f} R-identity",
                    rvalue,
                    ivalue - (amp.real**2 + amp.imag**2),
                    tolerance,
                )
                qm, qv = quadrature_stats(coeffs, 0.0, moments)
                for name, value in (("intensity", ivalue), ("noise", rvalue), ("quadvar", qv)):
                    suite.checks += 1
                    if value < 0:
                        suite.failures.append(
                            f"{label} N=M={nm} theta1={theta1:.4f}: negative {name} {value!r}"
                        )
    return suite


def run_selftest(max_nm: int = 5, tolerance: float = 1e-10) -> list[SuiteResult]:
    """Run every suite up to lattice size max_nm at the given tolerance."""
    if not (2 <= max_nm <= 8):
        raise ValueError(f"max_nm must lie in 2..8, got {max_nm}")
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    return [
        geometry_suite(tolerance),
        moment_suite(max_nm, tolerance),
        window_suite(max_nm, tolerance),
        observable_suite(max_nm, tolerance),
        traveling_reduction_suite(max_nm, tolerance),
        identity_suite(max_nm, tolerance),
    ]


def sec_six_example_suite(tolerance: float = 1e-12) -> SuiteResult:
    """Two atoms on two sites scattered at the cavity geometry.

    The smallest nontrivial case: the superfluid intensity at the
    alternating-coefficient geometry equals the window atom number even
    though the amplitude vanishes.
    """
    from .geometry import GeometryCoefficients

    suite = SuiteResult("two-atom cavity example")
    state = AtomState.superfluid(2, 2)
    dist = enumerate_state(state)
    coeffs = GeometryCoefficients.from_values([1.0, -1.0])
    om = oracle_d_moments(dist, coeffs)
    suite.compare("amp", abs(om.amp), 0.0, tolerance)
    suite.compare("intensity", om.intensity, 2.0, tolerance)
    moments = moment_set(state)
    suite.compare("closed amp", abs(expected_amplitude(coeffs, moments)), 0.0, tolerance)
    suite.compare("closed intensity", intensity(coeffs, moments), om.intensity, tolerance)
    return suite
