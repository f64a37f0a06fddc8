"""Angle-resolved statistics of light scattered from a 1D optical lattice.

Closed-form amplitude, intensity, noise, quadrature and photon-statistics
observables for Mott-insulator, superfluid and coherent-product atomic
states, certified against an exact Fock-space enumeration oracle.
"""

from .geometry import (
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
from .observables import (
    CavityExample,
    ObservableRow,
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
from .oracle import (
    DMoments,
    OccupationDistribution,
    enumerate_state,
    oracle_d_moments,
    oracle_raw_moment,
    write_distribution_csv,
)
from .states import (
    AtomState,
    COHERENT_PRODUCT,
    MOTT_INSULATOR,
    MomentSet,
    MomentsUnavailableError,
    SUPERFLUID,
    falling_factorial_moment,
    moment_set,
    n_k_statistics,
    raw_moment,
    stirling2,
)

__version__ = "0.1.0"
