"""Mode geometry for a 1D lattice illuminated by a pump/probe mode pair.

Every light observable in this package is driven by the per-site complex
coefficients ``A_m = u_probe*(x_m) u_pump(x_m)`` evaluated over the
illuminated window of the lattice, together with a handful of aggregate
sums of those coefficients.  This module builds the coefficients for
traveling- and standing-wave modes at arbitrary angles and wavelengths.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TRAVELING = "traveling"
STANDING = "standing"
_MODE_KINDS = (TRAVELING, STANDING)

# Below this value of |sin(alpha/2)| the geometric series is evaluated
# term by term instead of via the ratio formula (removable singularity).
_SINGULARITY_GUARD = 1e-9

# Two-piece representation of 2*pi for exact-enough argument reduction:
# the sum is 2*pi-periodic, and reducing alpha first keeps the phase
# arguments small so the ratio formula stays accurate at large K.
_TAU_HI = 2.0 * math.pi
_TAU_LO = 2.4492935982947064e-16


@dataclass(frozen=True)
class ModeSpec:
    """One optical mode: traveling or standing plane wave.

    theta is the angle between the mode wave vector and the normal to the
    lattice axis, wavelength_ratio is d/lambda (lattice period over mode
    wavelength) and phase is a site-independent global phase in radians.
    """

    kind: str
    theta: float
    wavelength_ratio: float = 0.5
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in _MODE_KINDS:
            raise ValueError(f"mode kind must be one of {_MODE_KINDS}, got {self.kind!r}")
        if not (self.wavelength_ratio > 0):
            raise ValueError(f"wavelength_ratio must be > 0, got {self.wavelength_ratio}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")

    @property
    def kx_d(self) -> float:
        """Axial phase advance per lattice site, 2*pi*(d/lambda)*sin(theta)."""
        return 2.0 * math.pi * self.wavelength_ratio * math.sin(self.theta)


@dataclass(frozen=True)
class LatticeSpec:
    """Site layout: M sites total, a contiguous window of K illuminated sites.

    Site m sits at x_m = m*d with m = 1..M; the illuminated window starts
    at `offset` (1-based) and covers offset..offset+K-1.
    """

    M: int
    K: int
    offset: int = 1

    def __post_init__(self):
        problems = []
        if self.M < 1:
            problems.append(f"M must be >= 1, got {self.M}")
        if not (1 <= self.K <= self.M):
            problems.append(f"K must satisfy 1 <= K <= M, got K={self.K}, M={self.M}")
        if self.offset < 1:
            problems.append(f"offset must be >= 1, got {self.offset}")
        if self.offset + self.K - 1 > self.M:
            problems.append(
                f"window exceeds lattice: offset+K-1 = {self.offset + self.K - 1} > M = {self.M}"
            )
        if problems:
            raise ValueError("; ".join(problems))

    def window(self) -> range:
        """Indices of the illuminated sites."""
        return range(self.offset, self.offset + self.K)


@dataclass(frozen=True)
class GeometryCoefficients:
    """Per-site coefficients A_i over the illuminated window plus aggregates.

    The aggregate sums are exactly the combinations that appear in the
    amplitude, intensity, quadrature and fourth-moment formulas:
    sum_a = sum A_i, sum_abs2 = sum |A_i|^2, sum_sq = sum A_i^2,
    sum_abs2_a = sum |A_i|^2 A_i and sum_abs4 = sum |A_i|^4.

    alpha_minus/alpha_plus are the phase-step parameters
    kxd_pump -/+ kxd_probe; they are None for synthetic coefficient sets
    that were not built from a mode pair.
    """

    a: tuple[complex, ...]
    sum_a: complex
    sum_abs2: float
    sum_sq: complex
    sum_abs2_a: complex
    sum_abs4: float
    offset: int = 1
    alpha_minus: float | None = None
    alpha_plus: float | None = None

    @property
    def K(self) -> int:
        return len(self.a)

    @classmethod
    def from_values(
        cls,
        values,
        offset: int = 1,
        alpha_minus: float | None = None,
        alpha_plus: float | None = None,
    ) -> "GeometryCoefficients":
        """Build coefficients (and all aggregate sums) from an explicit list."""
        a = tuple(complex(v) for v in values)
        if not a:
            raise ValueError("coefficient list must be nonempty")
        abs2 = [z.real * z.real + z.imag * z.imag for z in a]
        return cls(
            a=a,
            sum_a=sum(a),
            sum_abs2=math.fsum(abs2),
            sum_sq=sum(z * z for z in a),
            sum_abs2_a=sum(w * z for w, z in zip(abs2, a)),
            sum_abs4=math.fsum(w * w for w in abs2),
            offset=offset,
            alpha_minus=alpha_minus,
            alpha_plus=alpha_plus,
        )


def mode_function(mode: ModeSpec, site_index: int) -> complex:
    """Mode amplitude u(x_m) at site m.

    exp(i(m*kxd + phase)) for traveling waves, cos(m*kxd + phase) for
    standing waves.  Total function; no range restriction on the angle.
    """
    arg = site_index * mode.kx_d + mode.phase
    if mode.kind == TRAVELING:
        return cmath.exp(1j * arg)
    return complex(math.cos(arg), 0.0)


def coefficients(pump: ModeSpec, probe: ModeSpec, lattice: LatticeSpec) -> GeometryCoefficients:
    """Per-site coefficients A_m = u_probe*(x_m) u_pump(x_m) over the window."""
    alpha_minus = pump.kx_d - probe.kx_d
    if pump.kind == TRAVELING and probe.kind == TRAVELING:
        # Combine the phases before exponentiating: unit modulus per site,
        # and transmission maxima come out as exactly 1.
        base = pump.phase - probe.phase
        values = [cmath.exp(1j * (m * alpha_minus + base)) for m in lattice.window()]
    else:
        values = [
            mode_function(probe, m).conjugate() * mode_function(pump, m)
            for m in lattice.window()
        ]
    return GeometryCoefficients.from_values(
        values,
        offset=lattice.offset,
        alpha_minus=alpha_minus,
        alpha_plus=pump.kx_d + probe.kx_d,
    )


def closed_form_traveling_sum(alpha_minus: float, K: int) -> complex:
    """Closed form of the diffraction sum sum_{m=1..K} exp(i*m*alpha).

    Evaluates exp(i(K+1)alpha/2) * sin(K*alpha/2)/sin(alpha/2).  Near a
    diffraction maximum (alpha = 2*pi*l) the ratio has a removable
    singularity; within the guard band the series is summed directly,
    which reproduces the exact limit K at the maximum itself.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    lobe = round(alpha_minus / _TAU_HI)
    alpha = (alpha_minus - lobe * _TAU_HI) - lobe * _TAU_LO
    half_sin = math.sin(0.5 * alpha)
    if abs(half_sin) < _SINGULARITY_GUARD:
        return sum(cmath.exp(1j * m * alpha) for m in range(1, K + 1))
    return cmath.exp(0.5j * (K + 1) * alpha) * (math.sin(0.5 * K * alpha) / half_sin)


def quadrature_coefficients(
    coeffs: GeometryCoefficients, beta: float
) -> tuple[list[float], float]:
    """Projected coefficients Re(A_i e^{-i beta}) and their sum.

    These play the role of the A_i in the quadrature analogue of the
    amplitude/intensity/noise formulas.
    """
    c, s = math.cos(beta), math.sin(beta)
    projected = [z.real * c + z.imag * s for z in coeffs.a]
    return projected, math.fsum(projected)
