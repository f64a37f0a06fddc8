"""Frozen scan presets that regenerate the simulator's reference datasets.

Each preset writes one or more CSV files with the angular distributions of
the observables for the standard comparison states (Mott insulator,
superfluid, coherent product) at the standard sizes.  The files are plain
tables: a header line, then one row per probe angle, every float printed
with 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import LatticeSpec, ModeSpec, STANDING, TRAVELING, coefficients
from .observables import (
    cavity_example,
    clamp_small_negative,
    expected_amplitude,
    fourth_moment,
    incoherent_intensity,
    intensity,
    noise_r,
    quadrature_stats,
)
from .states import AtomState, moment_set

PRESET_NAMES = ("fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "cavity")

DEFAULT_GRID_MIN = -math.pi
DEFAULT_GRID_MAX = math.pi
DEFAULT_GRID_COUNT = 2001

_PRESET_SIZE = 30

_BETA_TAGS = (
    ("beta0", 0.0),
    ("betapi4", math.pi / 4),
    ("betapi2", math.pi / 2),
    ("beta3pi4", 3 * math.pi / 4),
)


def format_value(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, header: list[str], rows) -> Path:
    """Write a deterministic CSV: LF endings, 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(v if isinstance(v, str) else format_value(v) for v in row) + "\n"
            )
    return path


def default_grid(
    gmin: float = DEFAULT_GRID_MIN,
    gmax: float = DEFAULT_GRID_MAX,
    count: int = DEFAULT_GRID_COUNT,
) -> list[float]:
    return [float(t) for t in np.linspace(gmin, gmax, count)]


def _standard_states(size: int):
    return {
        "mott": AtomState.mott_insulator(size, size),
        "sf": AtomState.superfluid(size, size),
        "coherent": AtomState.coherent_product(size, size),
    }


def _coeff_column(pump, probe_kind, lattice, grid):
    return [
        coefficients(pump, ModeSpec(probe_kind, theta1), lattice) for theta1 in grid
    ]


def preset_fig2(out_dir: Path) -> list[Path]:
    """Traveling pump orthogonal to the lattice scattered into traveling modes.

    Classical diffraction, the incoherent-pump levels, and the noise
    quantity for the three states with the full window and the half
    window.
    """
    size = _PRESET_SIZE
    states = _standard_states(size)
    grid = default_grid()
    pump = ModeSpec(TRAVELING, 0.0)
    coeffs_full = _coeff_column(pump, TRAVELING, LatticeSpec(size, size), grid)
    coeffs_half = _coeff_column(pump, TRAVELING, LatticeSpec(size, size // 2), grid)
    moments = {name: moment_set(st) for name, st in states.items()}
    inc_coh = incoherent_intensity(states["coherent"], size, TRAVELING, TRAVELING)
    inc_mott = incoherent_intensity(states["mott"], size, TRAVELING, TRAVELING)
    header = [
        "theta1_rad",
        "classical_intensity",
        "incoherent_coherent",
        "incoherent_mott",
        "noise_coherent_k30",
        "noise_sf_k30",
        "noise_mott_k30",
        "noise_coherent_k15",
        "noise_sf_k15",
        "noise_mott_k15",
    ]
    rows = []
    for theta1, cf, ch in zip(grid, coeffs_full, coeffs_half):
        amp = expected_amplitude(cf, moments["mott"])
        rows.append(
            [
                theta1,
                amp.real**2 + amp.imag**2,
                inc_coh,
                inc_mott,
                noise_r(cf, moments["coherent"]),
                noise_r(cf, moments["sf"]),
                noise_r(cf, moments["mott"]),
                noise_r(ch, moments["coherent"]),
                noise_r(ch, moments["sf"]),
                noise_r(ch, moments["mott"]),
            ]
        )
    return [write_csv(Path(out_dir) / "fig2.csv", header, rows)]


def _standing_probe_preset(name: str, pump: ModeSpec, out_dir: Path) -> list[Path]:
    size = _PRESET_SIZE
    states = _standard_states(size)
    grid = default_grid()
    coeffs = _coeff_column(pump, STANDING, LatticeSpec(size, size), grid)
    moments = {label: moment_set(st) for label, st in states.items()}
    header = ["theta1_rad", "classical_intensity", "noise_coherent", "noise_sf", "noise_mott"]
    rows = []
    for theta1, cf in zip(grid, coeffs):
        amp = expected_amplitude(cf, moments["mott"])
        rows.append(
            [
                theta1,
                amp.real**2 + amp.imag**2,
                noise_r(cf, moments["coherent"]),
                noise_r(cf, moments["sf"]),
                noise_r(cf, moments["mott"]),
            ]
        )
    return [write_csv(Path(out_dir) / f"{name}.csv", header, rows)]


def preset_fig3a(out_dir: Path) -> list[Path]:
    """Standing-wave probe, traveling pump tilted off the lattice normal."""
    return _standing_probe_preset("fig3a", ModeSpec(TRAVELING, 0.1 * math.pi), out_dir)


def preset_fig3b(out_dir: Path) -> list[Path]:
    """Standing-wave probe, pump orthogonal to the lattice."""
    return _standing_probe_preset("fig3b", ModeSpec(TRAVELING, 0.0), out_dir)


def preset_fig3c(out_dir: Path) -> list[Path]:
    """Standing-wave probe and standing-wave pump tilted off the normal."""
    return _standing_probe_preset("fig3c", ModeSpec(STANDING, 0.1 * math.pi), out_dir)


def preset_fig4(out_dir: Path) -> list[Path]:
    """Quadrature means and variances at four homodyne phases."""
    size = _PRESET_SIZE
    states = _standard_states(size)
    grid = default_grid()
    pump = ModeSpec(TRAVELING, 0.0)
    coeffs = _coeff_column(pump, TRAVELING, LatticeSpec(size, size), grid)
    moments = {label: moment_set(st) for label, st in states.items()}
    header = ["theta1_rad"]
    for tag, _ in _BETA_TAGS:
        header += [
            f"quadmean_{tag}",
            f"quadvar_coherent_{tag}",
            f"quadvar_sf_{tag}",
            f"quadvar_mott_{tag}",
        ]
    rows = []
    for theta1, cf in zip(grid, coeffs):
        row = [theta1]
        for _, beta in _BETA_TAGS:
            mean, _ = quadrature_stats(cf, beta, moments["mott"])
            row.append(mean)
            for label in ("coherent", "sf", "mott"):
                row.append(quadrature_stats(cf, beta, moments[label])[1])
        rows.append(row)
    return [write_csv(Path(out_dir) / "fig4.csv", header, rows)]


def preset_fig5(out_dir: Path) -> list[Path]:
    """Fourth-moment variances (photon statistics) for two traveling waves."""
    size = _PRESET_SIZE
    states = _standard_states(size)
    grid = default_grid()
    pump = ModeSpec(TRAVELING, 0.0)
    coeffs = _coeff_column(pump, TRAVELING, LatticeSpec(size, size), grid)
    moments = {label: moment_set(st) for label, st in states.items()}
    inc_coh = incoherent_intensity(states["coherent"], size, TRAVELING, TRAVELING)
    inc_mott = incoherent_intensity(states["mott"], size, TRAVELING, TRAVELING)
    header = [
        "theta1_rad",
        "classical_intensity",
        "incoherent_coherent",
        "incoherent_mott",
        "fourthvar_coherent",
        "fourthvar_sf",
        "fourthvar_mott",
    ]
    rows = []
    for theta1, cf in zip(grid, coeffs):
        amp = expected_amplitude(cf, moments["mott"])
        row = [theta1, amp.real**2 + amp.imag**2, inc_coh, inc_mott]
        for label in ("coherent", "sf", "mott"):
            ivalue = intensity(cf, moments[label])
            fourth = fourth_moment(cf, moments[label])
            row.append(clamp_small_negative(fourth - ivalue * ivalue))
        rows.append(row)
    return [write_csv(Path(out_dir) / "fig5.csv", header, rows)]


def preset_cavity(out_dir: Path) -> list[Path]:
    """Transversally pumped cavity values for the Mott and superfluid states."""
    header = [
        "state",
        "n_atoms",
        "n_sites",
        "n_illuminated",
        "amp_re",
        "amp_im",
        "intensity",
        "fourth_var",
        "selforg_intensity",
    ]
    rows = []
    for size in (4, _PRESET_SIZE):
        for label, state in (
            ("mott", AtomState.mott_insulator(size, size)),
            ("sf", AtomState.superfluid(size, size)),
        ):
            values = cavity_example(state, size)
            rows.append(
                [
                    label,
                    float(size),
                    float(size),
                    float(size),
                    values.amp.real,
                    values.amp.imag,
                    values.intensity,
                    values.fourth_var,
                    values.selforg_intensity,
                ]
            )
    return [write_csv(Path(out_dir) / "cavity.csv", header, rows)]


_PRESET_BUILDERS = {
    "fig2": preset_fig2,
    "fig3a": preset_fig3a,
    "fig3b": preset_fig3b,
    "fig3c": preset_fig3c,
    "fig4": preset_fig4,
    "fig5": preset_fig5,
    "cavity": preset_cavity,
}


def run_preset(name: str, out_dir) -> list[Path]:
    """Generate the CSV files of one named preset into out_dir."""
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}"
        ) from None
    return builder(Path(out_dir))
