"""Command-line scenario runner.

Three modes, selected by flags:

* ``--preset NAME``: regenerate one of the frozen reference datasets
  (fig2, fig3a, fig3b, fig3c, fig4, fig5, cavity) as CSV files.
* ``--selftest [MAX_NM]``: run the closed-form/oracle certification
  suites and exit 0 only if every comparison passes.
* custom scans: state/geometry flags or a JSON config (flags override the
  config) produce a CSV with the requested observable columns.

Exit codes: 0 success, 1 test or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .geometry import LatticeSpec, ModeSpec, STANDING, TRAVELING
from .observables import (
    ScatterModel,
    angular_scan,
    incoherent_intensity,
    photon_number_variance,
)
from .presets import PRESET_NAMES, format_value, run_preset, write_csv
from .selftest import run_selftest
from .states import (
    COHERENT_PRODUCT,
    MOTT_INSULATOR,
    SUPERFLUID,
    AtomState,
)

OBSERVABLE_NAMES = (
    "amp",
    "intensity",
    "noise",
    "incoherent",
    "quad",
    "fourth",
    "photon_var",
)

_STATE_ALIASES = {
    "mott": MOTT_INSULATOR,
    "mi": MOTT_INSULATOR,
    "mott_insulator": MOTT_INSULATOR,
    "sf": SUPERFLUID,
    "superfluid": SUPERFLUID,
    "coherent": COHERENT_PRODUCT,
    "coh": COHERENT_PRODUCT,
    "coherent_product": COHERENT_PRODUCT,
}


@dataclass
class ScanConfig:
    """One custom angular scan, as mirrored by the JSON config document."""

    state: str = "superfluid"
    big_n: int = 30
    big_m: int = 30
    k: int = 30
    offset: int = 1
    pump: str = TRAVELING
    probe: str = TRAVELING
    theta0: float = 0.0
    pump_wavelength_ratio: float = 0.5
    probe_wavelength_ratio: float = 0.5
    pump_phase: float = 0.0
    probe_phase: float = 0.0
    beta: float = 0.0
    grid_min: float = -math.pi
    grid_max: float = math.pi
    grid_count: int = 2001
    observables: tuple[str, ...] = OBSERVABLE_NAMES
    coupling: dict | None = None
    out: str = "scan.csv"

    def violations(self) -> list[str]:
        """Every violated invariant, not just the first."""
        problems = []
        if _STATE_ALIASES.get(str(self.state).lower()) is None:
            problems.append(f"unknown state {self.state!r}")
        if self.big_n < 1 or self.big_m < 1:
            problems.append(f"need big_n >= 1 and big_m >= 1, got {self.big_n}, {self.big_m}")
        if _STATE_ALIASES.get(str(self.state).lower()) == MOTT_INSULATOR and (
            self.big_m >= 1 and self.big_n % max(self.big_m, 1) != 0
        ):
            problems.append(
                f"Mott insulator needs big_n divisible by big_m, got {self.big_n}/{self.big_m}"
            )
        if not (1 <= self.k <= self.big_m):
            problems.append(f"k must satisfy 1 <= k <= big_m, got k={self.k}, big_m={self.big_m}")
        if self.offset < 1:
            problems.append(f"offset must be >= 1, got {self.offset}")
        elif self.offset + self.k - 1 > self.big_m:
            problems.append(
                f"window exceeds lattice: offset+k-1 = {self.offset + self.k - 1} "
                f"> big_m = {self.big_m}"
            )
        for name, value in (("pump", self.pump), ("probe", self.probe)):
            if value not in (TRAVELING, STANDING):
                problems.append(f"{name} must be 'traveling' or 'standing', got {value!r}")
        for name, value in (
            ("pump_wavelength_ratio", self.pump_wavelength_ratio),
            ("probe_wavelength_ratio", self.probe_wavelength_ratio),
        ):
            if not value > 0:
                problems.append(f"{name} must be > 0, got {value}")
        if self.grid_count < 1:
            problems.append(f"grid_count must be >= 1, got {self.grid_count}")
        if not self.observables:
            problems.append("observables must be nonempty")
        unknown = [o for o in self.observables if o not in OBSERVABLE_NAMES]
        if unknown:
            problems.append(
                f"unknown observables {unknown}; choose from {', '.join(OBSERVABLE_NAMES)}"
            )
        if self.coupling is not None:
            try:
                self.scatter_model()
            except (TypeError, ValueError) as exc:
                problems.append(f"bad coupling parameters: {exc}")
        return problems

    def atom_state(self) -> AtomState:
        return AtomState(_STATE_ALIASES[str(self.state).lower()], self.big_n, self.big_m)

    def scatter_model(self) -> ScatterModel | None:
        if self.coupling is None:
            return None
        params = dict(self.coupling)
        a0 = params.get("a0", 1.0)
        if isinstance(a0, (list, tuple)):
            a0 = complex(a0[0], a0[1])
        params["a0"] = a0
        return ScatterModel(**params)

    def grid(self) -> list[float]:
        return [float(t) for t in np.linspace(self.grid_min, self.grid_max, self.grid_count)]


def _columns_for(observables) -> list[str]:
    cols = []
    for name in observables:
        if name == "amp":
            cols += ["amp_re", "amp_im"]
        elif name == "intensity":
            cols.append("intensity")
        elif name == "noise":
            cols.append("noise_r")
        elif name == "incoherent":
            cols.append("incoherent_intensity")
        elif name == "quad":
            cols += ["quad_mean", "quad_var"]
        elif name == "fourth":
            cols += ["fourth", "fourth_var"]
        elif name == "photon_var":
            cols.append("photon_var")
    return cols


def run_custom(config: ScanConfig) -> Path:
    """Run one configured scan and write its CSV; returns the output path."""
    problems = config.violations()
    if problems:
        raise ValueError("; ".join(problems))
    state = config.atom_state()
    model = config.scatter_model()
    pump = ModeSpec(config.pump, config.theta0, config.pump_wavelength_ratio, config.pump_phase)
    probe = ModeSpec(config.probe, 0.0, config.probe_wavelength_ratio, config.probe_phase)
    lattice = LatticeSpec(config.big_m, config.k, config.offset)
    rows = angular_scan(pump, probe, lattice, state, model, config.beta, config.grid())
    incoherent = None
    if "incoherent" in config.observables:
        incoherent = incoherent_intensity(state, config.k, config.pump, config.probe)
    out_rows = []
    for row in rows:
        values: list[float] = [row.theta1]
        for name in config.observables:
            if name == "amp":
                values += [row.amp.real, row.amp.imag]
            elif name == "intensity":
                values.append(row.intensity)
            elif name == "noise":
                values.append(row.noise_r)
            elif name == "incoherent":
                values.append(incoherent)
            elif name == "quad":
                values += [row.quad_mean, row.quad_var]
            elif name == "fourth":
                values += [row.fourth, row.fourth_var]
            elif name == "photon_var":
                values.append(photon_number_variance(model, row.fourth, row.intensity))
        out_rows.append(values)
    header = ["theta1_rad"] + _columns_for(config.observables)
    return write_csv(Path(config.out), header, out_rows)


def selftest_command(max_nm: int, tolerance: float) -> int:
    """Run the certification suites and print a per-suite table."""
    results = run_selftest(max_nm, tolerance)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  checks={r.checks:6d}  {status}")
    failing = [r for r in results if not r.passed]
    if failing:
        first = failing[0]
        print(f"\nFIRST FAILURE in suite '{first.name}':", file=sys.stderr)
        print(f"  {first.failures[0]}", file=sys.stderr)
        return 1
    print(f"\nall suites passed at tolerance {format_value(tolerance)} (max N=M {max_nm})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeglow",
        description="Angle-resolved statistics of light scattered from a 1D optical lattice.",
    )
    parser.add_argument("--preset", help=f"named dataset: one of {', '.join(PRESET_NAMES)}")
    parser.add_argument("--config", help="JSON file mirroring the scan-config fields")
    parser.add_argument(
        "--selftest",
        nargs="?",
        const=5,
        type=int,
        metavar="MAX_NM",
        help="run the closed-form/oracle certification suites up to N=M=MAX_NM (default 5)",
    )
    parser.add_argument(
        "--tolerance", type=float, default=1e-10, help="selftest comparison tolerance"
    )
    parser.add_argument("--state", help="mott | superfluid | coherent")
    parser.add_argument("--big-n", type=int, dest="big_n", help="total atom number")
    parser.add_argument("--big-m", type=int, dest="big_m", help="total site count")
    parser.add_argument("--k", type=int, help="illuminated site count")
    parser.add_argument("--offset", type=int, help="first illuminated site (1-based)")
    parser.add_argument("--theta0", type=float, help="pump angle in radians")
    parser.add_argument("--pump", choices=(TRAVELING, STANDING), help="pump mode kind")
    parser.add_argument("--probe", choices=(TRAVELING, STANDING), help="probe mode kind")
    parser.add_argument("--beta", type=float, help="homodyne phase in radians")
    parser.add_argument("--grid", help="probe-angle grid as MIN:MAX:COUNT (radians)")
    parser.add_argument(
        "--observables",
        help=f"comma-separated subset of {','.join(OBSERVABLE_NAMES)}",
    )
    parser.add_argument("--out", help="output CSV file (scans) or directory (presets)")
    return parser


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be MIN:MAX:COUNT, got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _config_from_args(args) -> ScanConfig:
    values = {}
    if args.config:
        with open(args.config) as fh:
            document = json.load(fh)
        known = {f.name for f in fields(ScanConfig)}
        unknown = set(document) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        values.update(document)
    for flag in ("state", "big_n", "big_m", "k", "offset", "theta0", "pump", "probe", "beta", "out"):
        value = getattr(args, flag)
        if value is not None:
            values[flag] = value
    if args.grid is not None:
        values["grid_min"], values["grid_max"], values["grid_count"] = _parse_grid(args.grid)
    if args.observables is not None:
        values["observables"] = tuple(
            token.strip() for token in args.observables.split(",") if token.strip()
        )
    if "observables" in values:
        values["observables"] = tuple(values["observables"])
    return ScanConfig(**values)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.selftest is not None:
        if not (2 <= args.selftest <= 8):
            parser.error(f"--selftest MAX_NM must lie in 2..8, got {args.selftest}")
        if args.tolerance < 0:
            parser.error(f"--tolerance must be >= 0, got {args.tolerance}")
        return selftest_command(args.selftest, args.tolerance)

    if args.preset is not None:
        if args.preset not in PRESET_NAMES:
            print(
                f"unknown preset {args.preset!r}; choose one of {', '.join(PRESET_NAMES)}",
                file=sys.stderr,
            )
            return 2
        out_dir = Path(args.out) if args.out else Path("latticeglow_out")
        paths = run_preset(args.preset, out_dir)
        for path in paths:
            print(path)
        return 0

    try:
        config = _config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    problems = config.violations()
    if problems:
        print("invalid scan configuration:", file=sys.stderr)
        for problem in problems:
            print(f"  - {problem}", file=sys.stderr)
        return 1
    path = run_custom(config)
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
