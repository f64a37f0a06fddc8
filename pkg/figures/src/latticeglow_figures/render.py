"""Turn the preset CSV datasets into multi-panel PNG figures.

This package never recomputes physics: it reads the delimited files the
simulator CLI wrote, checks that every column a recipe references exists,
and draws. Angular panels share an x-axis in units of theta1/pi; zero
curves (the Mott-insulator noise) are drawn explicitly so a flat zero is
visible rather than absent.

Usage: ``render_figs <preset_dir> <out_dir>``
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


class RenderError(RuntimeError):
    """Missing input file or column."""


@dataclass(frozen=True)
class PanelSeries:
    """One curve: a CSV column drawn into one panel of a figure."""

    csv: str
    column: str
    panel: str
    label: str
    style: str = "-"


@dataclass(frozen=True)
class FigureRecipe:
    """All curves of one figure plus its panel grid layout.

    panels maps a panel tag to (row, column) in an nrows x ncols grid;
    every PanelSeries.panel must be one of those tags.
    """

    preset: str
    nrows: int
    ncols: int
    panels: dict[str, tuple[int, int]]
    series: tuple[PanelSeries, ...]
    panel_titles: dict[str, str]


def _three_by_one(preset: str, series, titles) -> FigureRecipe:
    return FigureRecipe(
        preset=preset,
        nrows=3,
        ncols=1,
        panels={"a": (0, 0), "b": (1, 0), "c": (2, 0)},
        series=tuple(series),
        panel_titles=titles,
    )


_FIG2 = _three_by_one(
    "fig2",
    [
        PanelSeries("fig2.csv", "classical_intensity", "a", "classical diffraction"),
        PanelSeries("fig2.csv", "incoherent_coherent", "a", "incoherent, coherent state", "--"),
        PanelSeries("fig2.csv", "incoherent_mott", "a", "incoherent, Mott state", ":"),
        PanelSeries("fig2.csv", "noise_coherent_k30", "b", "coherent"),
        PanelSeries("fig2.csv", "noise_sf_k30", "b", "superfluid"),
        PanelSeries("fig2.csv", "noise_mott_k30", "b", "Mott (zero)", "--"),
        PanelSeries("fig2.csv", "noise_coherent_k15", "c", "coherent"),
        PanelSeries("fig2.csv", "noise_sf_k15", "c", "superfluid, half window"),
        PanelSeries("fig2.csv", "noise_mott_k15", "c", "Mott (zero)", "--"),
    ],
    {
        "a": "(a) classical and incoherent intensity",
        "b": "(b) noise quantity, all sites illuminated",
        "c": "(c) noise quantity, half window",
    },
)


def _fig3() -> FigureRecipe:
    panels = {}
    titles = {}
    series = []
    cases = (
        ("a", "fig3a.csv", "traveling pump, tilted"),
        ("b", "fig3b.csv", "orthogonal pump"),
        ("c", "fig3c.csv", "standing pump, tilted"),
    )
    rows = (
        ("1", "classical_intensity", "classical"),
        ("2", "noise_coherent", "coherent noise"),
        ("3", "noise_sf", "superfluid noise"),
    )
    for col, (case, csv_name, case_label) in enumerate(cases):
        for row, (tag, column, quantity) in enumerate(rows):
            panel = f"{case}{tag}"
            panels[panel] = (row, col)
            titles[panel] = f"({panel}) {quantity}, {case_label}"
            series.append(PanelSeries(csv_name, column, panel, quantity))
            if row > 0:
                series.append(PanelSeries(csv_name, "noise_mott", panel, "Mott (zero)", "--"))
    return FigureRecipe("fig3", 3, 3, panels, tuple(series), titles)


def _fig4() -> FigureRecipe:
    panels = {}
    titles = {}
    series = []
    layout = (
        ("a1", "quadmean_beta0", "quadrature mean, beta=0"),
        ("a2", "quadvar_coherent_beta0", "coherent variance, beta=0"),
        ("a3", "quadvar_sf_beta0", "superfluid variance, beta=0"),
        ("b1", "quadvar_coherent_betapi4", "coherent variance, beta=pi/4"),
        ("b2", "quadvar_coherent_betapi2", "coherent variance, beta=pi/2"),
        ("b3", "quadvar_coherent_beta3pi4", "coherent variance, beta=3pi/4"),
        ("c1", "quadvar_sf_betapi4", "superfluid variance, beta=pi/4"),
        ("c2", "quadvar_sf_betapi2", "superfluid variance, beta=pi/2"),
        ("c3", "quadvar_sf_beta3pi4", "superfluid variance, beta=3pi/4"),
    )
    for index, (panel, column, label) in enumerate(layout):
        panels[panel] = (index % 3, index // 3)
        titles[panel] = f"({panel}) {label}"
        series.append(PanelSeries("fig4.csv", column, panel, label))
        if panel != "a1":
            series.append(
                PanelSeries("fig4.csv", "quadvar_mott_beta0", panel, "Mott (zero)", "--")
            )
    return FigureRecipe("fig4", 3, 3, panels, tuple(series), titles)


_FIG5 = _three_by_one(
    "fig5",
    [
        PanelSeries("fig5.csv", "classical_intensity", "a", "classical diffraction"),
        PanelSeries("fig5.csv", "incoherent_coherent", "a", "incoherent, coherent state", "--"),
        PanelSeries("fig5.csv", "incoherent_mott", "a", "incoherent, Mott state", ":"),
        PanelSeries("fig5.csv", "fourthvar_coherent", "b", "coherent"),
        PanelSeries("fig5.csv", "fourthvar_mott", "b", "Mott (zero)", "--"),
        PanelSeries("fig5.csv", "fourthvar_sf", "c", "superfluid"),
        PanelSeries("fig5.csv", "fourthvar_mott", "c", "Mott (zero)", "--"),
    ],
    {
        "a": "(a) classical and incoherent intensity",
        "b": "(b) photon-number variance, coherent state",
        "c": "(c) photon-number variance, superfluid",
    },
)

RECIPES: dict[str, FigureRecipe] = {
    "fig2": _FIG2,
    "fig3": _fig3(),
    "fig4": _fig4(),
    "fig5": _FIG5,
}

EXPECTED_CSVS = (
    "fig2.csv",
    "fig3a.csv",
    "fig3b.csv",
    "fig3c.csv",
    "fig4.csv",
    "fig5.csv",
    "cavity.csv",
)

OUTPUT_NAMES = ("fig2.png", "fig3.png", "fig4.png", "fig5.png", "cavity.png")


def load_table(path: Path) -> dict[str, np.ndarray]:
    if not path.exists():
        raise RenderError(f"missing CSV file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    table: dict[str, np.ndarray] = {}
    for index, name in enumerate(header):
        column = [row[index] for row in rows]
        try:
            table[name] = np.array([float(v) for v in column])
        except ValueError:
            table[name] = np.array(column)
    return table


def _column(table, path: Path, name: str) -> np.ndarray:
    if name not in table:
        raise RenderError(f"column {name!r} not found in {path}")
    return table[name]


def _render_recipe(recipe: FigureRecipe, preset_dir: Path, out_path: Path) -> Path:
    tables = {}
    for series in recipe.series:
        csv_path = preset_dir / series.csv
        if series.csv not in tables:
            tables[series.csv] = load_table(csv_path)
        _column(tables[series.csv], csv_path, series.column)
        _column(tables[series.csv], csv_path, "theta1_rad")
    fig, axes = plt.subplots(
        recipe.nrows,
        recipe.ncols,
        figsize=(4.2 * recipe.ncols, 2.6 * recipe.nrows),
        squeeze=False,
        sharex=True,
    )
    for series in recipe.series:
        table = tables[series.csv]
        row, col = recipe.panels[series.panel]
        ax = axes[row][col]
        x = table["theta1_rad"] / np.pi
        ax.plot(x, table[series.column], series.style, label=series.label, linewidth=1.0)
    for panel, (row, col) in recipe.panels.items():
        ax = axes[row][col]
        ax.set_title(recipe.panel_titles[panel], fontsize=8)
        ax.legend(fontsize=6, loc="upper right")
        ax.tick_params(labelsize=7)
        if row == recipe.nrows - 1:
            ax.set_xlabel(r"$\theta_1/\pi$", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def _render_cavity(preset_dir: Path, out_path: Path) -> Path:
    path = preset_dir / "cavity.csv"
    table = load_table(path)
    for name in ("state", "n_atoms", "intensity", "fourth_var", "selforg_intensity"):
        _column(table, path, name)
    labels = [
        f"{state} N={int(float(size))}" for state, size in zip(table["state"], table["n_atoms"])
    ]
    x = np.arange(len(labels))
    width = 0.28
    fig, ax = plt.subplots(figsize=(7.0, 3.4))
    ax.bar(x - width, table["intensity"], width, label="intensity")
    ax.bar(x, table["fourth_var"], width, label="fourth-moment variance")
    ax.bar(x + width, table["selforg_intensity"], width, label="self-organized intensity")
    ax.set_xticks(x, labels, fontsize=8)
    ax.set_yscale("symlog")
    ax.set_ylabel("photon units at |C|^2 = 1", fontsize=8)
    ax.set_title("transversally pumped cavity: state comparison", fontsize=9)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render(preset_dir, out_dir) -> list[Path]:
    """Render every figure from the preset CSVs in preset_dir into out_dir.

    Returns the written image paths; raises RenderError when an input file
    or a referenced column is missing.
    """
    preset_dir = Path(preset_dir)
    out_dir = Path(out_dir)
    missing = [name for name in EXPECTED_CSVS if not (preset_dir / name).exists()]
    if missing:
        raise RenderError(
            f"preset directory {preset_dir} is missing expected files: {', '.join(missing)}"
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, recipe in RECIPES.items():
        written.append(_render_recipe(recipe, preset_dir, out_dir / f"{name}.png"))
    written.append(_render_cavity(preset_dir, out_dir / "cavity.png"))
    return written


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) != 2:
        print("usage: render_figs <preset_dir> <out_dir>", file=sys.stderr)
        return 2
    try:
        for path in render(argv[0], argv[1]):
            print(path)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
