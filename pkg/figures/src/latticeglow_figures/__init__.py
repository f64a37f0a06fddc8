"""Render latticeglow preset CSVs into publication-style figure files."""

from .render import FigureRecipe, PanelSeries, RECIPES, render

__all__ = ["FigureRecipe", "PanelSeries", "RECIPES", "render"]

__version__ = "0.1.0"
