"""Render postproj CLI outputs (report JSON, density-grid CSV) as static images."""

from .render import PlotSpec, RenderSummary, SchemaError, render

__version__ = "0.1.0"
