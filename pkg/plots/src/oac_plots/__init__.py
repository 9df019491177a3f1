"""Chart rendering for oac-hybrid simulator output files."""

from .render import (
    EmptySelectionError,
    FigureKind,
    PlotSpec,
    RenderSummary,
    SchemaError,
    closed_form_mse,
    read_codebook_levels,
    read_sweep_csv,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "EmptySelectionError",
    "FigureKind",
    "PlotSpec",
    "RenderSummary",
    "SchemaError",
    "closed_form_mse",
    "read_codebook_levels",
    "read_sweep_csv",
    "render",
]
