"""Chart rendering for simulator output files.

Three figure kinds: quantizer levels marked on the unit circle (from a
codebook dump, one level per line), MSE against feedback bits, and MSE
against the round index within a recalibration cycle (both from sweep CSV).
The bits chart overlays the closed-form curve for feedback-only estimation,
recomputed here from the formula; nothing else is ever recomputed from the
simulation side, the charts are read-only views of the files.

Rendering is deterministic: fixed styling, no timestamps, so re-rendering
the same input yields byte-identical output.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

EXPECTED_COLUMNS = ("variant", "K", "N", "alpha", "T", "t",
                    "trials", "mse", "stderr", "seed")

# error bars cover a 95% interval so that, point by point, empirical values
# are expected to bracket the analytic curve
ERROR_BAR_SIGMA = 1.96

_SVG_HASHSALT = "oac-plots"


class FigureKind(enum.Enum):
    QUANTIZER_CIRCLE = "circle"
    MSE_VS_BITS = "bits"
    MSE_VS_PERIOD = "period"


class SchemaError(ValueError):
    """Input file does not match the expected layout."""


class EmptySelectionError(ValueError):
    """Filters selected no rows."""


@dataclass(frozen=True)
class PlotSpec:
    """What to render: input file, figure kind, output image, row filters."""

    input_path: str
    kind: FigureKind
    output_path: str
    variant: str | None = None
    alpha: float | None = None
    period: int | None = None


@dataclass(frozen=True)
class RenderSummary:
    """What was drawn, for callers that want to check the selection."""

    output_path: str
    series: int
    points: int


@dataclass(frozen=True)
class SweepPoint:
    variant: str
    device_count: int
    bits: int
    alpha: float | None
    period: int | None
    round_index: int | None
    mse: float
    stderr: float


def closed_form_mse(device_count: int, bits: int) -> float:
    """MSE of feedback-only estimation with an evenly spaced phase codebook:
    2K(1 - (2^N/pi) sin(pi/2^N)) + 1, and 2K + 1 without feedback."""
    if bits == 0:
        return 2.0 * device_count + 1.0
    count = 2 ** bits
    return 2.0 * device_count * (1.0 - (count / math.pi)
                                 * math.sin(math.pi / count)) + 1.0


def read_sweep_csv(path: str) -> list[SweepPoint]:
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            raise SchemaError(f"{path}: empty file")
        missing = [col for col in EXPECTED_COLUMNS if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        points = []
        for line, row in enumerate(reader, start=2):
            try:
                points.append(SweepPoint(
                    variant=row["variant"],
                    device_count=int(row["K"]),
                    bits=int(row["N"]),
                    alpha=float(row["alpha"]) if row["alpha"] else None,
                    period=int(row["T"]) if row["T"] else None,
                    round_index=int(row["t"]) if row["t"] else None,
                    mse=float(row["mse"]),
                    stderr=float(row["stderr"]),
                ))
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}:{line}: bad row ({exc})") from exc
    return points


def read_codebook_levels(path: str) -> np.ndarray:
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: no levels found")
    try:
        return np.array([float(line) for line in lines])
    except ValueError as exc:
        raise SchemaError(f"{path}: expected one number per line ({exc})") from exc


def _match(point: SweepPoint, spec: PlotSpec) -> bool:
    if spec.variant is not None and point.variant != spec.variant:
        return False
    if spec.alpha is not None and point.alpha is not None \
            and not math.isclose(point.alpha, spec.alpha, rel_tol=1e-12):
        return False
    if spec.alpha is not None and point.alpha is None:
        return False
    if spec.period is not None and point.period != spec.period:
        return False
    return True


def _new_figure() -> tuple[Figure, "matplotlib.axes.Axes"]:
    fig = Figure(figsize=(6.4, 4.2), dpi=150)
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot()


def _save(fig: Figure, path: str) -> None:
    if path.endswith(".svg"):
        with matplotlib.rc_context({"svg.hashsalt": _SVG_HASHSALT}):
            fig.savefig(path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(path)


def _series_label(prefix: str, point: SweepPoint) -> str:
    parts = [prefix]
    if point.alpha is not None:
        parts.append(f"alpha={point.alpha:g}")
    if point.period is not None:
        parts.append(f"T={point.period}")
    return ", ".join(parts)


def _render_circle(spec: PlotSpec) -> RenderSummary:
    levels = read_codebook_levels(spec.input_path)
    fig, ax = _new_figure()
    arc = np.linspace(0.0, 2.0 * math.pi, 361)
    ax.plot(np.cos(arc), np.sin(arc), color="0.7", linewidth=1.0)
    ax.plot(np.cos(levels), np.sin(levels), "o", color="tab:blue",
            markersize=8, label=f"{levels.size} levels")
    for level in levels:
        ax.annotate(f"{level:.3f}", (math.cos(level), math.sin(level)),
                    textcoords="offset points", xytext=(6, 6), fontsize=7)
    ax.set_aspect("equal")
    ax.set_xlim(-1.35, 1.35)
    ax.set_ylim(-1.35, 1.35)
    ax.set_xlabel("in-phase")
    ax.set_ylabel("quadrature")
    ax.set_title("quantizer levels on the unit circle")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output_path)
    return RenderSummary(spec.output_path, series=1, points=int(levels.size))


def _render_bits(spec: PlotSpec) -> RenderSummary:
    points = [p for p in read_sweep_csv(spec.input_path)
              if p.round_index is None and _match(p, spec)]
    if not points:
        raise EmptySelectionError(f"{spec.input_path}: no rows match the filters")
    fig, ax = _new_figure()
    series = 0

    feedback_only = sorted((p for p in points if p.variant == "a"),
                           key=lambda p: p.bits)
    if feedback_only:
        bits = [p.bits for p in feedback_only]
        ax.errorbar(bits, [p.mse for p in feedback_only],
                    yerr=[ERROR_BAR_SIGMA * p.stderr for p in feedback_only],
                    fmt="o", color="tab:blue", capsize=3,
                    label="feedback only (empirical)")
        analytic = [closed_form_mse(p.device_count, p.bits)
                    for p in feedback_only]
        ax.plot(bits, analytic, "-", color="tab:blue", alpha=0.6,
                label="feedback only (closed form)")
        series += 2

    reciprocity = [p for p in points if p.variant == "b"]
    groups = sorted({(p.alpha, p.period) for p in reciprocity})
    for alpha, period in groups:
        group = sorted((p for p in reciprocity
                        if p.alpha == alpha and p.period == period),
                       key=lambda p: p.bits)
        ax.errorbar([p.bits for p in group], [p.mse for p in group],
                    yerr=[ERROR_BAR_SIGMA * p.stderr for p in group],
                    fmt="s--", capsize=3,
                    label=_series_label("reciprocity + feedback", group[0]))
        series += 1

    ax.set_yscale("log")
    ax.set_xlabel("feedback bits N")
    ax.set_ylabel("MSE")
    ax.set_title("aggregation MSE vs feedback resolution")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output_path)
    return RenderSummary(spec.output_path, series=series, points=len(points))


def _render_period(spec: PlotSpec) -> RenderSummary:
    points = [p for p in read_sweep_csv(spec.input_path)
              if p.round_index is not None and _match(p, spec)]
    if not points:
        raise EmptySelectionError(f"{spec.input_path}: no rows match the filters")
    fig, ax = _new_figure()
    groups = sorted({(p.alpha, p.period, p.bits) for p in points})
    for alpha, period, bits in groups:
        group = sorted((p for p in points if p.alpha == alpha
                        and p.period == period and p.bits == bits),
                       key=lambda p: p.round_index)
        ax.errorbar([p.round_index for p in group], [p.mse for p in group],
                    yerr=[ERROR_BAR_SIGMA * p.stderr for p in group],
                    fmt="o-", capsize=3, markersize=3,
                    label=_series_label(f"N={bits}", group[0]))
    ax.set_yscale("log")
    ax.set_xlabel("rounds since calibration t")
    ax.set_ylabel("MSE")
    ax.set_title("aggregation MSE across a calibration cycle")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output_path)
    return RenderSummary(spec.output_path, series=len(groups), points=len(points))


def render(spec: PlotSpec) -> RenderSummary:
    """Render one chart; returns a summary of what was drawn.

    Raises FileNotFoundError for a missing input, SchemaError when the input
    does not match the expected layout, and EmptySelectionError when the
    filters select nothing."""
    if spec.kind is FigureKind.QUANTIZER_CIRCLE:
        return _render_circle(spec)
    if spec.kind is FigureKind.MSE_VS_BITS:
        return _render_bits(spec)
    if spec.kind is FigureKind.MSE_VS_PERIOD:
        return _render_period(spec)
    raise ValueError(f"unknown figure kind {spec.kind!r}")
