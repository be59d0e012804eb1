"""Result serialisation (CSV) and figure rendering (standalone SVG).

Everything here is byte-deterministic: floats are written with fixed
formats (``%.9g`` in CSVs, fixed decimals in SVG coordinates), rows are
emitted in a canonical order, and no timestamps or environment details
leak into the output.  Writing the same results twice yields identical
bytes, and parsing a samples CSV and re-serialising it reproduces the
file exactly (9 significant decimal digits round-trip cleanly through a
double).

Figures are self-contained SVG documents assembled directly as XML --
no plotting library, so rendering is reproducible across environments.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .core import Modality, Style
from .experiment import PhiMatrix
from .infotheory import DensityCurve
from .metrics import SampleRecord

__all__ = [
    "SAMPLES_CSV_HEADER",
    "SUMMARY_CSV_HEADER",
    "FigureSpec",
    "MODALITY_COLORS",
    "condition_column",
    "write_samples_csv",
    "read_samples_csv",
    "write_summary_csv",
    "write_phi_csv",
    "render_mean_tradeoff",
    "render_scatter",
    "render_heatmap",
    "render_kde",
]

SAMPLES_CSV_HEADER = (
    "domain,modality,style,sample_id,i_m,load,ce,duration_s,"
    "msg_entropy_bits,q_true,trust,tce,degenerate"
)
SUMMARY_CSV_HEADER = (
    "modality,style,mean_ce,var_ce,mean_tce,var_tce,"
    "pooled_i_m,mean_load,phi_default"
)

MODALITY_COLORS: Mapping[Modality, str] = {
    Modality.TEXT: "#1f77b4",  # blue
    Modality.VOICE: "#d62728",  # red
}

_FIGURE_KINDS = ("mean_tradeoff", "sample_scatter", "phi_heatmap", "sweep_heatmap", "kde")
_STYLE_ORDER = {style: i for i, style in enumerate(Style)}
_MODALITY_ORDER = {modality: i for i, modality in enumerate(Modality)}


@dataclass(frozen=True)
class FigureSpec:
    """Presentation parameters shared by every renderer."""

    kind: str
    title: str
    width_px: int = 640
    height_px: int = 480
    color_map: Mapping[Modality, str] = field(
        default_factory=lambda: dict(MODALITY_COLORS)
    )

    def __post_init__(self) -> None:
        if self.kind not in _FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}: expected one of {_FIGURE_KINDS}"
            )
        if self.width_px < 100 or self.height_px < 100:
            raise ValueError("figure dimensions must be at least 100px")


def _fmt(value: float) -> str:
    """CSV float format: 9 significant digits, shortest form."""
    return "%.9g" % value


def condition_column(modality: Modality, style: Style) -> str:
    """Column name for a condition in phi CSVs, e.g. ``text_brief``."""
    return f"{modality.value}_{style.value}"


def _record_sort_key(rec: SampleRecord) -> tuple:
    return (
        rec.domain,
        _MODALITY_ORDER[rec.modality],
        _STYLE_ORDER[rec.style],
        rec.sample_id,
    )


# ---------------------------------------------------------------------------
# CSV writers / readers
# ---------------------------------------------------------------------------


def write_samples_csv(records: Sequence[SampleRecord], path: str | Path) -> None:
    """Write per-sample records, one row each, in canonical order.

    Canonical order is (domain, modality, style, sample_id) with modality
    and style in their declaration order (text before voice; brief,
    detailed, analogy).  An empty record set writes the header only.
    """
    lines = [SAMPLES_CSV_HEADER]
    for r in sorted(records, key=_record_sort_key):
        lines.append(
            ",".join(
                [
                    r.domain,
                    r.modality.value,
                    r.style.value,
                    str(r.sample_id),
                    _fmt(r.i_m),
                    _fmt(r.load),
                    _fmt(r.ce),
                    _fmt(r.duration_s),
                    _fmt(r.message_entropy_bits),
                    _fmt(r.q_true),
                    _fmt(r.trust),
                    _fmt(r.tce_abs),
                    "true" if r.degenerate else "false",
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_samples_csv(path: str | Path) -> tuple[SampleRecord, ...]:
    """Parse a samples CSV back into records (inverse of the writer)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != SAMPLES_CSV_HEADER:
            raise ValueError(
                f"{path}: line 1: expected header {SAMPLES_CSV_HEADER!r}"
            )
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {line_no}: expected {len(header)} cells, "
                    f"got {len(row)}"
                )
            try:
                records.append(
                    SampleRecord(
                        domain=row[0],
                        modality=Modality(row[1]),
                        style=Style(row[2]),
                        sample_id=int(row[3]),
                        i_m=float(row[4]),
                        load=float(row[5]),
                        ce=float(row[6]),
                        duration_s=float(row[7]),
                        message_entropy_bits=float(row[8]),
                        q_true=float(row[9]),
                        trust=float(row[10]),
                        tce_abs=float(row[11]),
                        degenerate={"true": True, "false": False}[row[12]],
                    )
                )
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from None
    return tuple(records)


def write_summary_csv(summaries: Sequence, path: str | Path) -> None:
    """Write one row of aggregates per (modality, style) condition."""
    lines = [SUMMARY_CSV_HEADER]
    ordered = sorted(
        summaries, key=lambda s: (_MODALITY_ORDER[s.modality], _STYLE_ORDER[s.style])
    )
    for s in ordered:
        lines.append(
            ",".join(
                [
                    s.modality.value,
                    s.style.value,
                    _fmt(s.mean_ce),
                    _fmt(s.var_ce),
                    _fmt(s.mean_tce),
                    _fmt(s.var_tce),
                    _fmt(s.pooled_i_m),
                    _fmt(s.mean_load),
                    _fmt(s.phi_default),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_phi_csv(matrix: PhiMatrix, path: str | Path) -> None:
    """Write composite scores: first column lambda2, one column per condition."""
    header = ["lambda2"] + [condition_column(m, s) for m, s in matrix.conditions]
    lines = [",".join(header)]
    for l2, row in zip(matrix.lambda2_values, matrix.phi):
        lines.append(",".join([_fmt(l2)] + [_fmt(v) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


# ---------------------------------------------------------------------------
# SVG primitives
# ---------------------------------------------------------------------------

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 48, 56


def _px(value: float) -> str:
    return "%.2f" % value


def _tick_label(value: float) -> str:
    return "%.3g" % value


def _padded_range(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        return lo - 0.5, (hi if hi > lo else lo) + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class _Plot:
    """Linear data->pixel mapping plus shared axis furniture."""

    def __init__(
        self,
        spec: FigureSpec,
        x_range: tuple[float, float],
        y_range: tuple[float, float],
        x_label: str,
        y_label: str,
    ) -> None:
        self.spec = spec
        self.x_lo, self.x_hi = _padded_range(*x_range)
        self.y_lo, self.y_hi = _padded_range(*y_range)
        self.left = _MARGIN_L
        self.top = _MARGIN_T
        self.width = spec.width_px - _MARGIN_L - _MARGIN_R
        self.height = spec.height_px - _MARGIN_T - _MARGIN_B
        self.x_label = x_label
        self.y_label = y_label

    def x(self, value: float) -> float:
        frac = (value - self.x_lo) / (self.x_hi - self.x_lo)
        return self.left + frac * self.width

    def y(self, value: float) -> float:
        frac = (value - self.y_lo) / (self.y_hi - self.y_lo)
        return self.top + self.height - frac * self.height

    def furniture(self) -> list[str]:
        right = self.left + self.width
        bottom = self.top + self.height
        parts = [
            f'<rect x="{self.left}" y="{self.top}" width="{self.width}" '
            f'height="{self.height}" fill="none" stroke="#444444" stroke-width="1"/>'
        ]
        for i in range(5):
            xv = self.x_lo + i * (self.x_hi - self.x_lo) / 4.0
            yv = self.y_lo + i * (self.y_hi - self.y_lo) / 4.0
            xp, yp = self.x(xv), self.y(yv)
            parts.append(
                f'<line x1="{_px(xp)}" y1="{bottom}" x2="{_px(xp)}" '
                f'y2="{bottom + 5}" stroke="#444444" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_px(xp)}" y="{bottom + 18}" font-size="11" '
                f'text-anchor="middle" font-family="sans-serif">'
                f"{escape(_tick_label(xv))}</text>"
            )
            parts.append(
                f'<line x1="{self.left - 5}" y1="{_px(yp)}" x2="{self.left}" '
                f'y2="{_px(yp)}" stroke="#444444" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{self.left - 8}" y="{_px(yp + 4)}" font-size="11" '
                f'text-anchor="end" font-family="sans-serif">'
                f"{escape(_tick_label(yv))}</text>"
            )
        mid_x = self.left + self.width / 2.0
        mid_y = self.top + self.height / 2.0
        parts.append(
            f'<text x="{_px(mid_x)}" y="{bottom + 38}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif">'
            f"{escape(self.x_label)}</text>"
        )
        parts.append(
            f'<text x="18" y="{_px(mid_y)}" font-size="13" text-anchor="middle" '
            f'font-family="sans-serif" transform="rotate(-90 18 {_px(mid_y)})">'
            f"{escape(self.y_label)}</text>"
        )
        return parts


def _svg_document(spec: FigureSpec, body: Sequence[str]) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width_px}" '
        f'height="{spec.height_px}" '
        f'viewBox="0 0 {spec.width_px} {spec.height_px}">',
        f'<rect width="{spec.width_px}" height="{spec.height_px}" fill="#ffffff"/>',
        f'<text x="{spec.width_px // 2}" y="24" font-size="15" '
        f'text-anchor="middle" font-family="sans-serif" font-weight="bold">'
        f"{escape(spec.title)}</text>",
    ]
    return "\n".join(head + list(body) + ["</svg>"]) + "\n"


def _write_svg(path: str | Path, content: str) -> None:
    Path(path).write_text(content, newline="\n")


def _star_path(cx: float, cy: float, radius: float) -> str:
    points = []
    for i in range(10):
        r = radius if i % 2 == 0 else radius * 0.45
        angle = -math.pi / 2.0 + i * math.pi / 5.0
        points.append(f"{_px(cx + r * math.cos(angle))},{_px(cy + r * math.sin(angle))}")
    return "M" + " L".join(points) + " Z"


def _legend(spec: FigureSpec, x: float, y: float) -> list[str]:
    parts = []
    for i, modality in enumerate(Modality):
        row_y = y + 18 * i
        parts.append(
            f'<rect x="{_px(x)}" y="{_px(row_y)}" width="12" height="12" '
            f'fill="{spec.color_map[modality]}"/>'
        )
        parts.append(
            f'<text x="{_px(x + 17)}" y="{_px(row_y + 10)}" font-size="12" '
            f'font-family="sans-serif">{escape(modality.value)}</text>'
        )
    return parts


def _condition_means(
    records: Sequence[SampleRecord],
) -> list[tuple[Modality, Style, float, float]]:
    """(modality, style, mean_tce, mean_ce) over non-degenerate samples."""
    means = []
    for modality in Modality:
        for style in Style:
            cell = [
                r
                for r in records
                if r.modality is modality and r.style is style and not r.degenerate
            ]
            if cell:
                means.append(
                    (
                        modality,
                        style,
                        fmean(r.tce_abs for r in cell),
                        fmean(r.ce for r in cell),
                    )
                )
    return means


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------


def render_mean_tradeoff(
    records: Sequence[SampleRecord], spec: FigureSpec, path: str | Path
) -> None:
    """Condition means in the (TCE, CE) plane, linked per modality.

    Each condition is one filled circle in its modality's colour with a
    style label; the three styles of a modality are joined by a line to
    show the trade-off path.  Raises ``ValueError`` (writing nothing)
    when there are no usable samples.
    """
    means = _condition_means(records)
    if not means:
        raise ValueError("no non-degenerate samples to plot")
    plot = _Plot(
        spec,
        (min(m[2] for m in means), max(m[2] for m in means)),
        (min(m[3] for m in means), max(m[3] for m in means)),
        "trust calibration error (mean)",
        "comprehension efficiency (mean)",
    )
    body = plot.furniture()
    for modality in Modality:
        pts = [m for m in means if m[0] is modality]
        if len(pts) > 1:
            coords = " ".join(f"{_px(plot.x(p[2]))},{_px(plot.y(p[3]))}" for p in pts)
            body.append(
                f'<polyline points="{coords}" fill="none" '
                f'stroke="{spec.color_map[modality]}" stroke-width="1.5" '
                f'stroke-dasharray="4 3"/>'
            )
    for modality, style, tce, ce in means:
        cx, cy = plot.x(tce), plot.y(ce)
        body.append(
            f'<circle cx="{_px(cx)}" cy="{_px(cy)}" r="6" '
            f'fill="{spec.color_map[modality]}"/>'
        )
        body.append(
            f'<text x="{_px(cx + 9)}" y="{_px(cy - 6)}" font-size="11" '
            f'font-family="sans-serif">{escape(style.value)}</text>'
        )
    body.extend(_legend(spec, plot.left + plot.width - 70, plot.top + 8))
    _write_svg(path, _svg_document(spec, body))


def render_scatter(
    records: Sequence[SampleRecord], spec: FigureSpec, path: str | Path
) -> None:
    """Per-sample (TCE, CE) cloud plus one star per condition mean.

    Samples are 30%-opacity circles coloured by modality; condition
    means are stars with their style name attached.  Degenerate samples
    are excluded.  Raises ``ValueError`` (writing nothing) when there
    are no usable samples.
    """
    usable = sorted(
        (r for r in records if not r.degenerate), key=_record_sort_key
    )
    if not usable:
        raise ValueError("no non-degenerate samples to plot")
    means = _condition_means(usable)
    xs = [r.tce_abs for r in usable] + [m[2] for m in means]
    ys = [r.ce for r in usable] + [m[3] for m in means]
    plot = _Plot(
        spec,
        (min(xs), max(xs)),
        (min(ys), max(ys)),
        "trust calibration error",
        "comprehension efficiency",
    )
    body = plot.furniture()
    for r in usable:
        body.append(
            f'<circle cx="{_px(plot.x(r.tce_abs))}" cy="{_px(plot.y(r.ce))}" '
            f'r="3" fill="{spec.color_map[r.modality]}" fill-opacity="0.3"/>'
        )
    for modality, style, tce, ce in means:
        cx, cy = plot.x(tce), plot.y(ce)
        body.append(
            f'<path d="{_star_path(cx, cy, 9)}" fill="{spec.color_map[modality]}" '
            f'stroke="#222222" stroke-width="0.8"/>'
        )
        body.append(
            f'<text x="{_px(cx + 11)}" y="{_px(cy + 4)}" font-size="11" '
            f'font-family="sans-serif">{escape(style.value)}</text>'
        )
    body.extend(_legend(spec, plot.left + plot.width - 70, plot.top + 8))
    _write_svg(path, _svg_document(spec, body))


def _heat_color(t: float) -> str:
    """Monotone single-hue scale: light (#f7fbff) -> dark blue (#08306b)."""
    lo, hi = (0xF7, 0xFB, 0xFF), (0x08, 0x30, 0x6B)
    return "#%02x%02x%02x" % tuple(
        round(a + (b - a) * t) for a, b in zip(lo, hi)
    )


def render_heatmap(
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    values: Sequence[Sequence[float]],
    spec: FigureSpec,
    path: str | Path,
) -> None:
    """Grid of values as shaded cells, each printing its value to 3 dp.

    The colour scale is monotone (lighter = smaller, darker = larger);
    the observed minimum and maximum are annotated under the grid.  Cell
    text flips to white on dark backgrounds.
    """
    n_rows, n_cols = len(row_labels), len(col_labels)
    if n_rows == 0 or n_cols == 0 or len(values) != n_rows:
        raise ValueError("heatmap needs a non-empty rows x cols grid")
    for row in values:
        if len(row) != n_cols:
            raise ValueError("heatmap rows must all match the column labels")
    flat = [v for row in values for v in row]
    v_lo, v_hi = min(flat), max(flat)
    span = v_hi - v_lo

    left, top = _MARGIN_L + 8, _MARGIN_T
    grid_w = spec.width_px - left - _MARGIN_R
    grid_h = spec.height_px - top - _MARGIN_B
    cell_w, cell_h = grid_w / n_cols, grid_h / n_rows

    body = []
    for i, r_label in enumerate(row_labels):
        for j, c_label in enumerate(col_labels):
            v = values[i][j]
            t = 0.5 if span == 0.0 else (v - v_lo) / span
            x0, y0 = left + j * cell_w, top + i * cell_h
            body.append(
                f'<rect x="{_px(x0)}" y="{_px(y0)}" width="{_px(cell_w)}" '
                f'height="{_px(cell_h)}" fill="{_heat_color(t)}" '
                f'stroke="#ffffff" stroke-width="1"/>'
            )
            text_fill = "#ffffff" if t > 0.6 else "#111111"
            body.append(
                f'<text x="{_px(x0 + cell_w / 2)}" y="{_px(y0 + cell_h / 2 + 4)}" '
                f'font-size="12" text-anchor="middle" fill="{text_fill}" '
                f'font-family="sans-serif">{"%.3f" % v}</text>'
            )
        body.append(
            f'<text x="{_px(left - 6)}" y="{_px(top + i * cell_h + cell_h / 2 + 4)}" '
            f'font-size="11" text-anchor="end" font-family="sans-serif">'
            f"{escape(r_label)}</text>"
        )
    for j, c_label in enumerate(col_labels):
        body.append(
            f'<text x="{_px(left + j * cell_w + cell_w / 2)}" y="{_px(top - 6)}" '
            f'font-size="11" text-anchor="middle" font-family="sans-serif">'
            f"{escape(c_label)}</text>"
        )
    body.append(
        f'<text x="{_px(left)}" y="{_px(top + grid_h + 20)}" font-size="11" '
        f'font-family="sans-serif">'
        f"scale: light = min ({'%.3f' % v_lo}), dark = max ({'%.3f' % v_hi})</text>"
    )
    _write_svg(path, _svg_document(spec, body))


def render_kde(
    curves: Sequence[tuple[Modality, DensityCurve]],
    spec: FigureSpec,
    path: str | Path,
    x_label: str = "value",
) -> None:
    """Density curves on shared axes, one polyline per modality.

    Each curve's trapezoid integral is embedded as an XML comment
    (``<!-- integral text = ... -->``) so consumers can verify unit
    mass without re-deriving it.
    """
    if not curves:
        raise ValueError("no density curves to plot")
    plot = _Plot(
        spec,
        (
            min(float(c.grid.min()) for _, c in curves),
            max(float(c.grid.max()) for _, c in curves),
        ),
        (0.0, max(float(c.density.max()) for _, c in curves)),
        x_label,
        "density",
    )
    body = plot.furniture()
    for modality, curve in curves:
        body.append(
            f"<!-- integral {modality.value} = {'%.7f' % curve.integral()} -->"
        )
        coords = " ".join(
            f"{_px(plot.x(float(gx)))},{_px(plot.y(float(gy)))}"
            for gx, gy in zip(curve.grid, curve.density)
        )
        body.append(
            f'<polyline points="{coords}" fill="none" '
            f'stroke="{spec.color_map[modality]}" stroke-width="1.8"/>'
        )
    body.extend(_legend(spec, plot.left + plot.width - 70, plot.top + 8))
    _write_svg(path, _svg_document(spec, body))
