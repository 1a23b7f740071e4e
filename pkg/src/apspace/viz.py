"""Deterministic SVG scatter plots, emitted as plain text.

No plotting library: every element is written with fixed formatting
(coordinates at 2 decimals), so the same inputs always produce the same
bytes.  Two plot families:

* mini plots — one algorithm axis vs another, scores normalized by the
  max among the datasets actually plotted, ticks at 0 / 0.5 / 1;
* PCA scatter — a 2-component projection, optionally colored by a
  per-dataset metric on a two-color gradient.

Every point is a ``<circle>`` carrying a ``<title>`` child with the
dataset name, which browsers show as a hover tooltip.
"""

import re
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .core import (ApsError, LengthMismatchError, PerformanceMatrix,
                   UnknownAlgorithmError, ZeroColumnError)
from .pca import BadComponentCountError, PcaProjection

_HEX_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")

_POINT_COLOR = "#4477aa"
_HIGHLIGHT_FALLBACK = "#cc3311"
_GRADIENT_LOW = "#2c7bb6"
_GRADIENT_HIGH = "#d7191c"
_NEUTRAL = "#999999"
_AXIS_COLOR = "#333333"

_MARGIN_LEFT = 62.0
_MARGIN_RIGHT = 18.0
_MARGIN_TOP = 18.0
_MARGIN_BOTTOM = 78.0


class NoPlottablePointsError(ApsError):
    """No dataset has a present score on both requested axes."""


class SameAlgorithmError(ApsError):
    """A scatter of an algorithm against itself was requested."""


def _check_color(value: str, what: str) -> str:
    if not _HEX_COLOR.match(value):
        raise ValueError(f"{what} must be #rrggbb, got {value!r}")
    return value


@dataclass(frozen=True)
class HighlightGroup:
    """Color every dataset whose name starts with ``prefix``."""

    name: str
    prefix: str
    color: str = _HIGHLIGHT_FALLBACK

    def __post_init__(self):
        if not self.name:
            raise ValueError("highlight group needs a name")
        if not self.prefix:
            raise ValueError(f"highlight group {self.name!r} needs a prefix")
        _check_color(self.color, f"highlight group {self.name!r} color")


@dataclass(frozen=True)
class PlotSpec:
    """Rendering knobs shared by all plot kinds."""

    width_px: float = 600.0
    height_px: float = 600.0
    point_radius_px: float = 4.0
    point_color: str = _POINT_COLOR
    highlight_groups: tuple[HighlightGroup, ...] = ()
    color_by: str | None = None

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("plot dimensions must be positive")
        if self.point_radius_px <= 0:
            raise ValueError("point radius must be positive")
        _check_color(self.point_color, "point color")


@dataclass(frozen=True)
class GridResult:
    """All pairwise mini plots plus warnings for the skipped pairs."""

    plots: tuple[tuple[str, str], ...]   # (label, svg document)
    warnings: tuple[str, ...]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _lerp_color(low: str, high: str, t: float) -> str:
    channels = []
    for i in (1, 3, 5):
        a, b = int(low[i:i + 2], 16), int(high[i:i + 2], 16)
        channels.append(round(a + (b - a) * t))
    return "#{:02x}{:02x}{:02x}".format(*channels)


def _highlight_group_index(name: str, spec: PlotSpec) -> int | None:
    """Index of the first group whose prefix matches, else None."""
    for i, group in enumerate(spec.highlight_groups):
        if name.startswith(group.prefix):
            return i
    return None


def _layer_circles(entries: list[tuple[str, str]], spec: PlotSpec) -> list[str]:
    """Order circles so highlighted groups land on top, group by group."""
    plain = []
    by_group: list[list[str]] = [[] for _ in spec.highlight_groups]
    for name, circle in entries:
        gi = _highlight_group_index(name, spec)
        (plain if gi is None else by_group[gi]).append(circle)
    return plain + [c for group in by_group for c in group]


class _Frame:
    """Maps unit/data coordinates onto the pixel plot area."""

    def __init__(self, spec: PlotSpec):
        self.spec = spec
        self.left = _MARGIN_LEFT
        self.right = spec.width_px - _MARGIN_RIGHT
        self.top = _MARGIN_TOP
        self.bottom = spec.height_px - _MARGIN_BOTTOM

    def x(self, frac: float) -> float:
        return self.left + frac * (self.right - self.left)

    def y(self, frac: float) -> float:
        return self.bottom - frac * (self.bottom - self.top)


def _open_svg(spec: PlotSpec) -> list[str]:
    w, h = _fmt(spec.width_px), _fmt(spec.height_px)
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0.00" y="0.00" width="{w}" height="{h}" fill="#ffffff"/>',
    ]


def _axes(frame: _Frame, x_label: str, y_label: str,
          tick_labels: tuple[str, str, str]) -> list[str]:
    """Plot border, 0/0.5/1 ticks on both axes, and axis titles."""
    parts = []
    parts.append(
        f'<rect x="{_fmt(frame.left)}" y="{_fmt(frame.top)}" '
        f'width="{_fmt(frame.right - frame.left)}" '
        f'height="{_fmt(frame.bottom - frame.top)}" '
        f'fill="none" stroke="{_AXIS_COLOR}" stroke-width="1"/>')
    for frac, label in zip((0.0, 0.5, 1.0), tick_labels):
        px = frame.x(frac)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(frame.bottom)}" '
            f'x2="{_fmt(px)}" y2="{_fmt(frame.bottom + 5)}" '
            f'stroke="{_AXIS_COLOR}" stroke-width="1"/>')
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(frame.bottom + 18)}" '
            f'font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{escape(label)}</text>')
        py = frame.y(frac)
        parts.append(
            f'<line x1="{_fmt(frame.left - 5)}" y1="{_fmt(py)}" '
            f'x2="{_fmt(frame.left)}" y2="{_fmt(py)}" '
            f'stroke="{_AXIS_COLOR}" stroke-width="1"/>')
        parts.append(
            f'<text x="{_fmt(frame.left - 8)}" y="{_fmt(py + 4)}" '
            f'font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{escape(label)}</text>')
    mid_x = (frame.left + frame.right) / 2
    mid_y = (frame.top + frame.bottom) / 2
    parts.append(
        f'<text x="{_fmt(mid_x)}" y="{_fmt(frame.bottom + 38)}" '
        f'font-family="sans-serif" font-size="13" '
        f'text-anchor="middle">{escape(x_label)}</text>')
    parts.append(
        f'<text x="{_fmt(frame.left - 40)}" y="{_fmt(mid_y)}" '
        f'font-family="sans-serif" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 {_fmt(frame.left - 40)} {_fmt(mid_y)})">'
        f'{escape(y_label)}</text>')
    return parts


def _circle(cx: float, cy: float, r: float, fill: str, title: str) -> str:
    return (f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'fill="{fill}"><title>{escape(title)}</title></circle>')


def mini_aps_svg(matrix: PerformanceMatrix, algo_x: str, algo_y: str,
                 spec: PlotSpec | None = None) -> str:
    """One 2-D slice of the space: ``algo_x`` scores against ``algo_y``.

    Only datasets with a present score on *both* axes appear; each axis
    is normalized by its own max among those datasets, so the best
    plotted dataset per axis sits at 1.0.  Highlighted groups (by name
    prefix) are drawn after the plain points so they stay visible.
    """
    spec = spec or PlotSpec()
    if algo_x == algo_y:
        raise SameAlgorithmError(
            f"cannot plot algorithm {algo_x!r} against itself")
    jx = matrix.algorithm_index(algo_x)
    jy = matrix.algorithm_index(algo_y)
    plotted = [(d, row[jx], row[jy])
               for d, row in zip(matrix.datasets, matrix.cells)
               if row[jx] is not None and row[jy] is not None]
    if not plotted:
        raise NoPlottablePointsError(
            f"no dataset has scores for both {algo_x!r} and {algo_y!r}")
    max_x = max(v for _, v, _ in plotted)
    max_y = max(v for _, _, v in plotted)
    if max_x <= 0.0:
        raise ZeroColumnError(
            f"axis {algo_x!r} has no positive score among plotted datasets")
    if max_y <= 0.0:
        raise ZeroColumnError(
            f"axis {algo_y!r} has no positive score among plotted datasets")
    frame = _Frame(spec)
    parts = _open_svg(spec)
    parts += _axes(frame, algo_x, algo_y, ("0", "0.5", "1"))
    entries = []
    for d, vx, vy in plotted:
        gi = _highlight_group_index(d, spec)
        color = spec.highlight_groups[gi].color if gi is not None \
            else spec.point_color
        circle = _circle(frame.x(vx / max_x), frame.y(vy / max_y),
                         spec.point_radius_px, color, d)
        entries.append((d, circle))
    parts += _layer_circles(entries, spec)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def mini_aps_grid(matrix: PerformanceMatrix, spec: PlotSpec | None = None,
                  ordered: bool = False) -> GridResult:
    """Every pairwise mini plot, labeled ``<x>_vs_<y>``.

    Unordered pairs by default (x before y in matrix column order);
    ``ordered=True`` renders both orientations.  Pairs with no common
    dataset are skipped with a warning instead of failing the batch.
    """
    if matrix.n_algorithms < 2:
        raise ValueError("grid needs at least 2 algorithms")
    if ordered:
        pairs = [(x, y) for x in matrix.algorithms
                 for y in matrix.algorithms if x != y]
    else:
        pairs = [(matrix.algorithms[i], matrix.algorithms[j])
                 for i in range(matrix.n_algorithms)
                 for j in range(i + 1, matrix.n_algorithms)]
    plots, warnings = [], []
    for x, y in pairs:
        try:
            svg = mini_aps_svg(matrix, x, y, spec)
        except NoPlottablePointsError:
            warnings.append(f"{x} vs {y}: no datasets with both scores; skipped")
            continue
        plots.append((f"{x}_vs_{y}", svg))
    return GridResult(plots=tuple(plots), warnings=tuple(warnings))


def _legend(frame: _Frame, title: str, low_label: str, high_label: str,
            constant: bool) -> list[str]:
    """Horizontal gradient strip under the x-axis title."""
    parts = []
    y = frame.bottom + 48.0
    x0 = frame.left
    seg_w = 20.0
    parts.append(
        f'<text x="{_fmt(x0)}" y="{_fmt(y + 11)}" font-family="sans-serif" '
        f'font-size="11" text-anchor="end">{escape(title)}:&#160;</text>')
    if constant:
        parts.append(
            f'<rect x="{_fmt(x0 + 4)}" y="{_fmt(y)}" width="{_fmt(seg_w)}" '
            f'height="14.00" fill="{_GRADIENT_LOW}"/>')
        parts.append(
            f'<text x="{_fmt(x0 + seg_w + 10)}" y="{_fmt(y + 11)}" '
            f'font-family="sans-serif" font-size="11">'
            f'{escape(low_label)}</text>')
        return parts
    for i in range(8):
        color = _lerp_color(_GRADIENT_LOW, _GRADIENT_HIGH, i / 7.0)
        parts.append(
            f'<rect x="{_fmt(x0 + 4 + i * seg_w)}" y="{_fmt(y)}" '
            f'width="{_fmt(seg_w)}" height="14.00" fill="{color}"/>')
    parts.append(
        f'<text x="{_fmt(x0 + 4)}" y="{_fmt(y + 26)}" '
        f'font-family="sans-serif" font-size="11" text-anchor="start">'
        f'{escape(low_label)}</text>')
    parts.append(
        f'<text x="{_fmt(x0 + 4 + 8 * seg_w)}" y="{_fmt(y + 26)}" '
        f'font-family="sans-serif" font-size="11" text-anchor="end">'
        f'{escape(high_label)}</text>')
    return parts


def pca_scatter_svg(projection: PcaProjection,
                    metric_values=None,
                    spec: PlotSpec | None = None) -> str:
    """Scatter of a 2-component projection.

    Axis labels carry the explained-variance share of each component at
    two significant figures.  When ``metric_values`` is given (one value
    per projected dataset, ``None`` entries allowed), points are filled
    on a low-to-high gradient with a legend; missing values render
    neutral gray.  A constant metric gets a single-swatch legend.
    """
    spec = spec or PlotSpec()
    if projection.coordinates.shape[1] != 2:
        raise BadComponentCountError(
            "scatter needs a 2-component projection, got "
            f"{projection.coordinates.shape[1]}")
    names = projection.dataset_ids
    if metric_values is not None and len(metric_values) != len(names):
        raise LengthMismatchError(
            f"{len(metric_values)} metric values for {len(names)} datasets")
    xs = projection.coordinates[:, 0]
    ys = projection.coordinates[:, 1]
    spans = []
    for arr in (xs, ys):
        lo, hi = float(arr.min()), float(arr.max())
        pad = 0.05 * (hi - lo) if hi > lo else 0.5
        spans.append((lo - pad, hi + pad))
    (x_lo, x_hi), (y_lo, y_hi) = spans
    frame = _Frame(spec)
    pct = [float(r) * 100.0 for r in projection.explained_variance_ratio[:2]]
    x_label = f"component 1 ({pct[0]:.2g}% of variance)"
    y_label = f"component 2 ({pct[1]:.2g}% of variance)"
    tick_of = lambda lo, hi: (f"{lo:.2f}", f"{(lo + hi) / 2:.2f}", f"{hi:.2f}")
    parts = _open_svg(spec)
    parts += _axes(frame, x_label, y_label, tick_of(x_lo, x_hi))

    fills: list[str]
    constant_metric = False
    if metric_values is not None:
        present = [v for v in metric_values if v is not None]
        if not present:
            raise NoPlottablePointsError("every metric value is missing")
        v_lo, v_hi = min(present), max(present)
        constant_metric = v_hi == v_lo
        fills = []
        for v in metric_values:
            if v is None:
                fills.append(_NEUTRAL)
            elif constant_metric:
                fills.append(_GRADIENT_LOW)
            else:
                fills.append(_lerp_color(_GRADIENT_LOW, _GRADIENT_HIGH,
                                         (v - v_lo) / (v_hi - v_lo)))
    else:
        fills = []
        for d in names:
            gi = _highlight_group_index(d, spec)
            fills.append(spec.highlight_groups[gi].color if gi is not None
                         else spec.point_color)

    def place(i: int) -> str:
        fx = (float(xs[i]) - x_lo) / (x_hi - x_lo)
        fy = (float(ys[i]) - y_lo) / (y_hi - y_lo)
        return _circle(frame.x(fx), frame.y(fy), spec.point_radius_px,
                       fills[i], names[i])

    if metric_values is None and spec.highlight_groups:
        parts += _layer_circles(
            [(d, place(i)) for i, d in enumerate(names)], spec)
    else:
        parts += [place(i) for i in range(len(names))]

    if metric_values is not None:
        title = spec.color_by or "metric"
        if constant_metric:
            parts += _legend(frame, title, f"{v_lo:.4f}", "", True)
        else:
            parts += _legend(frame, title, f"{v_lo:.4f}", f"{v_hi:.4f}", False)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
