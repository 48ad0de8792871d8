"""SVG reliability diagrams, cumulative-difference plots and sweep plots.

Documents are plain SVG 1.1 strings built by hand, so the output is
byte-for-byte reproducible and has no plotting-backend dependency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import ValidationError

FONT = "Helvetica, Arial, sans-serif"
BAND_COLOR = "#c8c8c8"
PALETTE = (
    "#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22", "#393b79",
)
DASHES = ("", "6,3", "2,2", "8,3,2,3")
MAX_POLYLINE_POINTS = 8192


class PlotKind(str, enum.Enum):
    RELIABILITY = "reliability"
    CUMULATIVE = "cumulative"
    SWEEP = "sweep"


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    width: int = 640
    height: int = 480
    xlabel: str = ""
    ylabel: str = ""
    kind: PlotKind = PlotKind.RELIABILITY

    def __post_init__(self):
        object.__setattr__(self, "kind", PlotKind(self.kind))
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("plot dimensions must be positive")


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class Frame:
    """Maps data coordinates to pixel coordinates inside the plot area."""

    left, right, top, bottom = 72, 24, 44, 56

    def __init__(self, spec: PlotSpec, xlim, ylim, log_x=False, log_y=False):
        self.spec = spec
        self.log_x, self.log_y = log_x, log_y
        self.x0, self.x1 = (math.log10(v) if log_x else v for v in xlim)
        self.y0, self.y1 = (math.log10(v) if log_y else v for v in ylim)
        self.px0, self.px1 = self.left, spec.width - self.right
        self.py0, self.py1 = spec.height - self.bottom, self.top

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        if self.log_x:
            x = math.log10(x)
        if self.log_y:
            y = math.log10(y)
        u = self.px0 + (x - self.x0) / (self.x1 - self.x0) * (self.px1 - self.px0)
        v = self.py0 + (y - self.y0) / (self.y1 - self.y0) * (self.py1 - self.py0)
        return u, v


class _Doc:
    def __init__(self, spec: PlotSpec):
        self.spec = spec
        self.parts: list[str] = []

    def add(self, tag: str, cls: str | None = None, text: str | None = None, **attrs):
        items = [f'class="{cls}"'] if cls else []
        items += [f"{k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items()]
        head = f"<{tag} {' '.join(items)}"
        if text is None:
            self.parts.append(head + "/>")
        else:
            self.parts.append(f"{head}>{escape(text)}</{tag}>")

    def polyline(self, frame: Frame, pts, cls: str, **style):
        coords = " ".join(f"{_num(u)},{_num(v)}" for u, v in (frame.to_px(x, y) for x, y in pts))
        self.add("polyline", cls, points=coords, fill="none", **style)

    def render(self) -> str:
        w, h = self.spec.width, self.spec.height
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}" font-family="{FONT}">\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(lo + 1e-9), math.ceil(hi - 1e-9)
        # 1-2-5 ticks on short spans, decades otherwise
        mults = (1, 2, 5) if hi - lo < 3 else (1,)
        ticks = [m * 10.0**k for k in range(a, b + 1) for m in mults
                 if lo - 1e-9 <= k + math.log10(m) <= hi + 1e-9]
        return ticks or [10.0**lo, 10.0**hi]
    span = hi - lo
    raw = span / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    k = 0
    while first + k * step <= hi + 1e-9 * span:
        out.append(first + k * step)
        k += 1
    return out


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 and v == int(v) and abs(v) < 1e7:
        return str(int(v))
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.3g}"
    return f"{v:.6g}"


def _axes(doc: _Doc, frame: Frame):
    spec = doc.spec
    doc.add("rect", "frame", x=_num(frame.px0), y=_num(frame.py1),
            width=_num(frame.px1 - frame.px0), height=_num(frame.py0 - frame.py1),
            fill="none", stroke="#000000", stroke_width="1")
    for t in _ticks(frame.x0, frame.x1, frame.log_x):
        u, _ = frame.to_px(t, 10.0**frame.y0 if frame.log_y else frame.y0)
        doc.add("line", "tick", x1=_num(u), y1=_num(frame.py0), x2=_num(u), y2=_num(frame.py0 + 5),
                stroke="#000000")
        doc.add("text", "ticklabel", _tick_label(t), x=_num(u), y=_num(frame.py0 + 18),
                font_size="11", text_anchor="middle")
    for t in _ticks(frame.y0, frame.y1, frame.log_y):
        _, v = frame.to_px(10.0**frame.x0 if frame.log_x else frame.x0, t)
        doc.add("line", "tick", x1=_num(frame.px0 - 5), y1=_num(v), x2=_num(frame.px0), y2=_num(v),
                stroke="#000000")
        doc.add("text", "ticklabel", _tick_label(t), x=_num(frame.px0 - 8), y=_num(v + 4),
                font_size="11", text_anchor="end")
    if spec.title:
        doc.add("text", "title", spec.title, x=_num(spec.width / 2), y="24", font_size="15",
                text_anchor="middle")
    if spec.xlabel:
        doc.add("text", "xlabel", spec.xlabel, x=_num((frame.px0 + frame.px1) / 2),
                y=_num(spec.height - 14), font_size="13", text_anchor="middle")
    if spec.ylabel:
        cx, cy = 18, (frame.py0 + frame.py1) / 2
        doc.add("text", "ylabel", spec.ylabel, x=_num(cx), y=_num(cy), font_size="13",
                text_anchor="middle", transform=f"rotate(-90 {_num(cx)} {_num(cy)})")


def reliability_diagram(bins, band=None, spec: PlotSpec | None = None) -> str:
    """Average response against average score per bin, over the diagonal.

    Bootstrap curves from `band`, if given, are drawn first in light gray.
    """
    bins = list(bins)
    if not bins:
        raise ValidationError("a reliability diagram needs at least one bin")
    spec = spec or PlotSpec(xlabel="average score", ylabel="average response")
    doc = _Doc(spec)
    frame = Frame(spec, (0.0, 1.0), (0.0, 1.0))
    _axes(doc, frame)
    if band is not None:
        for curve in band.curves:
            doc.polyline(frame, curve, "bootstrap", stroke=BAND_COLOR, stroke_width="1")
    doc.polyline(frame, [(0.0, 0.0), (1.0, 1.0)], "diagonal", stroke="#000000", stroke_width="1")
    pts = [(b.avg_score, b.avg_response) for b in bins]
    doc.polyline(frame, pts, "reliability", stroke="#000000", stroke_width="1.5",
                 stroke_dasharray="2,3")
    for x, y in pts:
        u, v = frame.to_px(x, y)
        doc.add("circle", "marker", cx=_num(u), cy=_num(v), r="2.5", fill="#000000")
    return doc.render()


def _thin(x: np.ndarray, y: np.ndarray, limit: int):
    """Keep first, last, min and max of each bucket so extremes survive."""
    if x.size <= limit:
        return x, y
    buckets = np.array_split(np.arange(x.size), limit // 4)
    keep = set()
    for b in buckets:
        seg = y[b]
        keep.update((b[0], b[-1], b[int(np.argmin(seg))], b[int(np.argmax(seg))]))
    idx = np.array(sorted(keep))
    return x[idx], y[idx]


def _legend(doc: _Doc, frame: Frame, lines: list[tuple[str, dict]]):
    x = frame.px0 + 10
    y = frame.py1 + 16
    width = 34 + 6.2 * max(len(label) for label, _ in lines)
    doc.add("rect", "legendbox", x=_num(x - 4), y=_num(y - 13), width=_num(width),
            height=_num(15 * len(lines) + 4), fill="#ffffff", fill_opacity="0.85", stroke="none")
    for label, style in lines:
        if style:
            doc.add("line", "legendkey", x1=_num(x), y1=_num(y - 4), x2=_num(x + 22), y2=_num(y - 4),
                    **style)
        doc.add("text", "legend", label, x=_num(x + (28 if style else 0)), y=_num(y), font_size="11")
        y += 15


def ecce_annotation(report) -> list[str]:
    return [
        f"ECCE-MAD = {report.ecce_mad:.4g}/σₙ = {report.mad_normalized:.4g}"
        f" (P = {report.p_mad:.1E})",
        f"ECCE-R = {report.ecce_r:.4g}/σₙ = {report.r_normalized:.4g}"
        f" (P = {report.p_r:.1E})",
    ]


def cumulative_plot(curve, sigma: float, spec: PlotSpec | None = None, report=None) -> str:
    """C_k against k/n, with a triangle of height 4*sigma at the origin.

    The triangle's vertical side runs from -2 sigma to 2 sigma at k/n = 0
    and its apex sits on the zero line at 1/20 of the axis, so sigma is a
    quarter of its height.
    """
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValidationError("sigma must be positive and finite")
    spec = spec or PlotSpec(xlabel="k/n", ylabel="Cₖ", kind=PlotKind.CUMULATIVE)
    x = np.asarray(curve.abscissas, dtype=np.float64)
    y = np.asarray(curve.values, dtype=np.float64)
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        raise ValidationError("curve values must be finite")
    half = 1.1 * max(float(np.abs(y).max()), 2 * sigma)
    doc = _Doc(spec)
    frame = Frame(spec, (0.0, 1.0), (-half, half))
    _axes(doc, frame)
    doc.polyline(frame, [(0.0, 0.0), (1.0, 0.0)], "zero", stroke="#808080", stroke_width="1")
    tri = [frame.to_px(0.0, -2 * sigma), frame.to_px(0.0, 2 * sigma), frame.to_px(0.05, 0.0)]
    doc.add("polygon", "triangle", points=" ".join(f"{_num(u)},{_num(v)}" for u, v in tri),
            fill="none", stroke="#000000", stroke_width="1")
    xs, ys = _thin(x, y, MAX_POLYLINE_POINTS)
    doc.polyline(frame, zip(xs, ys), "cumulative", stroke="#000000", stroke_width="1.2")
    if report is not None:
        _legend(doc, frame, [(line, {}) for line in ecce_annotation(report)])
    return doc.render()


def _span_is_wide(values) -> bool:
    v = np.asarray(values, dtype=np.float64)
    return bool(np.all(v > 0) and v.max() / v.min() >= 10)


def sweep_plot(result, spec: PlotSpec | None = None) -> str:
    """One line per series of a :class:`SweepResult`, with a legend.

    Axes switch to a log scale when their positive values cover a factor
    of ten or more.
    """
    if not result.series or not result.axis:
        raise ValidationError("nothing to plot: the sweep has no series")
    spec = spec or PlotSpec(xlabel=result.axis_name, kind=PlotKind.SWEEP)
    axis = np.asarray(result.axis, dtype=np.float64)
    allv = np.concatenate([np.asarray(v, dtype=np.float64) for v in result.series.values()])
    log_x = _span_is_wide(axis)
    log_y = _span_is_wide(allv)
    if log_y:
        ylim = (10 ** math.floor(math.log10(allv.min())), 10 ** math.ceil(math.log10(allv.max())))
    else:
        top = float(allv.max()) if allv.max() > 0 else 1.0
        ylim = (min(0.0, float(allv.min())), 1.05 * top)
    xlim = (axis.min(), axis.max()) if axis.max() > axis.min() else (axis.min() - 0.5, axis.max() + 0.5)
    doc = _Doc(spec)
    frame = Frame(spec, xlim, ylim, log_x=log_x, log_y=log_y)
    _axes(doc, frame)
    legend = []
    for i, (key, values) in enumerate(result.series.items()):
        style = dict(stroke=PALETTE[i % len(PALETTE)], stroke_width="1.3")
        dash = DASHES[(i // len(PALETTE)) % len(DASHES)]
        if dash:
            style["stroke_dasharray"] = dash
        doc.polyline(frame, zip(axis, values), "series", **style)
        legend.append((key.replace("/", ", "), style))
    _legend(doc, frame, legend)
    return doc.render()
