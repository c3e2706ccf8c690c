"""Excitability phase diagram: per-epoch train-test divergence against CVS.

Points left of ``-spike_delta`` (test well ahead of train) are structural
discovery; the rest are split by the median-CVS threshold into the optimal
state (at or above) and benign overfitting (below). That boundary rule is a
reconstruction that reproduces the usual region labels, not an established formula.
"""

from __future__ import annotations

import csv
import enum
import io
import statistics
from dataclasses import dataclass, replace
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .datamodel import AnalysisConfig, Trajectory
from .trajectory import epoch_gap


class Region(enum.Enum):
    STRUCTURAL_DISCOVERY = "StructuralDiscovery"
    OPTIMAL = "Optimal"
    BENIGN_OVERFITTING = "BenignOverfitting"


@dataclass(frozen=True)
class PhasePoint:
    epoch: int
    divergence: float  # train - test, percentage points
    cvs: float
    loss: Optional[float] = None
    region: Optional[Region] = None


@dataclass(frozen=True)
class PhaseDiagram:
    points: tuple[PhasePoint, ...]
    excitability_threshold: float

    def region_counts(self) -> dict[Region, int]:
        counts = dict.fromkeys(Region, 0)
        for p in self.points:
            counts[p.region] += 1
        return counts


def build_phase_points(trajectory: Trajectory) -> list[PhasePoint]:
    points = []
    for s in trajectory:
        if s.cvs is None:
            raise ValueError(f"epoch {s.epoch} has no CVS value")
        points.append(PhasePoint(s.epoch, -epoch_gap(s), s.cvs, s.train_loss))
    return points


def excitability_threshold(points: Sequence[PhasePoint]) -> float:
    if not points:
        raise ValueError("no points")
    return statistics.median(p.cvs for p in points)


def classify_region(point: PhasePoint, threshold: float, config: AnalysisConfig = AnalysisConfig()) -> Region:
    if point.divergence <= -config.spike_delta:
        return Region.STRUCTURAL_DISCOVERY
    if point.cvs >= threshold:
        return Region.OPTIMAL
    return Region.BENIGN_OVERFITTING


def build_phase_diagram(trajectory: Trajectory, config: AnalysisConfig = AnalysisConfig()) -> PhaseDiagram:
    points = build_phase_points(trajectory)
    threshold = excitability_threshold(points)
    labelled = tuple(replace(p, region=classify_region(p, threshold, config)) for p in points)
    return PhaseDiagram(labelled, threshold)


# ---------------------------------------------------------------------------
# Rendering

# light -> dark; every channel decreases, so luminance falls monotonically with loss
_LOSS_STOPS = [(255, 245, 235), (253, 141, 60), (127, 39, 4)]
_NEUTRAL = (160, 160, 160)
_REGION_COLORS = {
    Region.STRUCTURAL_DISCOVERY: "#2ca02c",
    Region.OPTIMAL: "#1f77b4",
    Region.BENIGN_OVERFITTING: "#ff7f0e",
}
_REGION_TITLES = {
    Region.STRUCTURAL_DISCOVERY: "Structural Discovery",
    Region.OPTIMAL: "Optimal State",
    Region.BENIGN_OVERFITTING: "Benign Overfitting",
}


def loss_color(t: Optional[float]) -> tuple[int, int, int]:
    """Map normalized loss ``t`` in [0, 1] to an RGB fill; ``None`` gives neutral gray."""
    if t is None:
        return _NEUTRAL
    t = min(max(t, 0.0), 1.0) * (len(_LOSS_STOPS) - 1)
    i = min(int(t), len(_LOSS_STOPS) - 2)
    f = t - i
    lo, hi = _LOSS_STOPS[i], _LOSS_STOPS[i + 1]
    return tuple(round(a + (b - a) * f) for a, b in zip(lo, hi))


def relative_luminance(rgb: tuple[int, int, int]) -> float:
    def channel(c):
        c /= 255.0
        return c / 12.92 if c <= 0.03928 else ((c + 0.055) / 1.055) ** 2.4

    r, g, b = (channel(c) for c in rgb)
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 480
    margin_left: int = 70
    margin_right: int = 30
    margin_top: int = 40
    margin_bottom: int = 60
    point_radius: float = 6.0
    x_range: Optional[tuple[float, float]] = None
    y_range: Optional[tuple[float, float]] = None
    padding: float = 0.10
    title: str = "Excitability phase diagram"


def _padded(lo: float, hi: float, pad: float) -> tuple[float, float]:
    if hi == lo:
        span = abs(lo) * 0.1 or 1.0
        return lo - span, hi + span
    extra = (hi - lo) * pad
    return lo - extra, hi + extra


@dataclass(frozen=True)
class _Frame:
    style: PlotStyle
    x_range: tuple[float, float]
    y_range: tuple[float, float]

    @property
    def plot_w(self):
        return self.style.width - self.style.margin_left - self.style.margin_right

    @property
    def plot_h(self):
        return self.style.height - self.style.margin_top - self.style.margin_bottom

    def x(self, v: float) -> float:
        lo, hi = self.x_range
        return self.style.margin_left + (v - lo) / (hi - lo) * self.plot_w

    def y(self, v: float) -> float:
        lo, hi = self.y_range
        return self.style.margin_top + (hi - v) / (hi - lo) * self.plot_h


def plot_frame(diagram: PhaseDiagram, style: PlotStyle = PlotStyle()) -> _Frame:
    xs = [p.divergence for p in diagram.points]
    ys = [p.cvs for p in diagram.points] + [diagram.excitability_threshold]
    x_range = style.x_range or _padded(min(xs), max(xs), style.padding)
    y_range = style.y_range or _padded(min(ys), max(ys), style.padding)
    return _Frame(style, x_range, y_range)


def _n(v: float) -> str:
    return f"{v:.2f}"


def render_phase_svg(diagram: PhaseDiagram, style: PlotStyle = PlotStyle()) -> str:
    """Self-contained SVG 1.1: one circle per epoch, an arrow per consecutive pair,
    the dashed median-CVS threshold, loss-shaded markers, axis labels and region notes."""
    if not diagram.points:
        raise ValueError("cannot render an empty phase diagram")
    fr = plot_frame(diagram, style)
    s = style
    left, top = s.margin_left, s.margin_top
    right, bottom = left + fr.plot_w, top + fr.plot_h

    losses = [p.loss for p in diagram.points if p.loss is not None]
    lmin, lmax = (min(losses), max(losses)) if losses else (0.0, 0.0)

    def norm_loss(loss):
        if loss is None:
            return None
        return 0.5 if lmax == lmin else (loss - lmin) / (lmax - lmin)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s.width}" height="{s.height}" '
        f'viewBox="0 0 {s.width} {s.height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(s.title)}</title>",
        "<defs>",
        '<marker id="arrowhead" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" '
        'orient="auto"><path d="M 0 0 L 10 5 L 0 10 z" fill="#555555"/></marker>',
        "</defs>",
        f'<rect x="0" y="0" width="{s.width}" height="{s.height}" fill="#ffffff"/>',
        f'<rect class="plot-area" x="{left}" y="{top}" width="{fr.plot_w}" height="{fr.plot_h}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
    ]

    # ticks
    for axis, (lo, hi) in (("x", fr.x_range), ("y", fr.y_range)):
        for k in range(6):
            v = lo + (hi - lo) * k / 5
            if axis == "x":
                px = fr.x(v)
                out.append(f'<line class="tick" x1="{_n(px)}" y1="{_n(bottom)}" x2="{_n(px)}" y2="{_n(bottom + 5)}" stroke="#333333"/>')
                out.append(f'<text x="{_n(px)}" y="{_n(bottom + 18)}" text-anchor="middle">{v:.2f}</text>')
            else:
                py = fr.y(v)
                out.append(f'<line class="tick" x1="{_n(left - 5)}" y1="{_n(py)}" x2="{_n(left)}" y2="{_n(py)}" stroke="#333333"/>')
                out.append(f'<text x="{_n(left - 8)}" y="{_n(py + 4)}" text-anchor="end">{v:.3f}</text>')

    # zero-divergence guide, only when it falls inside the plot
    if fr.x_range[0] < 0 < fr.x_range[1]:
        zx = fr.x(0.0)
        out.append(f'<line class="zero" x1="{_n(zx)}" y1="{_n(top)}" x2="{_n(zx)}" y2="{_n(bottom)}" stroke="#cccccc"/>')

    ty = fr.y(diagram.excitability_threshold)
    out.append(
        f'<line class="threshold" x1="{_n(left)}" y1="{_n(ty)}" x2="{_n(right)}" y2="{_n(ty)}" '
        'stroke="#d62fd6" stroke-width="1.5" stroke-dasharray="6 4"/>'
    )
    out.append(
        f'<text x="{_n(right - 4)}" y="{_n(ty - 5)}" text-anchor="end" fill="#d62fd6">'
        f"median CVS {diagram.excitability_threshold:.4f}</text>"
    )

    pts = diagram.points
    for a, b in zip(pts, pts[1:]):
        out.append(
            f'<path class="arrow" d="M {_n(fr.x(a.divergence))} {_n(fr.y(a.cvs))} '
            f'L {_n(fr.x(b.divergence))} {_n(fr.y(b.cvs))}" fill="none" stroke="#555555" '
            'stroke-width="1" marker-end="url(#arrowhead)"/>'
        )

    for p in pts:
        r, g, b = loss_color(norm_loss(p.loss))
        edge = _REGION_COLORS.get(p.region, "#333333")
        out.append(
            f'<circle class="epoch" cx="{_n(fr.x(p.divergence))}" cy="{_n(fr.y(p.cvs))}" r="{s.point_radius}" '
            f'fill="rgb({r},{g},{b})" stroke="{edge}" stroke-width="2">'
            f"<title>E{p.epoch}: divergence {p.divergence:.2f}, CVS {p.cvs:.4f}</title></circle>"
        )
        out.append(
            f'<text class="epoch-label" x="{_n(fr.x(p.divergence) + s.point_radius + 2)}" '
            f'y="{_n(fr.y(p.cvs) - s.point_radius)}" font-size="10">E{p.epoch}</text>'
        )

    # one annotation per region present, placed at the region's first epoch
    seen = set()
    for p in pts:
        if p.region is None or p.region in seen:
            continue
        seen.add(p.region)
        out.append(
            f'<text class="region" x="{_n(fr.x(p.divergence))}" y="{_n(fr.y(p.cvs) + s.point_radius + 14)}" '
            f'fill="{_REGION_COLORS[p.region]}" font-weight="bold">{_REGION_TITLES[p.region]}</text>'
        )

    out.append(
        f'<text class="axis-label" x="{_n(left + fr.plot_w / 2)}" y="{_n(s.height - 15)}" '
        'text-anchor="middle">Train − Test (pp)</text>'
    )
    cy = top + fr.plot_h / 2
    out.append(
        f'<text class="axis-label" x="20" y="{_n(cy)}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_n(cy)})">CVS</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# CSV export

PHASE_HEADER = ["epoch", "divergence", "cvs", "loss", "region"]


def export_phase_csv(diagram: PhaseDiagram) -> str:
    if not diagram.points:
        raise ValueError("cannot export an empty phase diagram")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PHASE_HEADER)
    for p in diagram.points:
        writer.writerow([
            p.epoch,
            repr(p.divergence),
            repr(p.cvs),
            "" if p.loss is None else repr(p.loss),
            "" if p.region is None else p.region.value,
        ])
    return buf.getvalue()


def parse_phase_csv(text: str) -> list[PhasePoint]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        PhasePoint(
            epoch=int(r["epoch"]),
            divergence=float(r["divergence"]),
            cvs=float(r["cvs"]),
            loss=float(r["loss"]) if r["loss"] else None,
            region=Region(r["region"]) if r["region"] else None,
        )
        for r in rows
    ]
