"""Confidence/variability coordinates and region assignment per example.

For each training example, confidence is the arithmetic mean of a per-epoch
probability series and variability is its population standard deviation.
The (variability, confidence) plane splits into three regions: ambiguous
(high variability), and easy/hard to learn (low variability, split on
confidence). The tracked series is either p_pred (the model's top
probability, the default) or p_true (gold-class probability).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .dynamics import TrainingDynamics
from .errors import (
    EmptySequence,
    ExampleSetMismatch,
    InvalidThresholds,
    IoFailure,
    MissingTrueProbabilities,
)
from .soi import CATEGORY_ORDER, SOIAssignment, SOICategory
from .svg import SvgDoc

METRICS = ("p_pred", "p_true")


class Region(Enum):
    EASY_TO_LEARN = "easy_to_learn"
    HARD_TO_LEARN = "hard_to_learn"
    AMBIGUOUS = "ambiguous"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RegionThresholds:
    """Cut points for the tripartite region split.

    ``var_cutoff`` must lie in (0, 0.5] because 0.5 is the largest possible
    population std of values in [0, 1]; ``conf_cutoff`` in (0, 1).
    """

    var_cutoff: float = 0.2
    conf_cutoff: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.var_cutoff <= 0.5:
            raise InvalidThresholds(
                f"var_cutoff must lie in (0, 0.5], got {self.var_cutoff!r}"
            )
        if not 0.0 < self.conf_cutoff < 1.0:
            raise InvalidThresholds(
                f"conf_cutoff must lie in (0, 1), got {self.conf_cutoff!r}"
            )


DEFAULT_THRESHOLDS = RegionThresholds()


def confidence(probs: Sequence[float]) -> float:
    """Arithmetic mean of the series."""
    if len(probs) == 0:
        raise EmptySequence("probability series must cover at least one epoch")
    first = probs[0]
    if all(p == first for p in probs):
        # exact value for constant series; fsum/len would round
        return float(first)
    return math.fsum(probs) / len(probs)


def variability(probs: Sequence[float]) -> float:
    """Population standard deviation of the series (divide by E, not E-1)."""
    if len(probs) == 0:
        raise EmptySequence("probability series must cover at least one epoch")
    first = probs[0]
    if all(p == first for p in probs):
        return 0.0
    mean = math.fsum(probs) / len(probs)
    var = math.fsum((p - mean) ** 2 for p in probs) / len(probs)
    return math.sqrt(var)


def assign_region(conf: float, var: float, t: RegionThresholds = DEFAULT_THRESHOLDS) -> Region:
    """Total map from (confidence, variability) to a region."""
    if var >= t.var_cutoff:
        return Region.AMBIGUOUS
    if conf >= t.conf_cutoff:
        return Region.EASY_TO_LEARN
    return Region.HARD_TO_LEARN


@dataclass(frozen=True)
class CartographyPoint:
    example_id: str
    confidence: float
    variability: float
    region: Region
    category: SOICategory


def build_map(
    dynamics: TrainingDynamics,
    assignment: SOIAssignment,
    thresholds: RegionThresholds = DEFAULT_THRESHOLDS,
    metric: str = "p_pred",
) -> list[CartographyPoint]:
    """One point per example, in the run's canonical (lexicographic) order."""
    if metric not in METRICS:
        raise InvalidThresholds(f"metric must be one of {METRICS}, got {metric!r}")
    if assignment.run_id and assignment.run_id != dynamics.run_id:
        raise ExampleSetMismatch(
            f"assignment is for run {assignment.run_id!r}, dynamics for {dynamics.run_id!r}"
        )
    dyn_ids = set(dynamics.examples)
    asn_ids = set(assignment.example_ids)
    if dyn_ids != asn_ids:
        diff = sorted(dyn_ids.symmetric_difference(asn_ids))
        raise ExampleSetMismatch(
            f"dynamics and assignment cover different examples; "
            f"symmetric difference has {len(diff)} id(s), e.g. {diff[:5]}"
        )
    points = []
    for example_id, ex in dynamics.examples.items():
        if metric == "p_true":
            if ex.p_true_series is None:
                raise MissingTrueProbabilities(
                    f"example {example_id!r} has no complete p_true series; "
                    f"metric 'p_true' needs one for every epoch"
                )
            series: Sequence[float] = ex.p_true_series
        else:
            series = ex.p_pred_series
        conf = confidence(series)
        var = variability(series)
        points.append(
            CartographyPoint(
                example_id=example_id,
                confidence=conf,
                variability=var,
                region=assign_region(conf, var, thresholds),
                category=assignment.category_of(example_id),
            )
        )
    return points


_CSV_HEADER = "example_id,confidence,variability,region,category"


def write_map_csv(points: Sequence[CartographyPoint], path: str | Path) -> None:
    """CSV export with 6-decimal fixed-point coordinates."""
    lines = [_CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.example_id},{p.confidence:.6f},{p.variability:.6f},"
            f"{p.region.value},{p.category.value}"
        )
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


# fixed palette/marker per category; constants keep the SVG byte-stable
_CATEGORY_COLOR = {
    SOICategory.UNE: "#d62728",
    SOICategory.ACE: "#2ca02c",
    SOICategory.FRGE_1T: "#ff7f0e",
    SOICategory.FRGE_GE2T: "#9467bd",
    SOICategory.ELE: "#1f77b4",
    SOICategory.LLE: "#8c564b",
}

_MARKER_R = 3.0


def _draw_marker(doc: SvgDoc, category: SOICategory, cx: float, cy: float, css_class: str) -> None:
    color = _CATEGORY_COLOR[category]
    r = _MARKER_R
    if category is SOICategory.UNE:
        doc.circle(cx, cy, r, fill=color, opacity=0.75, css_class=css_class)
    elif category is SOICategory.ACE:
        doc.rect(cx - r, cy - r, 2 * r, 2 * r, fill=color, css_class=css_class)
    elif category is SOICategory.FRGE_1T:
        doc.polygon([(cx, cy - r), (cx + r, cy + r), (cx - r, cy + r)], fill=color, css_class=css_class)
    elif category is SOICategory.FRGE_GE2T:
        doc.polygon([(cx, cy + r), (cx + r, cy - r), (cx - r, cy - r)], fill=color, css_class=css_class)
    elif category is SOICategory.ELE:
        doc.polygon(
            [(cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)], fill=color, css_class=css_class
        )
    else:  # LLE: thick plus sign
        doc.rect(cx - r, cy - r / 3, 2 * r, 2 * r / 3, fill=color, css_class=css_class)
        doc.rect(cx - r / 3, cy - r, 2 * r / 3, 2 * r, fill=color, css_class=css_class)


def render_map(
    points: Sequence[CartographyPoint],
    path: str | Path,
    thresholds: RegionThresholds = DEFAULT_THRESHOLDS,
    title: str | None = None,
) -> None:
    """Scatter plot: x = variability in [0, 0.5], y = confidence in [0, 1].

    One marker per point, colored and shaped by SOI category; dashed lines
    mark the region cut points; the legend lists only categories that occur,
    with their counts. Output bytes depend only on the inputs.
    """
    if len(points) == 0:
        raise EmptySequence("cannot render an empty cartography map")

    left, top, plot_w, plot_h = 64.0, 40.0, 360.0, 360.0
    legend_w = 140.0
    width = left + plot_w + 24.0 + legend_w
    height = top + plot_h + 56.0
    doc = SvgDoc(width, height)

    def sx(var: float) -> float:
        return left + (var / 0.5) * plot_w

    def sy(conf: float) -> float:
        return top + (1.0 - conf) * plot_h

    doc.rect(left, top, plot_w, plot_h, fill="#fcfcfc", stroke="#333333", stroke_width=1.0)
    if title:
        doc.text(left + plot_w / 2, top - 16, title, size=14, anchor="middle", bold=True, css_class="title")

    # region boundaries
    doc.line(sx(thresholds.var_cutoff), top, sx(thresholds.var_cutoff), top + plot_h,
             stroke="#999999", dashed=True, css_class="cut")
    doc.line(left, sy(thresholds.conf_cutoff), sx(thresholds.var_cutoff), sy(thresholds.conf_cutoff),
             stroke="#999999", dashed=True, css_class="cut")

    for i in range(6):
        var_tick = i * 0.1
        x = sx(var_tick)
        doc.line(x, top + plot_h, x, top + plot_h + 4, stroke="#333333")
        doc.text(x, top + plot_h + 18, f"{var_tick:.1f}", size=11, anchor="middle", css_class="x-tick")
    for i in range(6):
        conf_tick = i * 0.2
        y = sy(conf_tick)
        doc.line(left - 4, y, left, y, stroke="#333333")
        doc.text(left - 8, y + 4, f"{conf_tick:.1f}", size=11, anchor="end", css_class="y-tick")
    doc.text(left + plot_w / 2, top + plot_h + 40, "variability", size=13, anchor="middle", css_class="x-label")
    doc.text(left - 44, top + plot_h / 2, "confidence", size=13, anchor="middle",
             rotate=-90.0, css_class="y-label")

    counts = {category: 0 for category in CATEGORY_ORDER}
    for p in points:
        counts[p.category] += 1
    # draw in category order so overlapping points stack deterministically
    for category in CATEGORY_ORDER:
        for p in points:
            if p.category is category:
                _draw_marker(doc, category, sx(p.variability), sy(p.confidence), f"pt {category.value}")

    legend_x = left + plot_w + 24.0
    legend_y = top + 8.0
    doc.text(legend_x, legend_y, "SOI category", size=12, bold=True, css_class="legend-title")
    row = legend_y + 18.0
    for category in CATEGORY_ORDER:
        if counts[category] == 0:
            continue
        _draw_marker(doc, category, legend_x + 5, row - 4, "legend-marker")
        doc.text(legend_x + 16, row, f"{category.display_label} ({counts[category]})",
                 size=11, css_class="legend-entry")
        row += 16.0

    doc.write(path)
