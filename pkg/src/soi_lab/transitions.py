"""Category-transition matrices between two runs over the same example set.

The matrix counts, for every (source category, target category) pair, how
many examples moved from one to the other between a source run (typically
single-setting training) and a target run (typically the multi-setting
pair). The rendered figure is a 7x7 grid: the 6x6 counts plus a marginal
sum row and column, whose entries equal the two runs' category censuses.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyIntersection, ExampleSetMismatch, IoFailure
from .soi import CATEGORY_ORDER, SOIAssignment, SOICategory
from .svg import SvgDoc, lerp_color

_INDEX = {category: i for i, category in enumerate(CATEGORY_ORDER)}


def shared_example_ids(
    a: SOIAssignment, b: SOIAssignment, intersect: bool = False
) -> tuple[str, ...]:
    """The ids both assignments cover, in lexicographic order.

    Mismatched id sets are an error unless ``intersect`` opts into using the
    overlap; silent intersection would skew every count downstream.
    """
    ids_a = set(a.example_ids)
    ids_b = set(b.example_ids)
    if ids_a == ids_b:
        return a.example_ids
    if not intersect:
        diff = sorted(ids_a.symmetric_difference(ids_b))
        raise ExampleSetMismatch(
            f"runs {a.run_id!r} and {b.run_id!r} cover different examples; "
            f"symmetric difference has {len(diff)} id(s), e.g. {diff[:5]} "
            f"(pass intersect to use the overlap)"
        )
    shared = ids_a & ids_b
    if not shared:
        raise EmptyIntersection(
            f"runs {a.run_id!r} and {b.run_id!r} share no examples"
        )
    return tuple(sorted(shared))


@dataclass(frozen=True)
class TransitionMatrix:
    """6x6 integer counts (source category x target category) with marginals.

    ``row_sums`` equals the source run's census and ``col_sums`` the target
    run's census over the shared examples; ``total`` is the shared count.
    """

    source_run: str
    target_run: str
    counts: tuple[tuple[int, ...], ...]
    row_sums: tuple[int, ...]
    col_sums: tuple[int, ...]
    total: int

    def cell(self, source: SOICategory, target: SOICategory) -> int:
        return self.counts[_INDEX[source]][_INDEX[target]]

    def transposed(self) -> "TransitionMatrix":
        n = len(CATEGORY_ORDER)
        return TransitionMatrix(
            source_run=self.target_run,
            target_run=self.source_run,
            counts=tuple(tuple(self.counts[i][j] for i in range(n)) for j in range(n)),
            row_sums=self.col_sums,
            col_sums=self.row_sums,
            total=self.total,
        )


def build_heatmap(
    a: SOIAssignment, b: SOIAssignment, intersect: bool = False
) -> TransitionMatrix:
    """Count every example's (category in a, category in b) pair."""
    shared = shared_example_ids(a, b, intersect=intersect)
    pair_counts = Counter(
        (a.category_of(example_id), b.category_of(example_id)) for example_id in shared
    )
    n = len(CATEGORY_ORDER)
    counts = tuple(
        tuple(pair_counts.get((src, tgt), 0) for tgt in CATEGORY_ORDER)
        for src in CATEGORY_ORDER
    )
    row_sums = tuple(sum(counts[i][j] for j in range(n)) for i in range(n))
    col_sums = tuple(sum(counts[i][j] for i in range(n)) for j in range(n))
    return TransitionMatrix(
        source_run=a.run_id,
        target_run=b.run_id,
        counts=counts,
        row_sums=row_sums,
        col_sums=col_sums,
        total=len(shared),
    )


def write_matrix_csv(matrix: TransitionMatrix, path: str | Path) -> None:
    """8x8 CSV: header row/column of category labels plus a SUM margin."""
    labels = [category.display_label for category in CATEGORY_ORDER]
    lines = ["," + ",".join(labels) + ",SUM"]
    for i, category in enumerate(CATEGORY_ORDER):
        row = [labels[i]] + [str(c) for c in matrix.counts[i]] + [str(matrix.row_sums[i])]
        lines.append(",".join(row))
    lines.append(",".join(["SUM"] + [str(c) for c in matrix.col_sums] + [str(matrix.total)]))
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


_CELL = 64.0
_LEFT = 128.0
_TOP = 72.0
_LOW_RGB = (252, 252, 253)
_HIGH_RGB = (33, 102, 172)
_MARGIN_FILL = "#e8e8ee"
_TOTAL_FILL = "#d4d4de"


def render_heatmap(matrix: TransitionMatrix, path: str | Path) -> None:
    """7x7 grid figure: 6x6 shaded counts plus a sum row/column.

    Shading scales with the largest 6x6 cell; marginal cells use a fixed
    neutral fill so the censuses read as frames, not data. Byte-identical
    output for identical input.
    """
    n = len(CATEGORY_ORDER)
    grid = n + 1
    width = _LEFT + grid * _CELL + 24.0
    height = _TOP + grid * _CELL + 48.0
    doc = SvgDoc(width, height)

    doc.text(_LEFT + grid * _CELL / 2, 24, f"{matrix.source_run} → {matrix.target_run}",
             size=14, anchor="middle", bold=True, css_class="title")

    labels = [category.display_label for category in CATEGORY_ORDER] + ["Σ"]
    max_count = max((c for row in matrix.counts for c in row), default=0)

    def cell_rect(i: int, j: int, value: int, is_margin: bool, is_total: bool) -> None:
        x = _LEFT + j * _CELL
        y = _TOP + i * _CELL
        if is_total:
            fill = _TOTAL_FILL
        elif is_margin:
            fill = _MARGIN_FILL
        else:
            t = value / max_count if max_count > 0 else 0.0
            fill = lerp_color(_LOW_RGB, _HIGH_RGB, t)
        kind = "total" if is_total else ("margin" if is_margin else "cell")
        doc.rect(x, y, _CELL, _CELL, fill=fill, stroke="#555555", stroke_width=0.8,
                 css_class=f"hm-{kind}")
        dark_bg = not (is_margin or is_total) and max_count > 0 and value / max_count > 0.55
        doc.text(x + _CELL / 2, y + _CELL / 2 + 4, str(value), size=12, anchor="middle",
                 fill="#ffffff" if dark_bg else "#222222", css_class=f"hm-{kind}-value")

    for j in range(grid):
        doc.text(_LEFT + j * _CELL + _CELL / 2, _TOP - 10, labels[j], size=11,
                 anchor="middle", css_class="col-label")
    for i in range(grid):
        doc.text(_LEFT - 8, _TOP + i * _CELL + _CELL / 2 + 4, labels[i], size=11,
                 anchor="end", css_class="row-label")

    for i in range(n):
        for j in range(n):
            cell_rect(i, j, matrix.counts[i][j], is_margin=False, is_total=False)
        cell_rect(i, n, matrix.row_sums[i], is_margin=True, is_total=False)
    for j in range(n):
        cell_rect(n, j, matrix.col_sums[j], is_margin=True, is_total=False)
    cell_rect(n, n, matrix.total, is_margin=False, is_total=True)

    doc.text(_LEFT + grid * _CELL / 2, _TOP + grid * _CELL + 32,
             f"rows: {matrix.source_run} (source), columns: {matrix.target_run} (target)",
             size=11, anchor="middle", css_class="caption")
    doc.write(path)
