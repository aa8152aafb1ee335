"""Six-way categorization of training examples by their correctness history.

Given the per-epoch correctness bits of one example over a full run, the
example lands in exactly one category:

- ``UNE``       never learned, or forgotten and never re-learned afterwards
- ``ACE``       correct at every epoch
- ``FRGE_1T``   forgotten exactly once and recollected afterwards
- ``FRGE_GE2T`` forgotten two or more times and recollected afterwards
- ``ELE``       never forgotten, first correct on or before the early cutoff
- ``LLE``       never forgotten, first correct after the early cutoff

Forgetting is a 1 -> 0 step between adjacent epochs. Recollecting is a
0 -> 1 step that happens strictly after the first forgetting event; early
0 -> 1 steps are just learning, not recollection.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .dynamics import TrainingDynamics
from .errors import (
    CutoffOutOfRange,
    EmptySequence,
    IoFailure,
    MalformedAssignment,
)


class SOICategory(Enum):
    """The six learning-behavior categories. Values double as CSV labels."""

    UNE = "UNE"
    ACE = "ACE"
    FRGE_1T = "FRGE_1T"
    FRGE_GE2T = "FRGE_GE2T"
    ELE = "ELE"
    LLE = "LLE"

    @property
    def display_label(self) -> str:
        """Human-facing label used in figures and reports."""
        return _DISPLAY_LABELS[self]

    def __str__(self) -> str:
        return self.value


_DISPLAY_LABELS = {
    SOICategory.UNE: "UNE",
    SOICategory.ACE: "ACE",
    SOICategory.FRGE_1T: "1t-FRGE",
    SOICategory.FRGE_GE2T: "≥2t-FRGE",
    SOICategory.ELE: "ELE",
    SOICategory.LLE: "LLE",
}

# fixed presentation order for censuses, heatmap axes, and reports
CATEGORY_ORDER = (
    SOICategory.UNE,
    SOICategory.ACE,
    SOICategory.FRGE_1T,
    SOICategory.FRGE_GE2T,
    SOICategory.ELE,
    SOICategory.LLE,
)

# forgettable = at least one forgetting AND one recollecting event; the
# never-relearned UNE class is deliberately outside this set
FORGETTABLE = frozenset({SOICategory.FRGE_1T, SOICategory.FRGE_GE2T})


@dataclass(frozen=True)
class EventCounts:
    """Forgetting/recollecting event tallies plus learning landmarks.

    ``first_correct_epoch`` is 1-based, or None when the example was never
    correct. ``last_correct`` is the correctness bit at the final epoch.
    """

    forgetting: int
    recollecting: int
    first_correct_epoch: int | None
    last_correct: bool


def _validate_sequence(seq: Sequence[int]) -> tuple[int, ...]:
    if len(seq) == 0:
        raise EmptySequence("correctness sequence must cover at least one epoch")
    out = []
    for i, bit in enumerate(seq):
        if isinstance(bit, bool):
            bit = int(bit)
        if bit not in (0, 1):
            raise MalformedAssignment(
                f"correctness sequence must be 0/1, got {seq[i]!r} at epoch {i + 1}"
            )
        out.append(bit)
    return tuple(out)


def count_events(seq: Sequence[int]) -> EventCounts:
    """Count forgetting and recollecting events in one correctness sequence.

    A single left-to-right scan: every 1 -> 0 step is a forgetting event, and
    a 0 -> 1 step counts as recollecting only once at least one forgetting
    event has already been seen.
    """
    bits = _validate_sequence(seq)
    forgetting = 0
    recollecting = 0
    first_correct = None
    for i, bit in enumerate(bits):
        if bit == 1 and first_correct is None:
            first_correct = i + 1
        if i == 0:
            continue
        prev = bits[i - 1]
        if prev == 1 and bit == 0:
            forgetting += 1
        elif prev == 0 and bit == 1 and forgetting > 0:
            recollecting += 1
    return EventCounts(
        forgetting=forgetting,
        recollecting=recollecting,
        first_correct_epoch=first_correct,
        last_correct=bits[-1] == 1,
    )


def default_cutoff(num_epochs: int) -> int:
    """Early/late boundary for a run of ``num_epochs`` epochs.

    Half the run, floored, but never below 1 so the boundary stays a valid
    epoch index even for one-epoch runs.
    """
    if num_epochs < 1:
        raise CutoffOutOfRange(f"num_epochs must be >= 1, got {num_epochs}")
    return max(1, num_epochs // 2)


def classify(seq: Sequence[int], late_cutoff: int | None = None) -> SOICategory:
    """Assign one correctness sequence to its category.

    ``late_cutoff`` is the last epoch still counted as early; it defaults to
    ``default_cutoff(len(seq))`` and must lie in 1..len(seq).
    """
    bits = _validate_sequence(seq)
    num_epochs = len(bits)
    if late_cutoff is None:
        late_cutoff = default_cutoff(num_epochs)
    if not 1 <= late_cutoff <= num_epochs:
        raise CutoffOutOfRange(
            f"late_cutoff must lie in 1..{num_epochs}, got {late_cutoff}"
        )
    events = count_events(bits)
    if all(bit == 1 for bit in bits):
        return SOICategory.ACE
    if events.forgetting >= 1 and events.recollecting >= 1:
        if events.forgetting == 1:
            return SOICategory.FRGE_1T
        return SOICategory.FRGE_GE2T
    if events.forgetting >= 1:
        # forgotten at least once, never recollected afterwards
        return SOICategory.UNE
    if events.first_correct_epoch is None:
        return SOICategory.UNE
    # F == 0 and at least one correct epoch: learned once, kept it
    if events.first_correct_epoch <= late_cutoff:
        return SOICategory.ELE
    return SOICategory.LLE


@dataclass(frozen=True)
class AssignmentEntry:
    """One example's category together with the evidence behind it."""

    example_id: str
    category: SOICategory
    forgetting: int
    recollecting: int
    first_correct_epoch: int | None
    last_correct: bool


@dataclass(frozen=True)
class SOIAssignment:
    """Category assignment for every example of one run.

    ``entries`` is ordered lexicographically by example id. ``late_cutoff``
    records the boundary used; it is None for assignments loaded from CSV,
    where the cutoff is not stored.
    """

    run_id: str
    num_epochs: int
    late_cutoff: int | None
    entries: tuple[AssignmentEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def example_ids(self) -> tuple[str, ...]:
        return tuple(entry.example_id for entry in self.entries)

    def category_of(self, example_id: str) -> SOICategory:
        try:
            return self._by_id()[example_id]
        except KeyError:
            raise MalformedAssignment(
                f"assignment for run {self.run_id!r} has no example {example_id!r}"
            ) from None

    def _by_id(self) -> dict[str, SOICategory]:
        cached = getattr(self, "_by_id_cache", None)
        if cached is None:
            cached = {entry.example_id: entry.category for entry in self.entries}
            object.__setattr__(self, "_by_id_cache", cached)
        return cached

    def census(self) -> dict[SOICategory, int]:
        """Per-category example counts in fixed category order."""
        counts = {category: 0 for category in CATEGORY_ORDER}
        for entry in self.entries:
            counts[entry.category] += 1
        return counts

    def members(self, category: SOICategory) -> tuple[str, ...]:
        return tuple(
            entry.example_id for entry in self.entries if entry.category == category
        )


def classify_run(
    dynamics: TrainingDynamics, late_cutoff: int | None = None
) -> SOIAssignment:
    """Categorize every example of a run; entries follow the run's id order."""
    if late_cutoff is None:
        late_cutoff = default_cutoff(dynamics.num_epochs)
    entries = []
    for example_id, ex in dynamics.examples.items():
        events = count_events(ex.correctness)
        entries.append(
            AssignmentEntry(
                example_id=example_id,
                category=classify(ex.correctness, late_cutoff),
                forgetting=events.forgetting,
                recollecting=events.recollecting,
                first_correct_epoch=events.first_correct_epoch,
                last_correct=events.last_correct,
            )
        )
    return SOIAssignment(
        run_id=dynamics.run_id,
        num_epochs=dynamics.num_epochs,
        late_cutoff=late_cutoff,
        entries=tuple(entries),
    )


_CSV_HEADER = (
    "example_id",
    "category",
    "forgetting",
    "recollecting",
    "first_correct_epoch",
    "last_correct",
)


def write_assignment_csv(assignment: SOIAssignment, path: str | Path) -> None:
    """Write one row per example; empty first_correct_epoch means never correct."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(_CSV_HEADER)
            for entry in assignment.entries:
                writer.writerow(
                    [
                        entry.example_id,
                        entry.category.value,
                        entry.forgetting,
                        entry.recollecting,
                        "" if entry.first_correct_epoch is None else entry.first_correct_epoch,
                        "true" if entry.last_correct else "false",
                    ]
                )
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_assignment_csv(path: str | Path, run_id: str = "") -> SOIAssignment:
    """Load an assignment written by ``write_assignment_csv``.

    The epoch count is reconstructed as a lower bound (the largest landmark
    seen) and the cutoff is unknown, so round-tripped assignments compare
    equal on entries, not on run metadata.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            rows = list(reader)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not rows or tuple(rows[0]) != _CSV_HEADER:
        raise MalformedAssignment(
            f"{path}: expected header {','.join(_CSV_HEADER)!r}"
        )
    entries = []
    seen: set[str] = set()
    max_landmark = 1
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(_CSV_HEADER):
            raise MalformedAssignment(
                f"{path}:{lineno}: expected {len(_CSV_HEADER)} fields, got {len(row)}"
            )
        example_id, cat_label, forgetting, recollecting, first_correct, last_correct = row
        if not example_id:
            raise MalformedAssignment(f"{path}:{lineno}: empty example_id")
        if example_id in seen:
            raise MalformedAssignment(f"{path}:{lineno}: duplicate example_id {example_id!r}")
        seen.add(example_id)
        try:
            category = SOICategory(cat_label)
        except ValueError:
            raise MalformedAssignment(
                f"{path}:{lineno}: unknown category {cat_label!r}"
            ) from None
        try:
            f_count = int(forgetting)
            r_count = int(recollecting)
            first = None if first_correct == "" else int(first_correct)
        except ValueError as exc:
            raise MalformedAssignment(f"{path}:{lineno}: {exc}") from None
        if f_count < 0 or r_count < 0 or (first is not None and first < 1):
            raise MalformedAssignment(f"{path}:{lineno}: negative or zero landmark")
        if last_correct not in ("true", "false"):
            raise MalformedAssignment(
                f"{path}:{lineno}: last_correct must be true/false, got {last_correct!r}"
            )
        if first is not None and first > max_landmark:
            max_landmark = first
        entries.append(
            AssignmentEntry(
                example_id=example_id,
                category=category,
                forgetting=f_count,
                recollecting=r_count,
                first_correct_epoch=first,
                last_correct=last_correct == "true",
            )
        )
    if not entries:
        raise MalformedAssignment(f"{path}: assignment has no rows")
    entries.sort(key=lambda entry: entry.example_id)
    return SOIAssignment(
        run_id=run_id,
        num_epochs=max_landmark,
        late_cutoff=None,
        entries=tuple(entries),
    )


def census_by_category(
    assignments: Iterable[SOIAssignment],
) -> dict[str, Mapping[SOICategory, int]]:
    """Censuses for several runs at once, keyed by run id."""
    return {a.run_id: a.census() for a in assignments}
