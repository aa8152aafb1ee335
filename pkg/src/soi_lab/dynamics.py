"""Training-dynamics logs: record format, validation, and per-run matrices.

A dynamics log is UTF-8 JSON Lines, one prediction record per line. Each
record describes what a model predicted for one training example at the end
of one epoch. Files may be concatenated across epochs or runs; the ``run_id``
inside each record is authoritative. ``ingest_run`` assembles an arbitrarily
ordered stream of records into a dense, validated examples-by-epochs matrix
whose example order is lexicographic by id, the canonical order every
downstream artifact inherits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    DuplicateCell,
    EmptyRun,
    FieldOutOfRange,
    InconsistentTrueLabel,
    IoFailure,
    MalformedLine,
    MissingCell,
    MissingField,
    UnknownExample,
)

LOG_FORMAT_VERSION = 1

SPLITS = ("train", "eval", "test")

_REQUIRED_KEYS = (
    "run_id",
    "example_id",
    "epoch",
    "split",
    "true_label",
    "pred_label",
    "p_pred",
)


def _check_int(name: str, value: object) -> int:
    # bool is an int subclass; a boolean epoch or label is a producer bug
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedLine(f"{name} must be an integer, got {value!r}")
    return value


def _check_prob(name: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedLine(f"{name} must be a number, got {value!r}")
    out = float(value)
    if not 0.0 <= out <= 1.0:
        raise FieldOutOfRange(f"{name} must lie in [0, 1], got {out!r}")
    return out


@dataclass(frozen=True)
class PredictionRecord:
    """One (run, example, epoch) observation: labels plus probabilities.

    ``p_pred`` is the probability the model assigned to its own predicted
    class (its highest output probability). ``p_true`` optionally records the
    probability assigned to the gold class; it can never exceed ``p_pred``.
    """

    run_id: str
    example_id: str
    epoch: int
    split: str
    true_label: int
    pred_label: int
    p_pred: float
    p_true: float | None = None

    def __post_init__(self) -> None:
        for name in ("run_id", "example_id"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise MalformedLine(f"{name} must be a non-empty string, got {value!r}")
        object.__setattr__(self, "epoch", _check_int("epoch", self.epoch))
        if self.epoch < 1:
            raise FieldOutOfRange(f"epoch must be >= 1 (epochs are 1-based), got {self.epoch}")
        if self.split not in SPLITS:
            raise FieldOutOfRange(f"split must be one of {SPLITS}, got {self.split!r}")
        for name in ("true_label", "pred_label"):
            value = _check_int(name, getattr(self, name))
            if value < 0:
                raise FieldOutOfRange(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "p_pred", _check_prob("p_pred", self.p_pred))
        if self.p_true is not None:
            p_true = _check_prob("p_true", self.p_true)
            if p_true > self.p_pred:
                raise FieldOutOfRange(f"p_true ({p_true!r}) cannot exceed p_pred ({self.p_pred!r})")
            object.__setattr__(self, "p_true", p_true)

    @property
    def correct(self) -> bool:
        return self.pred_label == self.true_label

    def to_json(self) -> str:
        """One log line: keys in canonical order, floats at round-trip precision."""
        data: dict[str, object] = {
            "run_id": self.run_id,
            "example_id": self.example_id,
            "epoch": self.epoch,
            "split": self.split,
            "true_label": self.true_label,
            "pred_label": self.pred_label,
            "p_pred": self.p_pred,
        }
        if self.p_true is not None:
            data["p_true"] = self.p_true
        return json.dumps(data, ensure_ascii=False, separators=(",", ":"))


def parse_record(line: str) -> PredictionRecord:
    """Parse one JSONL log line into a validated record.

    Unknown keys are ignored; ``run`` is accepted as an alias for ``run_id``.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedLine(f"record must be a JSON object, got {type(raw).__name__}")
    data = dict(raw)
    if "run_id" not in data and "run" in data:
        data["run_id"] = data["run"]
    missing = [key for key in _REQUIRED_KEYS if key not in data]
    if missing:
        raise MissingField(f"missing required field(s): {', '.join(missing)}")
    kwargs = {key: data[key] for key in _REQUIRED_KEYS}
    if data.get("p_true") is not None:
        kwargs["p_true"] = data["p_true"]
    return PredictionRecord(**kwargs)


def read_records(path: str | Path) -> Iterator[PredictionRecord]:
    """Stream records from a JSONL file; blank lines are skipped."""
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot open {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield parse_record(line)
            except (MalformedLine, MissingField, FieldOutOfRange) as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from exc


@dataclass(frozen=True)
class ExampleDynamics:
    """Per-example series across all epochs of one run."""

    true_label: int
    correctness: tuple[int, ...]
    p_pred_series: tuple[float, ...]
    p_true_series: tuple[float, ...] | None


@dataclass(frozen=True)
class TrainingDynamics:
    """Dense, validated per-run matrix: every example has one record per epoch.

    ``examples`` iterates in lexicographic example-id order. Instances are
    immutable after construction and safe to share across threads.
    """

    run_id: str
    num_epochs: int
    examples: dict[str, ExampleDynamics]

    @property
    def example_ids(self) -> tuple[str, ...]:
        return tuple(self.examples)

    def __len__(self) -> int:
        return len(self.examples)


def ingest_run(records: Iterable[PredictionRecord], run_id: str) -> TrainingDynamics:
    """Assemble the named run from a record stream in any order.

    Records belonging to other runs are ignored. The epoch count is the
    maximum epoch seen; any example not covering exactly epochs 1..E is
    rejected rather than padded.
    """
    cells: dict[str, dict[int, PredictionRecord]] = {}
    labels: dict[str, int] = {}
    max_epoch = 0
    for rec in records:
        if rec.run_id != run_id:
            continue
        per_example = cells.setdefault(rec.example_id, {})
        if rec.epoch in per_example:
            raise DuplicateCell(
                f"run {run_id!r}: two records for example {rec.example_id!r} at epoch {rec.epoch}"
            )
        per_example[rec.epoch] = rec
        expected = labels.setdefault(rec.example_id, rec.true_label)
        if expected != rec.true_label:
            raise InconsistentTrueLabel(
                f"run {run_id!r}: example {rec.example_id!r} has true_label "
                f"{expected} and {rec.true_label}"
            )
        if rec.epoch > max_epoch:
            max_epoch = rec.epoch
    if not cells:
        raise EmptyRun(f"no records for run {run_id!r}")

    num_epochs = max_epoch
    examples: dict[str, ExampleDynamics] = {}
    for example_id in sorted(cells):
        per_example = cells[example_id]
        missing = [t for t in range(1, num_epochs + 1) if t not in per_example]
        if missing:
            raise MissingCell(
                f"run {run_id!r}: example {example_id!r} lacks epoch(s) "
                f"{missing} out of 1..{num_epochs}"
            )
        ordered = [per_example[t] for t in range(1, num_epochs + 1)]
        p_true_series = None
        if all(rec.p_true is not None for rec in ordered):
            p_true_series = tuple(rec.p_true for rec in ordered)  # type: ignore[misc]
        examples[example_id] = ExampleDynamics(
            true_label=labels[example_id],
            correctness=tuple(int(rec.correct) for rec in ordered),
            p_pred_series=tuple(rec.p_pred for rec in ordered),
            p_true_series=p_true_series,
        )
    return TrainingDynamics(run_id=run_id, num_epochs=num_epochs, examples=examples)


def load_runs(path: str | Path) -> dict[str, TrainingDynamics]:
    """Read a log file and assemble every run it contains, keyed by run id."""
    per_run: dict[str, list[PredictionRecord]] = {}
    for rec in read_records(path):
        per_run.setdefault(rec.run_id, []).append(rec)
    if not per_run:
        raise EmptyRun(f"{path}: log contains no records")
    return {run_id: ingest_run(per_run[run_id], run_id) for run_id in sorted(per_run)}


def correctness_sequence(dynamics: TrainingDynamics, example_id: str) -> tuple[int, ...]:
    """The per-epoch correctness bits for one example (1 = predicted its label)."""
    try:
        return dynamics.examples[example_id].correctness
    except KeyError:
        raise UnknownExample(
            f"run {dynamics.run_id!r} has no example {example_id!r}"
        ) from None


def serialize_run(dynamics: TrainingDynamics) -> str:
    """Render a run back to canonical JSONL (epoch-major, examples in id order).

    Split tags are not retained in dynamics; emitted records carry
    ``split="train"``. Ingesting the output reproduces the input value.
    """
    lines = []
    for epoch in range(1, dynamics.num_epochs + 1):
        for example_id, ex in dynamics.examples.items():
            p_pred = ex.p_pred_series[epoch - 1]
            p_true = ex.p_true_series[epoch - 1] if ex.p_true_series is not None else None
            if ex.correctness[epoch - 1]:
                pred_label = ex.true_label
            else:
                # any label != true_label reproduces the correctness bit;
                # pick a fixed one so serialization is deterministic
                pred_label = ex.true_label + 1
            lines.append(
                PredictionRecord(
                    run_id=dynamics.run_id,
                    example_id=example_id,
                    epoch=epoch,
                    split="train",
                    true_label=ex.true_label,
                    pred_label=pred_label,
                    p_pred=p_pred,
                    p_true=p_true,
                ).to_json()
            )
    return "\n".join(lines) + "\n"


def write_run(dynamics: TrainingDynamics, path: str | Path) -> None:
    """Write the canonical JSONL serialization of a run to ``path``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_run(dynamics), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
