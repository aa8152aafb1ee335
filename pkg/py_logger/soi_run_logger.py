"""Write per-epoch prediction logs in the JSONL format soi-lab ingests.

Drop this into any training loop: call begin_run once, log_epoch after each
evaluation pass over the training set, end_run when finished. Everything is
validated at write time so a bug in the loop fails the training run, not the
analysis that happens days later. One logger per run; a logger is a single
writer and is not safe to share across threads or processes.

    logger = begin_run("my_run", "dynamics.jsonl")
    for epoch in range(1, epochs + 1):
        ...train one epoch...
        log_epoch(logger, epoch, ids, true_labels, pred_labels, p_pred, p_true)
    summary = end_run(logger)

No third-party dependencies.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

__version__ = "0.1.0"

__all__ = [
    "RunLogger",
    "RunSummary",
    "begin_run",
    "log_epoch",
    "end_run",
    "LoggerError",
    "InvalidRunId",
    "LengthMismatch",
    "NonMonotoneEpoch",
    "IdSetDrift",
    "NoEpochsLogged",
    "IoFailure",
]

SPLITS = ("train", "eval", "test")


class LoggerError(Exception):
    """Base class for everything this module raises on misuse."""


class InvalidRunId(LoggerError):
    pass


class LengthMismatch(LoggerError):
    pass


class NonMonotoneEpoch(LoggerError):
    pass


class IdSetDrift(LoggerError):
    pass


class NoEpochsLogged(LoggerError):
    pass


class IoFailure(LoggerError):
    pass


class RunSummary(NamedTuple):
    examples: int
    epochs: int
    path: Path


def _check_label(name: str, value: object, example_id: str) -> int:
    # bool is an int subclass; a label of True is a bug upstream
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} for {example_id!r} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} for {example_id!r} must be >= 0, got {value}")
    return value


def _check_prob(name: str, value: object, example_id: str) -> float:
    try:
        out = float(value)  # accepts numpy scalars too
    except (TypeError, ValueError):
        raise ValueError(f"{name} for {example_id!r} is not a number: {value!r}") from None
    if not 0.0 <= out <= 1.0:
        raise ValueError(f"{name} for {example_id!r} must lie in [0, 1], got {out}")
    return out


class RunLogger:
    """Appends validated prediction records for one run to one file.

    Epochs are 1-based and must arrive consecutively. The id set seen at
    epoch 1 is frozen; later epochs must cover exactly the same examples
    (in any order). Create via begin_run.
    """

    def __init__(self, run_id: str, path: str | Path, split: str = "train") -> None:
        if not isinstance(run_id, str) or not run_id:
            raise InvalidRunId(f"run_id must be a non-empty string, got {run_id!r}")
        if split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
        self.run_id = run_id
        self.path = Path(path)
        self.split = split
        self._epoch = 0
        self._ids: Optional[frozenset[str]] = None
        try:
            self._handle = self.path.open("w", encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot open {self.path} for writing: {exc}") from exc

    @property
    def epochs_logged(self) -> int:
        return self._epoch

    def log_epoch(
        self,
        epoch: int,
        ids: Sequence[str],
        true_labels: Sequence[int],
        pred_labels: Sequence[int],
        p_pred: Sequence[float],
        p_true: Optional[Sequence[float]] = None,
    ) -> None:
        if self._handle.closed:
            raise ValueError("logger is closed; begin a new run")
        if isinstance(epoch, bool) or not isinstance(epoch, int):
            raise NonMonotoneEpoch(f"epoch must be an integer, got {epoch!r}")
        if epoch != self._epoch + 1:
            raise NonMonotoneEpoch(
                f"expected epoch {self._epoch + 1}, got {epoch}; "
                "epochs are 1-based and consecutive"
            )

        lengths = {
            "ids": len(ids),
            "true_labels": len(true_labels),
            "pred_labels": len(pred_labels),
            "p_pred": len(p_pred),
        }
        if p_true is not None:
            lengths["p_true"] = len(p_true)
        if len(set(lengths.values())) != 1:
            raise LengthMismatch(f"argument lengths differ: {lengths}")
        if not ids:
            raise ValueError("an epoch with zero examples cannot be logged")

        id_list = [str(i) for i in ids]
        id_set = frozenset(id_list)
        if len(id_set) != len(id_list):
            seen = set()
            dup = next(i for i in id_list if i in seen or seen.add(i))
            raise IdSetDrift(f"duplicate example id {dup!r} within epoch {epoch}")
        if any(not i for i in id_list):
            raise ValueError("example ids must be non-empty strings")
        if self._ids is None:
            self._ids = id_set
        elif id_set != self._ids:
            missing = sorted(self._ids - id_set)[:3]
            added = sorted(id_set - self._ids)[:3]
            raise IdSetDrift(
                f"epoch {epoch} ids differ from epoch 1: "
                f"missing {missing}, new {added}"
            )

        lines = []
        for row, example_id in enumerate(id_list):
            record = {
                "run_id": self.run_id,
                "example_id": example_id,
                "epoch": epoch,
                "split": self.split,
                "true_label": _check_label("true_label", true_labels[row], example_id),
                "pred_label": _check_label("pred_label", pred_labels[row], example_id),
                "p_pred": _check_prob("p_pred", p_pred[row], example_id),
            }
            if p_true is not None:
                value = _check_prob("p_true", p_true[row], example_id)
                if value > record["p_pred"]:
                    raise ValueError(
                        f"p_true for {example_id!r} exceeds p_pred "
                        f"({value} > {record['p_pred']}); p_pred is the max probability"
                    )
                record["p_true"] = value
            lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))

        # validate everything, then write everything: a failed call appends nothing
        try:
            self._handle.write("\n".join(lines) + "\n")
            self._handle.flush()
        except OSError as exc:
            raise IoFailure(f"cannot write to {self.path}: {exc}") from exc
        self._epoch = epoch

    def end_run(self) -> RunSummary:
        if self._epoch == 0:
            self._handle.close()
            raise NoEpochsLogged(f"no epochs were logged for run {self.run_id!r}")
        try:
            self._handle.close()
        except OSError as exc:
            raise IoFailure(f"cannot close {self.path}: {exc}") from exc
        assert self._ids is not None
        return RunSummary(examples=len(self._ids), epochs=self._epoch, path=self.path)


def begin_run(run_id: str, path: str | Path, split: str = "train") -> RunLogger:
    """Create/truncate the log file and return a logger positioned at epoch 0."""
    return RunLogger(run_id, path, split=split)


def log_epoch(
    logger: RunLogger,
    epoch: int,
    ids: Sequence[str],
    true_labels: Sequence[int],
    pred_labels: Sequence[int],
    p_pred: Sequence[float],
    p_true: Optional[Sequence[float]] = None,
) -> None:
    """Append one epoch's records; see RunLogger.log_epoch."""
    logger.log_epoch(epoch, ids, true_labels, pred_labels, p_pred, p_true)


def end_run(logger: RunLogger) -> RunSummary:
    """Flush and close the log; returns (examples, epochs, path)."""
    return logger.end_run()
