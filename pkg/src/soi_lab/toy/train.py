"""Minibatch SGD trainer with per-epoch dynamics logging.

With two tasks, batches alternate round-robin (task A batch 1, task B
batch 1, task A batch 2, ...) so the shared encoder sees both tasks
throughout each epoch; leftover batches of the longer task run at the end.
After every epoch the model is evaluated on each task's full training split
and one prediction record per example is logged. The whole schedule is a
pure function of (datasets, hyperparameters, seed).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import zip_longest
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..dynamics import PredictionRecord, TrainingDynamics, ingest_run
from ..errors import InvalidConfig, InvalidSpec, UnknownExampleId
from ..selection import SelectionResult
from .data import Split, TaskDataset
from .model import MultiHeadModel, forward, loss_and_grads, sgd_step
from .rng import stream


@dataclass(frozen=True)
class TrainResult:
    model: MultiHeadModel
    dynamics: dict[str, TrainingDynamics]
    epoch_losses: dict[str, tuple[float, ...]]
    # the exact records behind each dynamics run, in logging order
    records: dict[str, tuple[PredictionRecord, ...]]


def _check_hyperparams(epochs: int, lr: float, batch_size: int) -> None:
    # lr=0 is allowed: a zero step size is a legitimate probe (frozen model)
    if epochs < 1:
        raise InvalidConfig(f"epochs must be >= 1, got {epochs}")
    if lr < 0:
        raise InvalidConfig(f"lr must be >= 0, got {lr}")
    if batch_size < 1:
        raise InvalidConfig(f"batch_size must be >= 1, got {batch_size}")


def _epoch_batches(
    rows_per_task: Sequence[tuple[str, np.ndarray]],
    batch_size: int,
    seed: int,
    epoch: int,
) -> list[tuple[str, np.ndarray]]:
    """Round-robin interleaved batches for one epoch, all index arrays.

    Each task's rows are permuted by a stream keyed on (seed, task, epoch),
    so the schedule does not depend on how many epochs ran before this call.
    """
    per_task: list[list[np.ndarray]] = []
    for task_id, rows in rows_per_task:
        perm = stream(seed, "shuffle", task_id, f"epoch{epoch}").permutation(len(rows))
        shuffled = rows[perm]
        per_task.append(
            [shuffled[i : i + batch_size] for i in range(0, len(shuffled), batch_size)]
        )
    batches: list[tuple[str, np.ndarray]] = []
    for chunk_tuple in zip_longest(*per_task):
        for (task_id, _), chunk in zip(rows_per_task, chunk_tuple):
            if chunk is not None and len(chunk) > 0:
                batches.append((task_id, chunk))
    return batches


def _log_epoch(
    model: MultiHeadModel,
    dataset: TaskDataset,
    run_id: str,
    epoch: int,
    sink: list[PredictionRecord],
) -> None:
    split = dataset.train
    _, probs = forward(model, split.X, dataset.task_id)
    preds = probs.argmax(axis=1)
    p_pred = probs.max(axis=1)
    p_true = probs[np.arange(len(split.labels)), split.labels]
    for i, example_id in enumerate(split.example_ids):
        sink.append(
            PredictionRecord(
                run_id=run_id,
                example_id=example_id,
                epoch=epoch,
                split="train",
                true_label=int(split.labels[i]),
                pred_label=int(preds[i]),
                p_pred=float(p_pred[i]),
                p_true=float(p_true[i]),
            )
        )


def train(
    model: MultiHeadModel,
    tasks: Sequence[TaskDataset],
    epochs: int = 10,
    lr: float = 0.1,
    batch_size: int = 32,
    seed: int = 0,
    run_ids: Mapping[str, str] | None = None,
) -> TrainResult:
    """First-stage training; returns per-task dynamics and loss curves.

    ``run_ids`` names each task's dynamics run (default: the task id).
    The model is updated in place and also returned.
    """
    _check_hyperparams(epochs, lr, batch_size)
    if not tasks:
        raise InvalidSpec("train needs at least one dataset")
    if len({d.task_id for d in tasks}) != len(tasks):
        raise InvalidSpec("duplicate task_id in datasets")
    for dataset in tasks:
        model.head(dataset.task_id)  # raises MissingHead early
    if run_ids is None:
        run_ids = {d.task_id: d.task_id for d in tasks}

    rows_per_task = [
        (d.task_id, np.arange(len(d.train.example_ids))) for d in tasks
    ]
    by_task = {d.task_id: d for d in tasks}
    records: dict[str, list[PredictionRecord]] = {d.task_id: [] for d in tasks}
    losses: dict[str, list[float]] = {d.task_id: [] for d in tasks}

    for epoch in range(1, epochs + 1):
        epoch_loss: dict[str, list[float]] = {d.task_id: [] for d in tasks}
        for task_id, rows in _epoch_batches(rows_per_task, batch_size, seed, epoch):
            dataset = by_task[task_id]
            X = dataset.train.X[rows]
            y = dataset.train.labels[rows]
            loss, grads = loss_and_grads(model, X, y, task_id)
            sgd_step(model, grads, lr)
            epoch_loss[task_id].append(loss)
        for dataset in tasks:
            batch_losses = epoch_loss[dataset.task_id]
            losses[dataset.task_id].append(
                float(np.mean(batch_losses)) if batch_losses else float("nan")
            )
            _log_epoch(model, dataset, run_ids[dataset.task_id], epoch, records[dataset.task_id])

    dynamics = {
        d.task_id: ingest_run(records[d.task_id], run_ids[d.task_id]) for d in tasks
    }
    return TrainResult(
        model=model,
        dynamics=dynamics,
        epoch_losses={tid: tuple(vals) for tid, vals in losses.items()},
        records={tid: tuple(recs) for tid, recs in records.items()},
    )


def _subset_rows(dataset: TaskDataset, example_ids: Iterable[str]) -> np.ndarray:
    index = {example_id: i for i, example_id in enumerate(dataset.train.example_ids)}
    rows = []
    for example_id in sorted(example_ids):
        if example_id not in index:
            raise UnknownExampleId(
                f"subset id {example_id!r} is not in task {dataset.task_id!r}'s training set"
            )
        rows.append(index[example_id])
    return np.asarray(rows, dtype=int)


def second_stage(
    model: MultiHeadModel,
    tasks: Sequence[TaskDataset],
    subsets: Mapping[str, SelectionResult | Sequence[str]],
    epochs: int = 4,
    lr: float = 0.1,
    batch_size: int = 32,
    seed: int = 0,
) -> MultiHeadModel:
    """Continue SGD on only the selected examples of each task.

    With the full training set selected and the same seed, this reproduces
    plain continued training batch for batch. An empty selection is a no-op
    (with a warning), not an error.
    """
    _check_hyperparams(epochs, lr, batch_size)
    by_task = {d.task_id: d for d in tasks}
    rows_per_task: list[tuple[str, np.ndarray]] = []
    for dataset in tasks:
        chosen = subsets.get(dataset.task_id, ())
        ids = chosen.example_ids if isinstance(chosen, SelectionResult) else tuple(chosen)
        rows = _subset_rows(dataset, ids)
        if len(rows) > 0:
            rows_per_task.append((dataset.task_id, rows))
    if not rows_per_task:
        warnings.warn("second_stage: every subset is empty; model left unchanged")
        return model

    for epoch in range(1, epochs + 1):
        for task_id, rows in _epoch_batches(rows_per_task, batch_size, seed, epoch):
            dataset = by_task[task_id]
            X = dataset.train.X[rows]
            y = dataset.train.labels[rows]
            _, grads = loss_and_grads(model, X, y, task_id)
            sgd_step(model, grads, lr)
    return model


_SPLITS = ("train", "eval", "test", "ood")


def evaluate(model: MultiHeadModel, dataset: TaskDataset, split: str) -> float:
    """Argmax accuracy on one split of one task."""
    if split not in _SPLITS:
        raise InvalidSpec(f"split must be one of {_SPLITS}, got {split!r}")
    part: Split = {
        "train": dataset.train,
        "eval": dataset.eval_,
        "test": dataset.test,
        "ood": dataset.ood,
    }[split]
    if len(part.labels) == 0:
        raise InvalidSpec(f"split {split!r} of task {dataset.task_id!r} is empty")
    _, probs = forward(model, part.X, dataset.task_id)
    preds = probs.argmax(axis=1)
    return float(np.mean(preds == part.labels))
