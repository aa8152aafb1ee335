"""Synthetic classification tasks: Gaussian blobs with controllable trouble.

Each task is a labeled mixture of Gaussians. Training labels are optionally
corrupted: a fraction of examples gets a uniformly random wrong label. Those
corrupted points sit inside another class's blob with the wrong target,
which is what produces never-learned and forgettable examples at desk
scale. The OOD split draws from the same blobs shifted in input space with
inflated noise (covariate shift).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSpec
from .rng import stream


@dataclass(frozen=True)
class SyntheticTaskSpec:
    task_id: str
    num_classes: int
    input_dim: int
    cluster_means: tuple[tuple[float, ...], ...]
    noise_std: float
    label_noise_rate: float
    n_train: int
    n_eval: int
    n_test: int
    ood_mean_shift: tuple[float, ...]
    ood_noise_std: float
    seed: int

    def __post_init__(self) -> None:
        if not self.task_id:
            raise InvalidSpec("task_id must be non-empty")
        if self.num_classes < 2:
            raise InvalidSpec(f"num_classes must be >= 2, got {self.num_classes}")
        if self.input_dim < 2:
            raise InvalidSpec(f"input_dim must be >= 2, got {self.input_dim}")
        means = np.asarray(self.cluster_means, dtype=float)
        if means.shape != (self.num_classes, self.input_dim):
            raise InvalidSpec(
                f"cluster_means must be {self.num_classes}x{self.input_dim}, "
                f"got shape {means.shape}"
            )
        if len({tuple(row) for row in self.cluster_means}) != self.num_classes:
            raise InvalidSpec("cluster_means must be pairwise distinct")
        if not self.noise_std > 0:
            raise InvalidSpec(f"noise_std must be > 0, got {self.noise_std}")
        if not 0 <= self.label_noise_rate < 1:
            raise InvalidSpec(
                f"label_noise_rate must lie in [0, 1), got {self.label_noise_rate}"
            )
        if self.n_train < 1:
            raise InvalidSpec(f"n_train must be >= 1, got {self.n_train}")
        if self.n_eval < 0 or self.n_test < 0:
            raise InvalidSpec("n_eval and n_test must be >= 0")
        if len(self.ood_mean_shift) != self.input_dim:
            raise InvalidSpec(
                f"ood_mean_shift must have {self.input_dim} components, "
                f"got {len(self.ood_mean_shift)}"
            )
        if not self.ood_noise_std > 0:
            raise InvalidSpec(f"ood_noise_std must be > 0, got {self.ood_noise_std}")


def default_cluster_means(num_classes: int, input_dim: int, radius: float = 3.0) -> tuple[tuple[float, ...], ...]:
    """Evenly spaced means on a circle in the first two input dimensions."""
    means = np.zeros((num_classes, input_dim))
    angles = 2 * np.pi * np.arange(num_classes) / num_classes
    means[:, 0] = radius * np.cos(angles)
    means[:, 1] = radius * np.sin(angles)
    return tuple(tuple(float(v) for v in row) for row in means)


@dataclass(frozen=True)
class Split:
    """One dataset split. ``labels`` is what training/evaluation targets."""

    X: np.ndarray
    labels: np.ndarray
    example_ids: tuple[str, ...]


@dataclass(frozen=True)
class TaskDataset:
    spec: SyntheticTaskSpec
    train: Split
    eval_: Split
    test: Split
    ood: Split
    # which train labels were flipped; kept for diagnostics only
    train_noise_mask: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def task_id(self) -> str:
        return self.spec.task_id

    @property
    def num_classes(self) -> int:
        return self.spec.num_classes


def _draw_split(
    spec: SyntheticTaskSpec,
    split_name: str,
    n: int,
    means: np.ndarray,
    noise_std: float,
) -> tuple[np.ndarray, np.ndarray]:
    rng = stream(spec.seed, spec.task_id, split_name)
    labels = rng.integers(0, spec.num_classes, size=n)
    X = means[labels] + rng.normal(0.0, noise_std, size=(n, spec.input_dim))
    return X, labels


def _example_ids(task_id: str, split_name: str, n: int) -> tuple[str, ...]:
    # zero-padded so lexicographic id order equals row order
    width = max(5, len(str(max(n - 1, 0))))
    return tuple(f"{task_id}-{split_name}-{i:0{width}d}" for i in range(n))


def generate_dataset(spec: SyntheticTaskSpec) -> TaskDataset:
    """Materialize all four splits of one task, fully determined by the spec."""
    means = np.asarray(spec.cluster_means, dtype=float)

    X_train, clean = _draw_split(spec, "train", spec.n_train, means, spec.noise_std)
    noise_rng = stream(spec.seed, spec.task_id, "label_noise")
    flip = noise_rng.random(spec.n_train) < spec.label_noise_rate
    # uniform among the other classes, never a no-op flip
    offsets = noise_rng.integers(1, spec.num_classes, size=spec.n_train)
    observed = np.where(flip, (clean + offsets) % spec.num_classes, clean)
    train = Split(X_train, observed, _example_ids(spec.task_id, "train", spec.n_train))

    X_eval, y_eval = _draw_split(spec, "eval", spec.n_eval, means, spec.noise_std)
    eval_ = Split(X_eval, y_eval, _example_ids(spec.task_id, "eval", spec.n_eval))

    X_test, y_test = _draw_split(spec, "test", spec.n_test, means, spec.noise_std)
    test = Split(X_test, y_test, _example_ids(spec.task_id, "test", spec.n_test))

    ood_means = means + np.asarray(spec.ood_mean_shift, dtype=float)
    ood_rng = stream(spec.seed, spec.task_id, "ood")
    y_ood = ood_rng.integers(0, spec.num_classes, size=spec.n_test)
    X_ood = ood_means[y_ood] + ood_rng.normal(
        0.0, spec.ood_noise_std, size=(spec.n_test, spec.input_dim)
    )
    ood = Split(X_ood, y_ood, _example_ids(spec.task_id, "ood", spec.n_test))

    return TaskDataset(spec=spec, train=train, eval_=eval_, test=test, ood=ood,
                       train_noise_mask=flip)
