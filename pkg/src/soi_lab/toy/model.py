"""Shared-encoder multi-head classifier with closed-form gradients.

One hidden tanh layer is shared by every task; each task owns an affine
head producing class logits. Everything is float64 numpy, single threaded,
and exactly reproducible. Gradients are derived by hand and guarded by a
central finite-difference check, so no autodiff dependency is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSpec, MissingHead, NonfiniteLoss
from .rng import stream


@dataclass
class Head:
    W: np.ndarray  # (hidden_dim, num_classes)
    b: np.ndarray  # (num_classes,)


@dataclass
class MultiHeadModel:
    """Parameters live in plain arrays; training mutates them in place."""

    W1: np.ndarray  # (input_dim, hidden_dim)
    b1: np.ndarray  # (hidden_dim,)
    heads: dict[str, Head]

    @property
    def input_dim(self) -> int:
        return self.W1.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[1]

    def head(self, task_id: str) -> Head:
        try:
            return self.heads[task_id]
        except KeyError:
            raise MissingHead(
                f"model has no head for task {task_id!r}; "
                f"known tasks: {sorted(self.heads)}"
            ) from None

    def parameters(self) -> list[tuple[str, np.ndarray]]:
        """All parameter arrays in a fixed, documented order."""
        params = [("encoder.W", self.W1), ("encoder.b", self.b1)]
        for task_id in sorted(self.heads):
            head = self.heads[task_id]
            params.append((f"head.{task_id}.W", head.W))
            params.append((f"head.{task_id}.b", head.b))
        return params

    def copy(self) -> "MultiHeadModel":
        return MultiHeadModel(
            W1=self.W1.copy(),
            b1=self.b1.copy(),
            heads={tid: Head(h.W.copy(), h.b.copy()) for tid, h in self.heads.items()},
        )


def params_equal(a: MultiHeadModel, b: MultiHeadModel) -> bool:
    """Exact (bitwise value) equality of every parameter array."""
    pa, pb = a.parameters(), b.parameters()
    if [name for name, _ in pa] != [name for name, _ in pb]:
        return False
    return all(np.array_equal(arr_a, arr_b) for (_, arr_a), (_, arr_b) in zip(pa, pb))


def init_model(
    input_dim: int, hidden_dim: int, head_sizes: dict[str, int], seed: int
) -> MultiHeadModel:
    """Gaussian init scaled by 1/sqrt(fan_in); biases start at zero."""
    if input_dim < 1 or hidden_dim < 1:
        raise InvalidSpec(f"input_dim and hidden_dim must be >= 1, got {input_dim}, {hidden_dim}")
    if not head_sizes:
        raise InvalidSpec("at least one head is required")
    rng = stream(seed, "init", "encoder")
    W1 = rng.normal(0.0, 1.0 / np.sqrt(input_dim), size=(input_dim, hidden_dim))
    b1 = np.zeros(hidden_dim)
    heads = {}
    for task_id in sorted(head_sizes):
        num_classes = head_sizes[task_id]
        if num_classes < 2:
            raise InvalidSpec(f"head {task_id!r} needs >= 2 classes, got {num_classes}")
        head_rng = stream(seed, "init", "head", task_id)
        heads[task_id] = Head(
            W=head_rng.normal(0.0, 1.0 / np.sqrt(hidden_dim), size=(hidden_dim, num_classes)),
            b=np.zeros(num_classes),
        )
    return MultiHeadModel(W1=W1, b1=b1, heads=heads)


def forward(model: MultiHeadModel, X: np.ndarray, task_id: str) -> tuple[np.ndarray, np.ndarray]:
    """Hidden activations and class probabilities for a batch."""
    head = model.head(task_id)
    Z = np.tanh(X @ model.W1 + model.b1)
    logits = Z @ head.W + head.b
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    return Z, probs


def predict(model: MultiHeadModel, X: np.ndarray, task_id: str) -> np.ndarray:
    _, probs = forward(model, X, task_id)
    return probs.argmax(axis=1)


def loss_value(model: MultiHeadModel, X: np.ndarray, y: np.ndarray, task_id: str) -> float:
    """Mean softmax cross-entropy, computed in log space for stability."""
    head = model.head(task_id)
    Z = np.tanh(X @ model.W1 + model.b1)
    logits = Z @ head.W + head.b
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_norm - shifted[np.arange(len(y)), y]))
    if not np.isfinite(loss):
        raise NonfiniteLoss(f"loss for task {task_id!r} is {loss!r}")
    return loss


def loss_and_grads(
    model: MultiHeadModel, X: np.ndarray, y: np.ndarray, task_id: str
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss plus its gradient for every parameter, keyed like parameters().

    Heads not involved in the batch get explicit zero gradients so the full
    parameter set is always covered.
    """
    head = model.head(task_id)
    n = len(y)
    Z, probs = forward(model, X, task_id)
    loss = loss_value(model, X, y, task_id)

    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    dW2 = Z.T @ dlogits
    db2 = dlogits.sum(axis=0)
    dZ = dlogits @ head.W.T
    dpre = dZ * (1.0 - Z * Z)
    dW1 = X.T @ dpre
    db1 = dpre.sum(axis=0)

    grads = {"encoder.W": dW1, "encoder.b": db1}
    for tid, h in model.heads.items():
        if tid == task_id:
            grads[f"head.{tid}.W"] = dW2
            grads[f"head.{tid}.b"] = db2
        else:
            grads[f"head.{tid}.W"] = np.zeros_like(h.W)
            grads[f"head.{tid}.b"] = np.zeros_like(h.b)
    return loss, grads


def sgd_step(model: MultiHeadModel, grads: dict[str, np.ndarray], lr: float) -> None:
    for name, param in model.parameters():
        param -= lr * grads[name]


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    tolerance: float
    passed: bool
    per_param: dict[str, float]


def grad_check(
    model: MultiHeadModel,
    X: np.ndarray,
    y: np.ndarray,
    task_id: str,
    step: float = 1e-5,
    tolerance: float = 1e-5,
    analytic: dict[str, np.ndarray] | None = None,
) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    Every scalar parameter is perturbed by +-step. The relative error
    denominator is floored at 1e-3 so near-zero gradient entries are judged
    on absolute error instead of amplified rounding noise. ``analytic`` lets
    tests feed a deliberately wrong gradient as a negative control.
    """
    if len(y) == 0:
        raise InvalidSpec("grad_check needs a non-empty batch")
    if analytic is None:
        _, analytic = loss_and_grads(model, X, y, task_id)
    per_param: dict[str, float] = {}
    worst = ("", 0.0)
    for name, param in model.parameters():
        grad = analytic[name]
        flat = param.reshape(-1)
        worst_here = 0.0
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            loss_plus = loss_value(model, X, y, task_id)
            flat[i] = orig - step
            loss_minus = loss_value(model, X, y, task_id)
            flat[i] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            a = grad.reshape(-1)[i]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-3)
            if rel > worst_here:
                worst_here = rel
        per_param[name] = worst_here
        if worst_here > worst[1]:
            worst = (name, worst_here)
    return GradCheckReport(
        max_rel_error=worst[1],
        worst_param=worst[0],
        tolerance=tolerance,
        passed=worst[1] < tolerance,
        per_param=per_param,
    )
