"""Instance-weight-aware linear classifiers trained by full-batch
gradient descent: logistic regression and a smoothed-hinge linear SVM.

Both losses are differentiable so analytic gradients can be checked
against finite differences. The weighted data loss is normalized by the
total instance weight; the L2 penalty applies to the weights only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import TrainingError


@dataclass(frozen=True)
class Hyper:
    learning_rate: float = 0.1
    l2: float = 1e-3
    epochs: int = 500
    seed: int = 0


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: str
    hyper: Hyper = field(default_factory=Hyper)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "weights": list(self.weights),
                "bias": self.bias,
                "hyper": {
                    "learning_rate": self.hyper.learning_rate,
                    "l2": self.hyper.l2,
                    "epochs": self.hyper.epochs,
                    "seed": self.hyper.seed,
                },
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        obj = json.loads(text)
        return cls(
            weights=np.array(obj["weights"], dtype=np.float64),
            bias=float(obj["bias"]),
            kind=obj["kind"],
            hyper=Hyper(**obj["hyper"]),
        )


def _logistic_loss_grad(z: np.ndarray):
    # z = y * score with y in {-1, +1}; stable log(1 + exp(-z))
    loss = np.logaddexp(0.0, -z)
    dz = -1.0 / (1.0 + np.exp(z))
    return loss, dz


def _smooth_hinge_loss_grad(z: np.ndarray):
    # quadratically smoothed hinge: linear for z <= 0, quadratic on (0, 1)
    loss = np.where(z >= 1.0, 0.0, np.where(z <= 0.0, 0.5 - z, 0.5 * (1.0 - z) ** 2))
    dz = np.where(z >= 1.0, 0.0, np.where(z <= 0.0, -1.0, z - 1.0))
    return loss, dz


_LOSSES = {"logistic": _logistic_loss_grad, "hinge": _smooth_hinge_loss_grad}


def loss_and_grad(w, b, X, y_signed, sample_weight, kind, l2):
    """Weighted regularized loss and its gradient wrt (w, b)."""
    z = y_signed * (X @ w + b)
    loss_vec, dz = _LOSSES[kind](z)
    total_w = sample_weight.sum()
    loss = float(loss_vec @ sample_weight) / total_w + l2 * float(w @ w)
    coeff = (sample_weight * dz * y_signed) / total_w
    grad_w = X.T @ coeff + 2.0 * l2 * w
    grad_b = float(coeff.sum())
    return loss, grad_w, grad_b


def train(d: Dataset, kind: str = "logistic", hyper: Hyper = Hyper()) -> LinearModel:
    """Fit a linear model on a (possibly weighted) dataset.

    Deterministic: zero initialization, full-batch descent with a fixed
    learning rate and epoch count.
    """
    if kind not in _LOSSES:
        raise ValueError(f"unknown model kind: {kind}")
    if d.n < 2 or len(np.unique(d.labels)) < 2:
        raise TrainingError("training requires both classes present")
    X = d.features
    y_signed = np.where(d.labels == 1, 1.0, -1.0)
    sw = d.effective_weights()
    w = np.zeros(d.d)
    b = 0.0
    for _ in range(hyper.epochs):
        _, gw, gb = loss_and_grad(w, b, X, y_signed, sw, kind, hyper.l2)
        w = w - hyper.learning_rate * gw
        b = b - hyper.learning_rate * gb
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise TrainingError("training diverged to non-finite parameters")
    return LinearModel(weights=w, bias=b, kind=kind, hyper=hyper)


def predict(m: LinearModel, X: np.ndarray) -> np.ndarray:
    """Label 1 iff w.x + b >= 0 (exact boundary ties go to 1)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != len(m.weights):
        raise ValueError(
            f"arity mismatch: model expects {len(m.weights)} features, got {X.shape[1]}"
        )
    return (X @ m.weights + m.bias >= 0.0).astype(np.int64)


def feature_importance(m: LinearModel, columns) -> list[tuple[str, float]]:
    """|weight| importances normalized to sum 1, one-hot groups aggregated.

    Sorted descending, ties by name.
    """
    agg: dict[str, float] = {}
    for meta, w in zip(columns, m.weights):
        name = meta.group if meta.kind == "onehot" and meta.group else meta.name
        agg[name] = agg.get(name, 0.0) + abs(float(w))
    total = sum(agg.values())
    if total > 0:
        agg = {k: v / total for k, v in agg.items()}
    return sorted(agg.items(), key=lambda kv: (-kv[1], kv[0]))
