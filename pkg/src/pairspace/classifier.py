"""Two-class linear discriminant analysis and classification metrics.

The discriminant uses the pooled (maximum-likelihood) within-class
covariance, ridge-regularized for invertibility, and the shared-covariance
Gaussian posterior rule for the bias.  Metrics are per-class
precision/recall/F1 with the 0/0 := 0 convention and macro-F1 as the mean of
the two class F1 scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError

_FLOAT_FMT = "{:.17g}"


@dataclass(frozen=True)
class LdaModel:
    """Linear two-class discriminant: ``sign(weights . x + bias)`` mapped to labels.

    ``labels`` is the (negative, positive) class pair; a score of exactly
    zero predicts the positive class.  Immutable after fitting.
    """

    weights: np.ndarray
    bias: float
    labels: tuple[str, str]
    priors: tuple[float, float]

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 1 or weights.shape[0] < 1:
            raise ValidationError("weights must be a nonempty vector")
        if not np.all(np.isfinite(weights)) or not math.isfinite(self.bias):
            raise ValidationError("weights and bias must be finite")
        if len(set(self.labels)) != 2:
            raise ValidationError("labels must name two distinct classes")
        if len(self.priors) != 2 or min(self.priors) < 0 or abs(sum(self.priors) - 1.0) > 1e-9:
            raise ValidationError("priors must be two nonnegative reals summing to 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def fit_lda(X, y, labels: tuple[str, str] | None = None, priors: str = "empirical") -> LdaModel:
    """Fit a two-class LDA model.

    The weight vector solves ``(S + lam I) w = mu_pos - mu_neg`` where S is
    the pooled maximum-likelihood within-class covariance and
    ``lam = 1e-6 * trace(S) / m`` (falling back to an absolute 1e-6 ridge
    when the scatter is exactly zero).  The bias places the boundary at the
    shared-covariance Gaussian posterior decision rule.

    Parameters
    ----------
    X : (n, m) array of feature vectors
    y : length-n sequence of class labels
    labels : optional (negative, positive) pair; inferred as the sorted
        distinct labels when omitted
    priors : "empirical" (class frequencies) or "uniform"

    Raises
    ------
    ValidationError
        On single-class input, non-finite features, or mismatched lengths.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"X must be a 2-D array, got shape {X.shape}")
    y = list(y)
    if len(y) != X.shape[0]:
        raise ValidationError("X and y must have equal length")
    if X.shape[0] < 2:
        raise ValidationError("need at least two training vectors")
    if not np.all(np.isfinite(X)):
        raise ValidationError("non-finite features in X")
    observed = set(y)
    if labels is None:
        if len(observed) != 2:
            raise ValidationError(
                f"need exactly two classes in y, found {sorted(observed)}"
            )
        labels = tuple(sorted(observed))
    stray = observed - set(labels)
    if stray:
        raise ValidationError(f"labels outside the declared pair: {sorted(stray)}")
    if observed != set(labels):
        raise ValidationError("both classes must be present in y")

    y_arr = np.asarray(y, dtype=object)
    mask_pos = y_arr == labels[1]
    X_neg, X_pos = X[~mask_pos], X[mask_pos]
    n, m = X.shape
    mu_neg = X_neg.mean(axis=0)
    mu_pos = X_pos.mean(axis=0)
    dev_neg = X_neg - mu_neg
    dev_pos = X_pos - mu_pos
    sigma = (dev_neg.T @ dev_neg + dev_pos.T @ dev_pos) / n
    trace = float(np.trace(sigma))
    # zero scatter (all points per class identical) still needs a usable ridge
    lam = 1e-6 * trace / m if trace > 0.0 else 1e-6
    try:
        weights = np.linalg.solve(sigma + lam * np.eye(m), mu_pos - mu_neg)
    except np.linalg.LinAlgError:
        raise ValidationError(
            "within-class covariance is singular even after regularization"
        ) from None
    if priors == "empirical":
        prior_pair = (X_neg.shape[0] / n, X_pos.shape[0] / n)
    elif priors == "uniform":
        prior_pair = (0.5, 0.5)
    else:
        raise ValidationError(f"priors must be 'empirical' or 'uniform', got {priors!r}")
    bias = float(-0.5 * (mu_neg + mu_pos) @ weights + math.log(prior_pair[1] / prior_pair[0]))
    return LdaModel(weights=weights, bias=bias, labels=tuple(labels), priors=prior_pair)


def decision_score(model: LdaModel, x) -> float:
    """Signed discriminant score ``weights . x + bias``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dim,):
        raise ValidationError(
            f"dimension mismatch: expected length {model.dim}, got shape {x.shape}"
        )
    return float(model.weights @ x + model.bias)


def predict(model: LdaModel, x) -> str:
    """Predicted label; a score of exactly zero goes to the positive class."""
    return model.labels[1] if decision_score(model, x) >= 0.0 else model.labels[0]


def predict_batch(model: LdaModel, X) -> list[str]:
    """Predicted labels for every row of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise ValidationError(
            f"dimension mismatch: expected (n, {model.dim}), got shape {X.shape}"
        )
    scores = X @ model.weights + model.bias
    return [model.labels[1] if s >= 0.0 else model.labels[0] for s in scores]


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalScores:
    """Macro-F1 plus per-class precision/recall/F1 and gold support counts."""

    macro_f1: float
    per_class: dict
    support: dict


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def evaluate(predicted, gold, labels: tuple[str, str] | None = None) -> EvalScores:
    """Score predictions against gold labels for a two-class task.

    Precision, recall and F1 use the 0/0 := 0 convention; macro-F1 is the
    arithmetic mean of the two per-class F1 values, computed over both
    declared classes even when one of them never occurs.
    """
    predicted = list(predicted)
    gold = list(gold)
    if len(predicted) != len(gold):
        raise ValidationError("predicted and gold must have equal length")
    if not gold:
        raise ValidationError("cannot evaluate an empty label sequence")
    if labels is None:
        inferred = sorted(set(gold) | set(predicted))
        if len(inferred) != 2:
            raise ValidationError(
                f"cannot infer a two-class label pair from {inferred}; pass labels"
            )
        labels = tuple(inferred)
    stray = (set(gold) | set(predicted)) - set(labels)
    if stray:
        raise ValidationError(f"labels outside the declared pair: {sorted(stray)}")

    per_class = {}
    support = {}
    f1_values = []
    for label in labels:
        tp = sum(1 for p, g in zip(predicted, gold) if p == label and g == label)
        fp = sum(1 for p, g in zip(predicted, gold) if p == label and g != label)
        fn = sum(1 for p, g in zip(predicted, gold) if p != label and g == label)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[label] = ClassScores(precision=precision, recall=recall, f1=f1)
        support[label] = tp + fn
        f1_values.append(f1)
    return EvalScores(
        macro_f1=(f1_values[0] + f1_values[1]) / 2.0,
        per_class=per_class,
        support=support,
    )


def save_lda(model: LdaModel, destination) -> None:
    """Write a model as decimal text, round-trippable bit-exactly."""
    for label in model.labels:
        if "\t" in label or "\n" in label:
            raise ValidationError("labels must not contain tabs or newlines")
    lines = [
        "pairspace-lda 1",
        "labels\t" + "\t".join(model.labels),
        "priors " + " ".join(_FLOAT_FMT.format(p) for p in model.priors),
        "bias " + _FLOAT_FMT.format(model.bias),
        "weights " + " ".join(_FLOAT_FMT.format(w) for w in model.weights),
    ]
    text = "\n".join(lines) + "\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def load_lda(source) -> LdaModel:
    """Read a model previously written by :func:`save_lda`."""
    from .embeddings import _iter_lines

    lines = [line.rstrip("\n") for line in _iter_lines(source) if line.strip()]
    if not lines or lines[0].split() != ["pairspace-lda", "1"]:
        raise FormatError("not a pairspace LDA file (bad magic line)", line=1)
    fields: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        key, _, rest = line.partition("\t" if line.startswith("labels") else " ")
        if key in fields:
            raise FormatError(f"repeated field {key!r}", line=lineno)
        fields[key] = rest
    missing = {"labels", "priors", "bias", "weights"} - set(fields)
    if missing:
        raise FormatError(f"missing fields: {sorted(missing)}")
    label_parts = fields["labels"].split("\t")
    if len(label_parts) != 2:
        raise FormatError("labels field must hold exactly two tab-separated names")
    try:
        priors = tuple(float(v) for v in fields["priors"].split())
        bias = float(fields["bias"])
        weights = np.array([float(v) for v in fields["weights"].split()])
    except ValueError:
        raise FormatError("non-numeric value in LDA file") from None
    return LdaModel(
        weights=weights, bias=bias, labels=tuple(label_parts), priors=priors
    )
