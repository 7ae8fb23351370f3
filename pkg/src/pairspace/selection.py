"""Intrinsic selection of the subspace component count by k-fold cross-validation.

Pairs (never individual members) are shuffled into folds; for every fold and
every candidate count c, a subspace is learned on the held-in pairs, an LDA
is fit on their projected members (labeled by pair role), and macro-F1 is
measured on the projected held-out members.  The smallest c attaining the
best fold-averaged macro-F1 wins.  No task data is touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import evaluate, fit_lda, predict_batch
from .errors import ValidationError
from .subspace import EmbeddedPairSet, SubspaceMode, mean_shift, principal_axes

_FLOAT_FMT = "{:.17g}"

# role labels for pair members: the a-side carries the contrast, the b-side is neutral
ROLE_LABELS = ("neutral", "profane")


@dataclass(frozen=True)
class ComponentSelection:
    """Outcome of the intrinsic component-count search.

    ``curve`` holds (c, mean macro-F1, standard error) per candidate, in
    ascending c; ``chosen_c`` attains the maximum mean, ties broken by the
    smallest c.
    """

    chosen_c: int
    curve: tuple
    k_folds: int
    seed: int
    shifted: bool = False

    def __post_init__(self):
        best = max(mean for _, mean, _ in self.curve)
        expected = min(c for c, mean, _ in self.curve if mean == best)
        if self.chosen_c != expected:
            raise ValidationError("chosen_c must be the smallest argmax of the curve")


def fold_indices(n_items: int, k: int, seed: int) -> list[np.ndarray]:
    """Partition ``range(n_items)`` into k folds by a seeded shuffle.

    Every item lands in exactly one fold; the first ``n_items % k`` folds are
    one item larger.  Deterministic per (n_items, k, seed).
    """
    if k < 2:
        raise ValidationError(f"k must be at least 2, got {k}")
    if n_items < k:
        raise ValidationError(f"cannot split {n_items} items into {k} folds")
    permutation = np.random.default_rng(seed).permutation(n_items)
    return np.array_split(permutation, k)


def max_component_count(n_pairs: int, dim: int, k: int) -> int:
    """Largest legal c for k-fold selection over ``n_pairs`` pairs.

    The largest training split holds ``n_pairs - n_pairs // k`` pairs, i.e.
    2x that many points, whose centered PCA has rank at most one less.
    """
    largest_train = n_pairs - n_pairs // k
    return min(2 * largest_train - 1, dim)


def default_component_grid(n_pairs: int, dim: int, k: int = 5, cap: int = 128) -> list[int]:
    """All candidate counts 1..min(legal maximum, ``cap``).

    The cap bounds runtime on large inputs; pass an explicit grid to go
    beyond it.
    """
    return list(range(1, min(max_component_count(n_pairs, dim, k), cap) + 1))


def select_components(
    pair_set: EmbeddedPairSet,
    c_grid=None,
    k: int = 5,
    seed: int = 0,
    shift: bool = False,
    center: bool = True,
) -> ComponentSelection:
    """Choose the component count by k-fold cross-validation over the pairs.

    Folds are whole pairs, so the two members of a pair are never split
    between training and held-out data.  With ``shift=True`` each fold's
    subspace is learned on the mean-shifted training pairs while the vectors
    being classified stay raw, mirroring the shifted-subspace representation;
    the default learns on the raw training pairs.

    Parameters
    ----------
    pair_set : RAW-mode pair set
    c_grid : candidate counts; defaults to 1..min(legal maximum, 128)
    k : number of folds (>= 2, and at most the number of pairs)
    seed : controls the fold shuffle
    shift : learn each fold's subspace on mean-shifted pairs
    center : center the PCA input by its global mean

    Returns
    -------
    ComponentSelection
        Identical inputs always produce an identical selection.
    """
    if pair_set.mode is not SubspaceMode.RAW:
        raise ValidationError(
            "selection expects a RAW-mode pair set; use shift=True for the "
            "shifted-subspace flavor"
        )
    n = pair_set.n_pairs
    folds = fold_indices(n, k, seed)
    if c_grid is None:
        grid = default_component_grid(n, pair_set.dim, k)
    else:
        grid = sorted({int(c) for c in c_grid})
    if not grid:
        raise ValidationError("component grid is empty")
    cap = max_component_count(n, pair_set.dim, k)
    for c in grid:
        if c < 1 or c > cap:
            raise ValidationError(
                f"grid entry c={c} out of range: need 1 <= c <= {cap}"
            )

    fold_scores: dict[int, list[float]] = {c: [] for c in grid}
    for fold_id in range(k):
        held_out = folds[fold_id]
        held_in = np.concatenate([folds[j] for j in range(k) if j != fold_id])
        train = pair_set.subset(held_in)
        learn_source = mean_shift(train) if shift else train
        axes, _, _, _ = principal_axes(learn_source.stacked(), center=center)
        # smaller training folds support fewer components; clamp instead of failing
        fold_cap = min(2 * train.n_pairs - 1, pair_set.dim)
        train_points = train.stacked()
        test_points = pair_set.subset(held_out).stacked()
        y_train = [ROLE_LABELS[1]] * train.n_pairs + [ROLE_LABELS[0]] * train.n_pairs
        y_test = [ROLE_LABELS[1]] * len(held_out) + [ROLE_LABELS[0]] * len(held_out)
        for c in grid:
            basis = axes[: min(c, fold_cap)]
            model = fit_lda(train_points @ basis.T, y_train, labels=ROLE_LABELS)
            predictions = predict_batch(model, test_points @ basis.T)
            fold_scores[c].append(evaluate(predictions, y_test, ROLE_LABELS).macro_f1)

    curve = []
    for c in grid:
        scores = fold_scores[c]
        mean = sum(scores) / len(scores)
        stderr = float(np.std(scores, ddof=1) / math.sqrt(len(scores)))
        curve.append((c, mean, stderr))
    best = max(mean for _, mean, _ in curve)
    chosen = min(c for c, mean, _ in curve if mean == best)
    return ComponentSelection(
        chosen_c=chosen,
        curve=tuple(curve),
        k_folds=k,
        seed=seed,
        shifted=shift,
    )


def write_selection_curve(selection: ComponentSelection, destination) -> None:
    """Export the selection curve as tab-separated text (c, mean_f1, stderr)."""
    lines = ["c\tmean_f1\tstderr"]
    for c, mean, stderr in selection.curve:
        lines.append(f"{c}\t{_FLOAT_FMT.format(mean)}\t{_FLOAT_FMT.format(stderr)}")
    text = "\n".join(lines) + "\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)
