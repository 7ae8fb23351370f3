"""Brute-force reference implementations used to check the library.

These deliberately take different numerical routes than the package:
PCA via covariance eigendecomposition instead of SVD, LDA via an explicit
scatter-matrix assembly and an eigendecomposition-based inverse instead of a
direct solve, macro-F1 via scikit-learn, and the cross-validation loop as a
straightforward reimplementation.
"""

import math

import numpy as np
from sklearn.metrics import f1_score


def pca_oracle(points, c=None, center=True):
    """Principal axes and eigenvalues from an explicit covariance matrix."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if center:
        cov = np.atleast_2d(np.cov(points, rowvar=False, ddof=1))
    else:
        cov = points.T @ points / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    components = evecs[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    if c is None:
        c = len(evals)
    return components[:c], evals[:c]


def lda_oracle(X, y, labels):
    """Closed-form pooled-covariance LDA via outer-product scatter and eigh inverse."""
    X = np.asarray(X, dtype=np.float64)
    n, m = X.shape
    neg = np.array([X[i] for i in range(n) if y[i] == labels[0]])
    pos = np.array([X[i] for i in range(n) if y[i] == labels[1]])
    mu_neg = neg.mean(axis=0)
    mu_pos = pos.mean(axis=0)
    scatter = np.zeros((m, m))
    for row in neg:
        d = row - mu_neg
        scatter += np.outer(d, d)
    for row in pos:
        d = row - mu_pos
        scatter += np.outer(d, d)
    sigma = scatter / n
    trace = float(np.trace(sigma))
    lam = 1e-6 * trace / m if trace > 0 else 1e-6
    evals, evecs = np.linalg.eigh(sigma + lam * np.eye(m))
    inverse = evecs @ np.diag(1.0 / evals) @ evecs.T
    weights = inverse @ (mu_pos - mu_neg)
    p_neg, p_pos = len(neg) / n, len(pos) / n
    bias = float(-0.5 * (mu_neg + mu_pos) @ weights + math.log(p_pos / p_neg))
    return weights, bias


def macro_f1_oracle(predicted, gold, labels):
    return float(
        f1_score(gold, predicted, labels=list(labels), average="macro", zero_division=0)
    )


def reference_select(pair_set, grid, k, seed, shift=False):
    """Independent run of the pair-fold cross-validation protocol.

    Returns (chosen_c, {c: mean macro-F1}).
    """
    n = pair_set.n_pairs
    permutation = np.random.default_rng(seed).permutation(n)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    folds, start = [], 0
    for size in sizes:
        folds.append(permutation[start : start + size])
        start += size

    labels = ("neutral", "profane")
    means = {}
    for c in grid:
        scores = []
        for i in range(k):
            held = folds[i]
            train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
            train_a = pair_set.vectors_a[train_idx]
            train_b = pair_set.vectors_b[train_idx]
            if shift:
                half = (train_a - train_b) / 2.0
                learn_points = np.vstack([half, -half])
            else:
                learn_points = np.vstack([train_a, train_b])
            c_eff = min(c, 2 * len(train_idx) - 1, pair_set.dim)
            components, _ = pca_oracle(learn_points, c=c_eff, center=True)
            X_train = np.vstack([train_a, train_b]) @ components.T
            y_train = [labels[1]] * len(train_idx) + [labels[0]] * len(train_idx)
            weights, bias = lda_oracle(X_train, y_train, labels)
            held_a = pair_set.vectors_a[held]
            held_b = pair_set.vectors_b[held]
            X_test = np.vstack([held_a, held_b]) @ components.T
            y_test = [labels[1]] * len(held) + [labels[0]] * len(held)
            predicted = [
                labels[1] if weights @ x + bias >= 0 else labels[0] for x in X_test
            ]
            scores.append(macro_f1_oracle(predicted, y_test, labels))
        means[c] = sum(scores) / k
    best = max(means.values())
    return min(c for c in grid if means[c] == best), means
