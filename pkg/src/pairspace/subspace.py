"""Minimal-pair sets, PCA subspace learning, projection, and subspace removal.

A contrastive subspace is learned from pairs of embeddings that differ only
in one semantic aspect (e.g. a profane word and its neutral counterpart).
PCA over all pair members yields an ordered orthonormal basis; vectors are
represented by their dot products with that basis, or neutralized by removing
their component inside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable
from .errors import FormatError, UnknownTokenError, ValidationError

_FLOAT_FMT = "{:.17g}"  # 17 significant digits: bit-exact float64 round trip


class SubspaceMode(str, Enum):
    """Whether pair vectors were used as-is (RAW) or per-pair mean-shifted (NORM)."""

    RAW = "raw"
    NORM = "norm"


@dataclass(frozen=True)
class EmbeddedPairSet:
    """N embedded minimal pairs with optional surface forms.

    ``vectors_a`` holds the contrast-positive members (e.g. profane words),
    ``vectors_b`` the neutral counterparts, row i of each forming pair i.
    In NORM mode every pair sums to the zero vector (within 1e-12 per
    coordinate).  Immutable after construction.
    """

    vectors_a: np.ndarray
    vectors_b: np.ndarray
    mode: SubspaceMode = SubspaceMode.RAW
    surfaces_a: tuple[str, ...] | None = None
    surfaces_b: tuple[str, ...] | None = None

    def __post_init__(self):
        a = np.asarray(self.vectors_a, dtype=np.float64)
        b = np.asarray(self.vectors_b, dtype=np.float64)
        if a.ndim != 2 or b.ndim != 2 or a.shape != b.shape:
            raise ValidationError(
                f"pair blocks must be equal-shape (N, dim) arrays, "
                f"got {a.shape} and {b.shape}"
            )
        if a.shape[0] < 1:
            raise ValidationError("a pair set needs at least one pair")
        if a.shape[1] < 1:
            raise ValidationError("pair vectors need at least one dimension")
        for surfaces, side in ((self.surfaces_a, "a"), (self.surfaces_b, "b")):
            if surfaces is not None and len(surfaces) != a.shape[0]:
                raise ValidationError(
                    f"surfaces_{side} must have one entry per pair"
                )
        if self.mode is SubspaceMode.NORM and np.max(np.abs(a + b)) > 1e-12:
            raise ValidationError(
                "NORM-mode pairs must sum to zero within 1e-12 per coordinate"
            )
        object.__setattr__(self, "vectors_a", a)
        object.__setattr__(self, "vectors_b", b)

    @property
    def n_pairs(self) -> int:
        return self.vectors_a.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors_a.shape[1]

    def stacked(self) -> np.ndarray:
        """All 2N member vectors, a-block first, as a (2N, dim) array."""
        return np.vstack([self.vectors_a, self.vectors_b])

    def subset(self, indices) -> "EmbeddedPairSet":
        """New set holding the pairs at ``indices``, in the given order."""
        indices = np.asarray(indices, dtype=int)
        take = lambda s: tuple(s[i] for i in indices) if s is not None else None
        return EmbeddedPairSet(
            vectors_a=self.vectors_a[indices],
            vectors_b=self.vectors_b[indices],
            mode=self.mode,
            surfaces_a=take(self.surfaces_a),
            surfaces_b=take(self.surfaces_b),
        )


def load_pair_file(source) -> list[tuple[str, str]]:
    """Read a minimal-pair file: one ``positive<TAB>neutral`` pair per line.

    Lines starting with ``#`` and blank lines are ignored.
    """
    from .embeddings import _iter_lines

    pairs: list[tuple[str, str]] = []
    lineno = 0
    for raw in _iter_lines(source):
        lineno += 1
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = raw.rstrip("\n").split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise FormatError(
                "expected exactly two tab-separated surface forms", line=lineno
            )
        pairs.append((fields[0].strip(), fields[1].strip()))
    return pairs


def embed_pairs(pair_list, table: EmbeddingTable) -> EmbeddedPairSet:
    """Look up both members of every (positive, neutral) surface pair.

    All missing tokens are collected and reported together, not just the
    first one.  The result is a RAW-mode set retaining the surface forms.
    """
    pair_list = list(pair_list)
    if not pair_list:
        raise ValidationError("pair list is empty")
    missing = []
    for sa, sb in pair_list:
        if sa not in table:
            missing.append(sa)
        if sb not in table:
            missing.append(sb)
    if missing:
        raise UnknownTokenError(missing)
    surfaces_a = tuple(sa for sa, _ in pair_list)
    surfaces_b = tuple(sb for _, sb in pair_list)
    vectors_a = np.vstack([table.lookup(s) for s in surfaces_a])
    vectors_b = np.vstack([table.lookup(s) for s in surfaces_b])
    return EmbeddedPairSet(
        vectors_a=vectors_a,
        vectors_b=vectors_b,
        mode=SubspaceMode.RAW,
        surfaces_a=surfaces_a,
        surfaces_b=surfaces_b,
    )


def mean_shift(pair_set: EmbeddedPairSet) -> EmbeddedPairSet:
    """Subtract each pair's mean from both members, producing a NORM-mode set.

    Computed as (a - b) / 2 and its negation, which equals subtracting the
    pair mean (a + b) / 2 from each member but makes the two shifted members
    exact floating-point negations of each other.
    """
    if pair_set.mode is not SubspaceMode.RAW:
        raise ValidationError("mean_shift expects a RAW-mode pair set")
    half_diff = (pair_set.vectors_a - pair_set.vectors_b) / 2.0
    return EmbeddedPairSet(
        vectors_a=half_diff,
        vectors_b=-half_diff,
        mode=SubspaceMode.NORM,
        surfaces_a=pair_set.surfaces_a,
        surfaces_b=pair_set.surfaces_b,
    )


def principal_axes(points, center: bool = True):
    """Full PCA of a point cloud via SVD.

    Returns ``(axes, variances, ratios, mean)`` where ``axes`` rows are unit
    principal directions ordered by descending variance, ``variances`` are
    the matching eigenvalues of the (n-1)-normalized covariance, and
    ``ratios`` are variances divided by their total.  With ``center=False``
    the data is decomposed around the origin and ``mean`` is the zero vector.

    Sign convention: each axis is flipped, if needed, so its coordinate of
    largest absolute value is positive.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValidationError("PCA needs a 2-D array with at least two points")
    n = points.shape[0]
    mean = points.mean(axis=0) if center else np.zeros(points.shape[1])
    centered = points - mean
    if not np.any(centered):
        raise ValidationError(
            "degenerate input: all points identical, variance is zero"
        )
    _, singular_values, axes = np.linalg.svd(centered, full_matrices=False)
    variances = singular_values**2 / (n - 1)
    ratios = variances / variances.sum()
    for row in axes:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return axes, variances, ratios, mean


@dataclass(frozen=True)
class Subspace:
    """Ordered orthonormal component basis with explained-variance bookkeeping.

    Rows of ``components`` are unit principal directions sorted by descending
    explained variance; ``mean`` is the centering offset used when learning
    (zeros when learned uncentered).
    """

    components: np.ndarray
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    mean: np.ndarray
    mode: SubspaceMode

    def __post_init__(self):
        components = np.asarray(self.components, dtype=np.float64)
        variance = np.asarray(self.explained_variance, dtype=np.float64)
        ratio = np.asarray(self.explained_variance_ratio, dtype=np.float64)
        mean = np.asarray(self.mean, dtype=np.float64)
        if components.ndim != 2 or components.shape[0] < 1:
            raise ValidationError("components must be a nonempty (c, dim) matrix")
        c, dim = components.shape
        if variance.shape != (c,) or ratio.shape != (c,):
            raise ValidationError("variance vectors must have one entry per component")
        if mean.shape != (dim,):
            raise ValidationError(f"mean must have length {dim}, got {mean.shape}")
        gram = components @ components.T
        if np.max(np.abs(gram - np.eye(c))) >= 1e-8:
            raise ValidationError("component rows are not orthonormal within 1e-8")
        if np.any(ratio < -1e-12) or ratio.sum() > 1.0 + 1e-9:
            raise ValidationError("explained-variance ratios must be in [0, 1]")
        if np.any(np.diff(ratio) > 1e-12):
            raise ValidationError("explained-variance ratios must be nonincreasing")
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "explained_variance", variance)
        object.__setattr__(self, "explained_variance_ratio", ratio)
        object.__setattr__(self, "mean", mean)

    @property
    def c(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1]


def learn_subspace(
    pair_set: EmbeddedPairSet, c: int, center: bool = True
) -> Subspace:
    """PCA subspace of the top ``c`` principal components of all pair members.

    All 2N member vectors enter the decomposition; with ``center=True``
    (default) they are first centered by their global mean.  Requires
    ``1 <= c <= min(2N - 1, dim)``.

    Raises
    ------
    ValidationError
        If ``c`` is out of range or all points are identical (zero variance).
    """
    c = int(c)
    cap = min(2 * pair_set.n_pairs - 1, pair_set.dim)
    if c < 1 or c > cap:
        raise ValidationError(
            f"c={c} out of range: need 1 <= c <= min(2N - 1, dim) = {cap}"
        )
    axes, variances, ratios, mean = principal_axes(pair_set.stacked(), center=center)
    return Subspace(
        components=axes[:c],
        explained_variance=variances[:c],
        explained_variance_ratio=ratios[:c],
        mean=mean,
        mode=pair_set.mode,
    )


def project(vector, subspace: Subspace, centered: bool = False) -> np.ndarray:
    """Coordinates of ``vector`` in the component basis (dot products).

    Accepts a single vector or a batch with vectors along the last axis.
    With ``centered=True`` the subspace's stored mean is subtracted first;
    the default applies the components to the vector as-is.
    """
    arr = np.asarray(vector, dtype=np.float64)
    if arr.shape[-1:] != (subspace.dim,):
        raise ValidationError(
            f"dimension mismatch: vector has {arr.shape[-1] if arr.ndim else 0} "
            f"coordinates, subspace expects {subspace.dim}"
        )
    if centered:
        arr = arr - subspace.mean
    return arr @ subspace.components.T


def remove_subspace(vector, subspace: Subspace) -> np.ndarray:
    """Remove the orthogonal projection onto the subspace and renormalize.

    Returns the unit-length residual ``r / ||r||`` with
    ``r = v - C^T (C v)``; the result is orthogonal to every component.

    Raises
    ------
    ValidationError
        If the vector lies (numerically) inside the subspace, i.e. the
        residual norm is at most 1e-10.
    """
    arr = np.asarray(vector, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != subspace.dim:
        raise ValidationError(
            f"expected a vector of length {subspace.dim}, got shape {arr.shape}"
        )
    coords = subspace.components @ arr
    residual = arr - subspace.components.T @ coords
    norm = np.linalg.norm(residual)
    if norm <= 1e-10:
        raise ValidationError(
            "vector is (numerically) fully contained in the subspace"
        )
    return residual / norm


def _fmt_floats(values) -> str:
    return " ".join(_FLOAT_FMT.format(float(v)) for v in values)


def save_subspace(subspace: Subspace, destination) -> None:
    """Write a subspace as self-describing decimal text.

    Floats are rendered with 17 significant digits so a load/save cycle is
    byte-identical and reconstructs every array bit-exactly.
    """
    lines = [
        "pairspace-subspace 1",
        f"mode {subspace.mode.value}",
        f"c {subspace.c}",
        f"dim {subspace.dim}",
        f"explained_variance_ratio {_fmt_floats(subspace.explained_variance_ratio)}",
        f"explained_variance {_fmt_floats(subspace.explained_variance)}",
        f"mean {_fmt_floats(subspace.mean)}",
    ]
    lines.extend(f"component {_fmt_floats(row)}" for row in subspace.components)
    text = "\n".join(lines) + "\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def load_subspace(source) -> Subspace:
    """Read a subspace previously written by :func:`save_subspace`."""
    from .embeddings import _iter_lines

    lines = [line.rstrip("\n") for line in _iter_lines(source)]
    lines = [line for line in lines if line.strip()]
    if not lines or lines[0].split() != ["pairspace-subspace", "1"]:
        raise FormatError("not a pairspace subspace file (bad magic line)", line=1)

    fields: dict[str, str] = {}
    component_rows: list[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        key, _, rest = line.partition(" ")
        if key == "component":
            component_rows.append(rest)
        elif key in ("mode", "c", "dim", "explained_variance_ratio",
                     "explained_variance", "mean"):
            fields[key] = rest
        else:
            raise FormatError(f"unknown field {key!r}", line=lineno)
    missing = {"mode", "c", "dim", "explained_variance_ratio",
               "explained_variance", "mean"} - set(fields)
    if missing:
        raise FormatError(f"missing fields: {sorted(missing)}")
    try:
        mode = SubspaceMode(fields["mode"])
    except ValueError:
        raise FormatError(f"unknown mode {fields['mode']!r}") from None
    try:
        c, dim = int(fields["c"]), int(fields["dim"])
        ratio = np.array([float(v) for v in fields["explained_variance_ratio"].split()])
        variance = np.array([float(v) for v in fields["explained_variance"].split()])
        mean = np.array([float(v) for v in fields["mean"].split()])
        components = np.array(
            [[float(v) for v in row.split()] for row in component_rows]
        )
    except ValueError:
        raise FormatError("non-numeric value in subspace file") from None
    if components.shape != (c, dim):
        raise FormatError(
            f"expected {c} component rows of length {dim}, "
            f"got shape {components.shape}"
        )
    return Subspace(
        components=components,
        explained_variance=variance,
        explained_variance_ratio=ratio,
        mean=mean,
        mode=mode,
    )
