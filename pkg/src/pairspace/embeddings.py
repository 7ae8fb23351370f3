"""Embedding tables, labeled vector datasets, and the file formats that carry them.

Word vectors arrive in the common text-dump layout: a header line ``"<V> <D>"``
followed by one ``token x1 ... xD`` row per word.  Sentence vectors arrive as
JSON records, one object per line, with ``id``, ``label`` and ``vec`` fields
(an optional ``text`` field is carried through for reports).  Everything is
parsed into immutable numpy-backed containers; no encoder runs in this
package, vectors are always precomputed elsewhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, UnknownTokenError, ValidationError


def _iter_lines(source):
    """Yield text lines from a path, a text file object, or a binary stream."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle
        return
    for raw in source:
        yield raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw


@dataclass(frozen=True)
class EmbeddingTable:
    """Vocabulary of unique tokens mapped to fixed-width float vectors.

    Immutable after construction and safe to share across threads.
    ``duplicate_count`` reports how many repeated tokens were dropped by the
    loader (the first occurrence wins).
    """

    dim: int
    tokens: tuple[str, ...]
    vectors: np.ndarray
    duplicate_count: int = 0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.dim <= 0:
            raise ValidationError(f"dim must be positive, got {self.dim}")
        if vectors.ndim != 2 or vectors.shape != (len(self.tokens), self.dim):
            raise ValidationError(
                f"vectors must have shape ({len(self.tokens)}, {self.dim}), "
                f"got {vectors.shape}"
            )
        index = {}
        for row, token in enumerate(self.tokens):
            if token in index:
                raise ValidationError(f"duplicate token {token!r} in table")
            index[token] = row
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def lookup(self, token: str) -> np.ndarray:
        """Return the stored vector for ``token``, bit-exactly."""
        row = self._index.get(token)
        if row is None:
            raise UnknownTokenError(token)
        return self.vectors[row].copy()

    def nearest_neighbors(self, query, k: int, exclude=()) -> list[tuple[str, float]]:
        """Top-``k`` tokens by cosine similarity to ``query``.

        Exact full scan over the vocabulary.  Results are sorted by descending
        similarity; exact ties are broken by ascending token order.  Tokens in
        ``exclude`` never appear.  Stored zero vectors get similarity 0.

        Parameters
        ----------
        query : array-like of length ``dim``, nonzero norm
        k : positive int; fewer results are returned if the vocabulary
            (minus exclusions) is smaller
        exclude : iterable of tokens to skip
        """
        query = np.asarray(query, dtype=np.float64)
        if query.ndim != 1 or query.shape[0] != self.dim:
            raise ValidationError(
                f"query must be a vector of length {self.dim}, got shape {query.shape}"
            )
        if k < 1:
            raise ValidationError(f"k must be a positive integer, got {k}")
        query_norm = np.linalg.norm(query)
        if query_norm == 0.0:
            raise ValidationError("zero-norm query has no cosine neighbors")
        norms = np.linalg.norm(self.vectors, axis=1)
        sims = np.zeros(len(self.tokens))
        nonzero = norms > 0.0
        sims[nonzero] = (self.vectors[nonzero] @ query) / (norms[nonzero] * query_norm)
        excluded = set(exclude)
        ranked = sorted(
            (i for i in range(len(self.tokens)) if self.tokens[i] not in excluded),
            key=lambda i: (-sims[i], self.tokens[i]),
        )
        return [(self.tokens[i], float(sims[i])) for i in ranked[:k]]

    def normalized(self) -> "EmbeddingTable":
        """Copy of the table with every vector scaled to unit length.

        Zero vectors are kept as-is (they have no direction to preserve).
        """
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        safe = np.where(norms > 0.0, norms, 1.0)
        return EmbeddingTable(
            dim=self.dim,
            tokens=self.tokens,
            vectors=self.vectors / safe,
            duplicate_count=self.duplicate_count,
        )


def mean_pool(token_vectors) -> np.ndarray:
    """Coordinate-wise arithmetic mean of a nonempty list of equal-length vectors."""
    vectors = [np.asarray(v, dtype=np.float64) for v in token_vectors]
    if not vectors:
        raise ValidationError("mean_pool requires at least one vector")
    shape = vectors[0].shape
    if len(shape) != 1:
        raise ValidationError(f"expected 1-D vectors, got shape {shape}")
    for v in vectors[1:]:
        if v.shape != shape:
            raise ValidationError(
                f"ragged input: expected length {shape[0]}, got {v.shape}"
            )
    return np.mean(np.stack(vectors), axis=0)


def load_word_vectors(source) -> EmbeddingTable:
    """Parse a word-vector text dump into an :class:`EmbeddingTable`.

    The stream must begin with a header line ``"V D"`` (vocabulary size and
    dimension) followed by exactly ``V`` rows ``token x1 ... xD``, separated
    by arbitrary runs of spaces or tabs.  Duplicate tokens keep the first
    occurrence; the number of dropped repeats is reported on the table.

    Parameters
    ----------
    source : path or open text/binary stream

    Raises
    ------
    FormatError
        On a malformed header, a row with the wrong number of fields, a
        non-numeric or non-finite coordinate, or a truncated stream.  The
        message carries the 1-based line number.
    """
    lines = _iter_lines(source)
    header = next(lines, None)
    if header is None:
        raise FormatError("empty stream, expected 'V D' header", line=1)
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(
            f"malformed header: expected 'V D', got {header.strip()!r}", line=1
        )
    try:
        vocab_size, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(
            f"malformed header: non-integer fields in {header.strip()!r}", line=1
        ) from None
    if vocab_size < 0 or dim < 1:
        raise FormatError(
            f"malformed header: need V >= 0 and D >= 1, got V={vocab_size} D={dim}",
            line=1,
        )

    tokens: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    duplicates = 0
    parsed = 0
    lineno = 1
    for raw in lines:
        lineno += 1
        if parsed == vocab_size:
            if raw.strip():
                raise FormatError(
                    f"unexpected extra row after {vocab_size} declared vectors",
                    line=lineno,
                )
            continue
        if not raw.strip():
            raise FormatError("blank line inside the vector block", line=lineno)
        fields = raw.split()
        if len(fields) != dim + 1:
            raise FormatError(
                f"expected a token plus {dim} values, found {len(fields) - 1} values",
                line=lineno,
            )
        token = fields[0]
        try:
            values = [float(f) for f in fields[1:]]
        except ValueError:
            raise FormatError("non-numeric coordinate", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError("non-finite coordinate", line=lineno)
        parsed += 1
        if token in seen:
            duplicates += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(values)
    if parsed < vocab_size:
        raise FormatError(
            f"header declared {vocab_size} vectors, stream ended after {parsed}",
            line=lineno,
        )
    vectors = np.asarray(rows, dtype=np.float64).reshape(len(tokens), dim)
    return EmbeddingTable(
        dim=dim, tokens=tuple(tokens), vectors=vectors, duplicate_count=duplicates
    )


@dataclass(frozen=True)
class LabeledDataset:
    """Instances of a two-class task: ids, vectors, and per-instance labels.

    ``label_pair`` declares the (negative, positive) class names, e.g.
    ``("neutral", "profane")`` or ``("neutral", "hate")``.  Immutable after
    construction.
    """

    ids: tuple[str, ...]
    vectors: np.ndarray
    labels: tuple[str, ...]
    label_pair: tuple[str, str]
    name: str = "task"
    texts: tuple | None = None

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        n = len(self.ids)
        if n < 1:
            raise ValidationError("dataset needs at least one instance")
        if vectors.ndim != 2 or vectors.shape[0] != n:
            raise ValidationError(
                f"vectors must have shape ({n}, dim), got {vectors.shape}"
            )
        if len(self.labels) != n:
            raise ValidationError("labels and ids must have equal length")
        if len(set(self.label_pair)) != 2:
            raise ValidationError("label_pair must name two distinct classes")
        stray = set(self.labels) - set(self.label_pair)
        if stray:
            raise ValidationError(f"labels outside the declared pair: {sorted(stray)}")
        if self.texts is not None and len(self.texts) != n:
            raise ValidationError("texts and ids must have equal length")
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def normalized(self) -> "LabeledDataset":
        """Copy with every instance vector scaled to unit length (zero rows kept)."""
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        safe = np.where(norms > 0.0, norms, 1.0)
        return LabeledDataset(
            ids=self.ids,
            vectors=self.vectors / safe,
            labels=self.labels,
            label_pair=self.label_pair,
            name=self.name,
            texts=self.texts,
        )


def _parse_record(raw: str, lineno: int) -> tuple[str, str, list[float], str | None]:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON record: {exc.msg}", line=lineno) from None
    if not isinstance(record, dict):
        raise FormatError("record must be a JSON object", line=lineno)
    for key in ("id", "label", "vec"):
        if key not in record:
            raise FormatError(f"record is missing required key {key!r}", line=lineno)
    rid, label, vec = record["id"], record["label"], record["vec"]
    if not isinstance(rid, str):
        raise FormatError("'id' must be a string", line=lineno)
    if not isinstance(label, str):
        raise FormatError("'label' must be a string", line=lineno)
    if not isinstance(vec, list) or not vec:
        raise FormatError("'vec' must be a nonempty array of numbers", line=lineno)
    values = []
    for entry in vec:
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise FormatError("'vec' must contain only numbers", line=lineno)
        if not math.isfinite(entry):
            raise FormatError("'vec' contains a non-finite value", line=lineno)
        values.append(float(entry))
    text = record.get("text")
    if text is not None and not isinstance(text, str):
        raise FormatError("'text' must be a string when present", line=lineno)
    return rid, label, values, text


def load_sentence_embeddings(
    source,
    label_pair: tuple[str, str] = ("neutral", "profane"),
    name: str | None = None,
) -> LabeledDataset:
    """Parse a sentence-embedding file (one JSON record per line) into a dataset.

    The vector dimension is inferred from the first record and enforced on
    the rest; every label must belong to ``label_pair`` (negative, positive).
    """
    if name is None:
        name = Path(source).stem if isinstance(source, (str, Path)) else "task"
    ids: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    texts: list[str | None] = []
    dim = None
    lineno = 0
    for raw in _iter_lines(source):
        lineno += 1
        if not raw.strip():
            continue
        rid, label, values, text = _parse_record(raw, lineno)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise FormatError(
                f"inconsistent dimension: expected {dim}, found {len(values)}",
                line=lineno,
            )
        if label not in label_pair:
            raise FormatError(
                f"unknown label {label!r}, expected one of {list(label_pair)}",
                line=lineno,
            )
        ids.append(rid)
        labels.append(label)
        rows.append(values)
        texts.append(text)
    if not ids:
        raise FormatError("stream contains no records", line=max(lineno, 1))
    return LabeledDataset(
        ids=tuple(ids),
        vectors=np.asarray(rows, dtype=np.float64),
        labels=tuple(labels),
        label_pair=label_pair,
        name=name,
        texts=tuple(texts) if any(t is not None for t in texts) else None,
    )


def load_vector_records(source) -> EmbeddingTable:
    """Build an id -> vector table from sentence-embedding records.

    Used when minimal pairs are given as pairs of record ids instead of
    surface tokens.  Labels and texts in the records are ignored; duplicate
    ids keep the first occurrence, mirroring :func:`load_word_vectors`.
    """
    ids: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    duplicates = 0
    dim = None
    lineno = 0
    for raw in _iter_lines(source):
        lineno += 1
        if not raw.strip():
            continue
        rid, _, values, _ = _parse_record(raw, lineno)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise FormatError(
                f"inconsistent dimension: expected {dim}, found {len(values)}",
                line=lineno,
            )
        if rid in seen:
            duplicates += 1
            continue
        seen.add(rid)
        ids.append(rid)
        rows.append(values)
    if dim is None:
        raise FormatError("stream contains no records", line=max(lineno, 1))
    return EmbeddingTable(
        dim=dim,
        tokens=tuple(ids),
        vectors=np.asarray(rows, dtype=np.float64),
        duplicate_count=duplicates,
    )
