"""Lexical substitution by subspace removal.

A word's vector is stripped of its component inside the contrast subspace
and renormalized; its new cosine nearest neighbors are the substitution
candidates.  Orthographic variants of the source word (tokens containing it)
are filtered out by default, since raw nearest neighbors of a word are
dominated by its spelling variations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable
from .errors import ValidationError
from .subspace import Subspace, SubspaceMode, remove_subspace


@dataclass(frozen=True)
class SubstitutionResult:
    """Candidates for replacing ``source`` after subspace removal.

    ``candidates`` are (token, cosine) sorted by descending cosine with ties
    broken by token order; the source itself never appears.
    """

    source: str
    neutralized_vector: np.ndarray
    candidates: tuple
    subspace_mode: SubspaceMode
    c: int


def contains_source_filter(source: str):
    """Default variant filter: tokens whose lowercase form contains the
    source's lowercase form (catches spelling variants and compounds)."""
    needle = source.lower()
    return lambda token: needle in token.lower()


def substitute(
    word: str,
    table: EmbeddingTable,
    subspace: Subspace,
    k: int,
    exclude_pattern=None,
) -> SubstitutionResult:
    """Neutralize ``word`` by subspace removal and rank replacement candidates.

    Parameters
    ----------
    word : token present in the table
    table : embedding vocabulary searched for candidates
    subspace : contrast subspace to remove
    k : number of candidates to return, at least 1
    exclude_pattern : optional predicate on tokens; matching tokens are
        never candidates.  Defaults to filtering tokens that contain the
        source word (case-insensitive); pass ``lambda t: False`` to disable.

    Raises
    ------
    UnknownTokenError
        If ``word`` is not in the table.
    ValidationError
        If ``k < 1`` or the word's vector lies entirely inside the subspace.
    """
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    vector = table.lookup(word)
    neutralized = remove_subspace(vector, subspace)
    if exclude_pattern is None:
        exclude_pattern = contains_source_filter(word)
    excluded = {word}
    excluded.update(t for t in table.tokens if exclude_pattern(t))
    candidates = table.nearest_neighbors(neutralized, k, exclude=excluded)
    return SubstitutionResult(
        source=word,
        neutralized_vector=neutralized,
        candidates=tuple(candidates),
        subspace_mode=subspace.mode,
        c=subspace.c,
    )


def neighbors_before(word: str, table: EmbeddingTable, k: int) -> list[tuple[str, float]]:
    """Cosine nearest neighbors of the raw word vector, excluding the word."""
    vector = table.lookup(word)
    if not np.any(vector):
        raise ValidationError(f"{word!r} has a zero vector, cosine is undefined")
    return table.nearest_neighbors(vector, k, exclude={word})
