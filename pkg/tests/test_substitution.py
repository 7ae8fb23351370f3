import numpy as np
import pytest

from pairspace import (
    EmbeddedPairSet,
    EmbeddingTable,
    Subspace,
    SubspaceMode,
    UnknownTokenError,
    ValidationError,
    learn_subspace,
    mean_shift,
    neighbors_before,
    substitute,
)


def axis0_subspace(dim=2):
    components = np.zeros((1, dim))
    components[0, 0] = 1.0
    return Subspace(
        components=components,
        explained_variance=np.array([1.0]),
        explained_variance_ratio=np.array([1.0]),
        mean=np.zeros(dim),
        mode=SubspaceMode.NORM,
    )


@pytest.fixture
def toy_table():
    return EmbeddingTable(
        dim=2,
        tokens=("prof", "neu1", "neu2"),
        vectors=np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.9]]),
    )


def planted_vocabulary(n_words=20, dim=8, seed=0):
    """Profane tokens = content + offset along axis 0; neutrals share content."""
    rng = np.random.default_rng(seed)
    content = rng.normal(size=(n_words, dim))
    content[:, 0] = 0.0
    content /= np.linalg.norm(content, axis=1, keepdims=True)
    profane = content.copy()
    profane[:, 0] = 2.0
    variants = content.copy()
    variants[:, 0] = 2.5
    tokens, rows = [], []
    for i in range(n_words):
        tokens += [f"slur{i:02d}", f"word{i:02d}", f"slur{i:02d}ish"]
        rows += [profane[i], content[i], variants[i]]
    table = EmbeddingTable(dim=dim, tokens=tuple(tokens), vectors=np.array(rows))
    pairs = EmbeddedPairSet(
        profane,
        content,
        surfaces_a=tuple(f"slur{i:02d}" for i in range(n_words)),
        surfaces_b=tuple(f"word{i:02d}" for i in range(n_words)),
    )
    return table, pairs


class TestSubstitute:
    def test_tie_broken_lexicographically(self, toy_table):
        result = substitute("prof", toy_table, axis0_subspace(), k=2)
        assert result.candidates == (("neu1", 1.0), ("neu2", 1.0))
        assert result.source == "prof"
        assert result.c == 1

    def test_exclusion_pattern(self, toy_table):
        result = substitute(
            "prof", toy_table, axis0_subspace(), k=1,
            exclude_pattern=lambda t: t == "neu1",
        )
        assert result.candidates == (("neu2", 1.0),)

    def test_source_never_a_candidate(self, toy_table):
        result = substitute("prof", toy_table, axis0_subspace(), k=3)
        assert all(token != "prof" for token, _ in result.candidates)

    def test_unknown_word(self, toy_table):
        with pytest.raises(UnknownTokenError):
            substitute("nope", toy_table, axis0_subspace(), k=1)

    def test_word_inside_subspace(self):
        table = EmbeddingTable(
            dim=2, tokens=("onaxis", "other"), vectors=np.array([[5.0, 0.0], [0.0, 1.0]])
        )
        with pytest.raises(ValidationError):
            substitute("onaxis", table, axis0_subspace(), k=1)

    def test_k_zero(self, toy_table):
        with pytest.raises(ValidationError):
            substitute("prof", toy_table, axis0_subspace(), k=0)

    def test_neutralized_vector_orthogonal_and_unit(self, toy_table):
        result = substitute("prof", toy_table, axis0_subspace(), k=1)
        space = axis0_subspace()
        assert np.max(np.abs(space.components @ result.neutralized_vector)) < 1e-8
        assert abs(np.linalg.norm(result.neutralized_vector) - 1.0) < 1e-10

    def test_candidates_form_prefix_as_k_grows(self):
        table, pairs = planted_vocabulary()
        space = learn_subspace(mean_shift(pairs), 1)
        small = substitute("slur03", table, space, k=2)
        large = substitute("slur03", table, space, k=5)
        assert large.candidates[:2] == small.candidates

    def test_default_filter_suppresses_orthographic_variants(self):
        table, pairs = planted_vocabulary()
        space = learn_subspace(mean_shift(pairs), 1)
        result = substitute("slur07", table, space, k=10)
        tokens = [t for t, _ in result.candidates]
        assert "slur07" not in tokens
        assert "slur07ish" not in tokens

    def test_planted_vocabulary_always_picks_a_neutral(self):
        table, pairs = planted_vocabulary()
        space = learn_subspace(mean_shift(pairs), 1)
        # the shifted pairs lie exactly on axis 0, so removal strips it
        assert abs(space.components[0][0]) == pytest.approx(1.0, abs=1e-12)
        for i in range(pairs.n_pairs):
            source = f"slur{i:02d}"
            result = substitute(source, table, space, k=3)
            top_token, top_cosine = result.candidates[0]
            assert top_token == f"word{i:02d}"
            assert top_cosine == pytest.approx(1.0, abs=1e-9)


class TestNeighborsBefore:
    def test_derived_cosine(self):
        table = EmbeddingTable(
            dim=2,
            tokens=("a", "a2", "b"),
            vectors=np.array([[1.0, 0.0], [0.99, 0.01], [0.0, 1.0]]),
        )
        [(token, sim)] = neighbors_before("a", table, k=1)
        assert token == "a2"
        assert sim == pytest.approx(0.99 / np.sqrt(0.9802), abs=1e-12)

    def test_truncates_to_vocab(self, toy_table):
        result = neighbors_before("prof", toy_table, k=10)
        assert [t for t, _ in result] == ["neu1", "neu2"]

    def test_unknown_word(self, toy_table):
        with pytest.raises(UnknownTokenError):
            neighbors_before("nope", toy_table, k=1)
