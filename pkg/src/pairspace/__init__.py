"""Contrastive semantic subspaces from minimal pairs of embeddings.

The package learns PCA subspaces that isolate one semantic contrast (such as
profane vs. neutral wording) from pairs of precomputed word or sentence
vectors, picks the subspace size by intrinsic cross-validation, evaluates
zero-shot transfer of subspace-projected LDA classifiers to unseen tasks,
and substitutes words by removing the subspace from their vectors.
"""

from .classifier import (
    ClassScores,
    EvalScores,
    LdaModel,
    decision_score,
    evaluate,
    fit_lda,
    load_lda,
    predict,
    predict_batch,
    save_lda,
)
from .embeddings import (
    EmbeddingTable,
    LabeledDataset,
    load_sentence_embeddings,
    load_vector_records,
    load_word_vectors,
    mean_pool,
)
from .errors import (
    FormatError,
    PairspaceError,
    UnknownTokenError,
    ValidationError,
)
from .selection import (
    ComponentSelection,
    default_component_grid,
    fold_indices,
    max_component_count,
    select_components,
    write_selection_curve,
)
from .subspace import (
    EmbeddedPairSet,
    Subspace,
    SubspaceMode,
    embed_pairs,
    learn_subspace,
    load_pair_file,
    load_subspace,
    mean_shift,
    principal_axes,
    project,
    remove_subspace,
    save_subspace,
)
from .substitution import (
    SubstitutionResult,
    contains_source_filter,
    neighbors_before,
    substitute,
)
from .transfer import (
    CvPolicy,
    FixedPolicy,
    RepresentationKind,
    SyntheticBenchmark,
    TransferReport,
    TransferRow,
    export_benchmark,
    format_report,
    generate_synthetic_benchmark,
    run_transfer,
    subsample_pairs,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "ClassScores",
    "ComponentSelection",
    "CvPolicy",
    "EmbeddedPairSet",
    "EmbeddingTable",
    "EvalScores",
    "FixedPolicy",
    "FormatError",
    "LabeledDataset",
    "LdaModel",
    "PairspaceError",
    "RepresentationKind",
    "Subspace",
    "SubspaceMode",
    "SubstitutionResult",
    "SyntheticBenchmark",
    "TransferReport",
    "TransferRow",
    "UnknownTokenError",
    "ValidationError",
    "contains_source_filter",
    "decision_score",
    "default_component_grid",
    "embed_pairs",
    "evaluate",
    "export_benchmark",
    "fit_lda",
    "fold_indices",
    "format_report",
    "generate_synthetic_benchmark",
    "learn_subspace",
    "load_lda",
    "load_pair_file",
    "load_sentence_embeddings",
    "load_subspace",
    "load_vector_records",
    "load_word_vectors",
    "max_component_count",
    "mean_pool",
    "mean_shift",
    "neighbors_before",
    "predict",
    "predict_batch",
    "principal_axes",
    "project",
    "remove_subspace",
    "run_transfer",
    "save_lda",
    "save_subspace",
    "select_components",
    "subsample_pairs",
    "substitute",
    "write_report",
    "write_selection_curve",
]
