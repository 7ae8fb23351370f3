"""Command-line front end: learn, select, transfer, substitute, gen-bench.

Every subcommand reads a flat ``key = value`` config file, overridable by
``PAIRSPACE_<KEY>`` environment variables and mirrored command-line flags
(flags win over environment, environment wins over the config file).  A run
is reproducible from the config plus its input files alone: all randomness
flows from the single ``seed`` setting.

Exit codes: 0 success, 1 internal error, 2 usage error (argparse),
3 I/O error, 4 input format error, 5 precondition violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .embeddings import (
    load_sentence_embeddings,
    load_vector_records,
    load_word_vectors,
)
from .errors import FormatError, PairspaceError, UnknownTokenError, ValidationError
from .selection import select_components, write_selection_curve
from .subspace import (
    SubspaceMode,
    embed_pairs,
    learn_subspace,
    load_pair_file,
    load_subspace,
    mean_shift,
    save_subspace,
)
from .substitution import substitute
from .transfer import (
    CvPolicy,
    FixedPolicy,
    RepresentationKind,
    export_benchmark,
    format_report,
    generate_synthetic_benchmark,
    run_transfer,
    write_report,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
# argparse reserves 2 for usage errors
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_PRECONDITION = 5

_ENV_PREFIX = "PAIRSPACE_"


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    settings: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise FormatError("expected 'key = value'", line=lineno)
        settings[key.strip().lower().replace("-", "_")] = value.strip()
    return settings


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _setting(args, config, key, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    value = os.environ.get(_ENV_PREFIX + key.upper())
    if value is not None:
        return value
    return config.get(key, default)


def _require(value, key):
    if value is None:
        raise ValidationError(f"missing required setting {key!r}")
    return value


def _as_bool(value, key) -> bool:
    if isinstance(value, bool):
        return value
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"setting {key!r} expects a boolean, got {value!r}")


def _as_int(value, key) -> int:
    try:
        return int(str(value).strip())
    except ValueError:
        raise ValidationError(f"setting {key!r} expects an integer, got {value!r}") from None


def _as_float(value, key) -> float:
    try:
        return float(str(value).strip())
    except ValueError:
        raise ValidationError(f"setting {key!r} expects a number, got {value!r}") from None


def _parse_int_list(value, key) -> list[int]:
    """Accept "10,20,30" or inclusive ranges "10:100" / "10:100:10"."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    out: list[int] = []
    for part in str(value).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) not in (2, 3):
                raise ValidationError(f"setting {key!r}: bad range {part!r}")
            start = _as_int(pieces[0], key)
            stop = _as_int(pieces[1], key)
            step = _as_int(pieces[2], key) if len(pieces) == 3 else 1
            if step < 1:
                raise ValidationError(f"setting {key!r}: step must be positive")
            out.extend(range(start, stop + 1, step))
        else:
            out.append(_as_int(part, key))
    if not out:
        raise ValidationError(f"setting {key!r} is empty")
    return out


def _parse_kinds(value) -> list[RepresentationKind]:
    kinds = []
    for part in str(value).split(","):
        part = part.strip().lower().replace("-", "_")
        if not part:
            continue
        try:
            kinds.append(RepresentationKind(part))
        except ValueError:
            valid = ", ".join(k.value for k in RepresentationKind)
            raise ValidationError(
                f"unknown representation kind {part!r}; expected one of {valid}"
            ) from None
    if not kinds:
        raise ValidationError("setting 'kinds' is empty")
    return kinds


def _parse_mode(value) -> SubspaceMode:
    try:
        return SubspaceMode(str(value).strip().lower())
    except ValueError:
        raise ValidationError(
            f"setting 'mode' expects 'raw' or 'norm', got {value!r}"
        ) from None


def _parse_task_specs(value) -> list[tuple[str, str, tuple[str, str]]]:
    """Parse "name=path[:neg:pos]" entries separated by commas."""
    specs = []
    for part in str(value).split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, rest = part.partition("=")
        if not sep or not name.strip():
            raise ValidationError(
                f"bad task spec {part!r}; expected name=path[:neg:pos]"
            )
        pieces = rest.split(":")
        if len(pieces) == 1:
            path, labels = pieces[0], ("neutral", "profane")
        elif len(pieces) == 3:
            path, labels = pieces[0], (pieces[1], pieces[2])
        else:
            raise ValidationError(
                f"bad task spec {part!r}; expected name=path[:neg:pos]"
            )
        specs.append((name.strip(), path.strip(), labels))
    if not specs:
        raise ValidationError("setting 'tasks' is empty")
    return specs


def _load_table(settings_get):
    fmt = str(settings_get("embeddings_format", "text")).strip().lower()
    path = _require(settings_get("embeddings"), "embeddings")
    if fmt == "text":
        table = load_word_vectors(path)
    elif fmt == "jsonl":
        table = load_vector_records(path)
    else:
        raise ValidationError(
            f"setting 'embeddings_format' expects 'text' or 'jsonl', got {fmt!r}"
        )
    if _as_bool(settings_get("normalize_inputs", False), "normalize_inputs"):
        table = table.normalized()
    return table


def _load_pairs(settings_get, table):
    pair_path = _require(settings_get("pairs"), "pairs")
    return embed_pairs(load_pair_file(pair_path), table)


def _c_grid_setting(value):
    if value is None or str(value).strip().lower() == "auto":
        return None
    return tuple(_parse_int_list(value, "c_grid"))


# --- subcommands --------------------------------------------------------------


def _cmd_learn(args) -> int:
    config = _load_config(args.config)
    get = lambda key, default=None: _setting(args, config, key, default)
    table = _load_table(get)
    pair_set = _load_pairs(get, table)
    mode = _parse_mode(_require(get("mode"), "mode"))
    if mode is SubspaceMode.NORM:
        pair_set = mean_shift(pair_set)
    c = _as_int(_require(get("components"), "components"), "components")
    center = _as_bool(get("center", True), "center")
    space = learn_subspace(pair_set, c, center=center)
    out = _require(get("out"), "out")
    save_subspace(space, out)
    covered = float(space.explained_variance_ratio.sum())
    print(
        f"learned {space.mode.value} subspace: c={space.c} dim={space.dim} "
        f"explained_variance_ratio_sum={covered:.6f}"
    )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_select(args) -> int:
    config = _load_config(args.config)
    get = lambda key, default=None: _setting(args, config, key, default)
    table = _load_table(get)
    pair_set = _load_pairs(get, table)
    mode = _parse_mode(get("mode", "raw"))
    selection = select_components(
        pair_set,
        c_grid=_c_grid_setting(get("c_grid")),
        k=_as_int(get("k_folds", 5), "k_folds"),
        seed=_as_int(get("seed", 0), "seed"),
        shift=mode is SubspaceMode.NORM,
        center=_as_bool(get("center", True), "center"),
    )
    out = _require(get("out"), "out")
    write_selection_curve(selection, out)
    best = next(row for row in selection.curve if row[0] == selection.chosen_c)
    print(
        f"chosen c={selection.chosen_c} (mean macro-F1 {best[1]:.6f} "
        f"over {selection.k_folds} folds, seed {selection.seed})"
    )
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_transfer(args) -> int:
    config = _load_config(args.config)
    get = lambda key, default=None: _setting(args, config, key, default)
    table = _load_table(get)
    pair_set = _load_pairs(get, table)
    normalize = _as_bool(get("normalize_inputs", False), "normalize_inputs")
    tasks = []
    for name, path, labels in _parse_task_specs(_require(get("tasks"), "tasks")):
        task = load_sentence_embeddings(path, label_pair=labels, name=name)
        tasks.append(task.normalized() if normalize else task)

    sizes = _parse_int_list(_require(get("sizes"), "sizes"), "sizes")
    kinds = _parse_kinds(get("kinds", "base,pca_raw,pca_norm"))
    explicit_seeds = get("seeds")
    if explicit_seeds is not None:
        seeds = _parse_int_list(explicit_seeds, "seeds")
    else:
        master = _as_int(get("seed", 0), "seed")
        runs = _as_int(get("runs", 5), "runs")
        if runs < 1:
            raise ValidationError("setting 'runs' must be at least 1")
        seeds = [int(s) for s in np.random.SeedSequence(master).generate_state(runs)]

    fixed_c = get("fixed_c")
    if fixed_c is not None:
        policy = FixedPolicy(c=_as_int(fixed_c, "fixed_c"))
    else:
        policy = CvPolicy(
            k_folds=_as_int(get("k_folds", 5), "k_folds"),
            c_grid=_c_grid_setting(get("c_grid")),
        )
    report = run_transfer(
        pair_set,
        sizes=sizes,
        kinds=kinds,
        seeds=seeds,
        tasks=tasks,
        c_policy=policy,
        center=_as_bool(get("center", True), "center"),
        threads=_as_int(get("threads", 1), "threads"),
    )
    out = _require(get("out"), "out")
    write_report(report, out)
    print(format_report(report))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_substitute(args) -> int:
    config = _load_config(args.config)
    get = lambda key, default=None: _setting(args, config, key, default)
    table = _load_table(get)
    space = load_subspace(_require(get("subspace"), "subspace"))
    words_path = _require(get("words"), "words")
    k = _as_int(get("k", 4), "k")
    if k < 1:
        raise ValidationError(f"setting 'k' must be a positive integer, got {k}")
    keep_variants = not _as_bool(get("variant_filter", True), "variant_filter")
    pattern = (lambda token: False) if keep_variants else None

    words = []
    for raw in Path(words_path).read_text(encoding="utf-8").splitlines():
        token = raw.strip()
        if token and not token.startswith("#"):
            words.append(token)

    lines = []
    failed = 0
    for word in words:
        try:
            result = substitute(word, table, space, k, exclude_pattern=pattern)
        except UnknownTokenError:
            lines.append(f"{word}\t-\t<unknown-token>\t-")
            failed += 1
            continue
        except ValidationError:
            lines.append(f"{word}\t-\t<inside-subspace>\t-")
            failed += 1
            continue
        for rank, (candidate, cosine) in enumerate(result.candidates, start=1):
            lines.append(f"{word}\t{rank}\t{candidate}\t{cosine:.17g}")
    out = _require(get("out"), "out")
    Path(out).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    print(f"substituted {len(words) - failed} of {len(words)} tokens, {failed} failed")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_gen_bench(args) -> int:
    config = _load_config(args.config)
    get = lambda key, default=None: _setting(args, config, key, default)
    benchmark = generate_synthetic_benchmark(
        dim=_as_int(_require(get("dim"), "dim"), "dim"),
        n_pairs=_as_int(_require(get("n_pairs"), "n_pairs"), "n_pairs"),
        n_task=_as_int(_require(get("n_task"), "n_task"), "n_task"),
        planted_direction_seed=_as_int(get("seed", 0), "seed"),
        topic_shift=_as_float(get("topic_shift", 5.0), "topic_shift"),
        noise_scale=_as_float(get("noise_scale", 0.3), "noise_scale"),
    )
    out_dir = _require(get("out_dir"), "out_dir")
    paths = export_benchmark(benchmark, out_dir)
    for label, path in paths.items():
        print(f"wrote {label}: {path}")
    return EXIT_OK


_COMMANDS = {
    "learn": _cmd_learn,
    "select": _cmd_select,
    "transfer": _cmd_transfer,
    "substitute": _cmd_substitute,
    "gen-bench": _cmd_gen_bench,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", help="master seed for all randomness")
    parser.add_argument("--threads", help="parallel runs (output is identical)")
    parser.add_argument(
        "--center",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="center PCA inputs by their global mean (default: on)",
    )
    parser.add_argument(
        "--normalize-inputs",
        dest="normalize_inputs",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="scale loaded vectors to unit length (default: off)",
    )
    parser.add_argument("--embeddings", help="embedding file path")
    parser.add_argument(
        "--embeddings-format",
        dest="embeddings_format",
        choices=("text", "jsonl"),
        help="'text' word-vector dump or 'jsonl' id/vec records",
    )
    parser.add_argument("--out", help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairspace",
        description=(
            "Learn contrastive subspaces from minimal pairs of embeddings, "
            "select their size by intrinsic cross-validation, evaluate "
            "zero-shot transfer, and substitute words by subspace removal."
        ),
        epilog=(
            "exit codes: 0 ok, 1 internal, 2 usage, 3 i/o, 4 format, "
            "5 precondition"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a subspace from a pair file")
    _add_common(p)
    p.add_argument("--pairs", help="minimal-pair file (positive<TAB>neutral)")
    p.add_argument("--mode", help="'raw' or 'norm' (mean-shifted)")
    p.add_argument("--components", help="number of principal components")

    p = sub.add_parser("select", help="choose the component count by k-fold CV")
    _add_common(p)
    p.add_argument("--pairs", help="minimal-pair file")
    p.add_argument("--mode", help="'raw' or 'norm' subspace flavor")
    p.add_argument("--k-folds", dest="k_folds", help="number of folds (default 5)")
    p.add_argument("--c-grid", dest="c_grid", help="'auto', list, or lo:hi[:step]")

    p = sub.add_parser("transfer", help="run the zero-shot transfer grid")
    _add_common(p)
    p.add_argument("--pairs", help="minimal-pair file")
    p.add_argument("--tasks", help="name=path[:neg:pos],... task files (jsonl)")
    p.add_argument("--sizes", help="training sizes, list or lo:hi[:step]")
    p.add_argument("--kinds", help="comma list of base,pca_raw,pca_norm")
    p.add_argument("--runs", help="seeded runs to aggregate (default 5)")
    p.add_argument("--seeds", help="explicit comma list of run seeds")
    p.add_argument("--k-folds", dest="k_folds", help="CV folds for picking c")
    p.add_argument("--c-grid", dest="c_grid", help="'auto', list, or lo:hi[:step]")
    p.add_argument("--fixed-c", dest="fixed_c", help="skip CV and use this c")

    p = sub.add_parser("substitute", help="batch subspace-removal substitution")
    _add_common(p)
    p.add_argument("--subspace", help="subspace file written by 'learn'")
    p.add_argument("--words", help="input token list, one per line")
    p.add_argument("--k", help="candidates per token (default 4)")
    p.add_argument(
        "--variant-filter",
        dest="variant_filter",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="drop candidates containing the source token (default: on)",
    )

    p = sub.add_parser("gen-bench", help="generate a synthetic planted benchmark")
    _add_common(p)
    p.add_argument("--dim", help="vector dimensionality (>= 4)")
    p.add_argument("--n-pairs", dest="n_pairs", help="number of source pairs (>= 5)")
    p.add_argument("--n-task", dest="n_task", help="number of task instances (>= 10)")
    p.add_argument("--topic-shift", dest="topic_shift",
                   help="target topic displacement in spread units (default 5)")
    p.add_argument("--noise-scale", dest="noise_scale",
                   help="isotropic target noise sigma (default 0.3)")
    p.add_argument("--out-dir", dest="out_dir", help="benchmark output directory")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"pairspace: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ValidationError, UnknownTokenError) as exc:
        print(f"pairspace: precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"pairspace: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PairspaceError as exc:
        print(f"pairspace: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # keep the CLI contractual even when surprised
        print(f"pairspace: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
