"""Zero-shot transfer: subspace features survive a topic shift, raw ones don't.

A classifier trained on minimal pairs is applied, without any target
training data, to a task whose content distribution moved.  The synthetic
benchmark plants a known contrast direction and displaces the target topic;
classifiers on raw features latch onto background dimensions and break,
while the same classifier on subspace projections transfers cleanly.
"""

import numpy as np

from pairspace import (
    RepresentationKind,
    format_report,
    generate_synthetic_benchmark,
    run_transfer,
)

benchmark = generate_synthetic_benchmark(
    dim=64,
    n_pairs=100,
    n_task=400,
    planted_direction_seed=2024,
    topic_shift=5.0,   # five within-topic spreads away
    noise_scale=0.3,
)
print("synthetic benchmark: 100 source pairs, 400 shifted target instances")

seeds = [int(s) for s in np.random.SeedSequence(99).generate_state(5)]
report = run_transfer(
    benchmark.pairs,
    sizes=[10, 30, 50],
    kinds=list(RepresentationKind),
    seeds=seeds,
    tasks=[benchmark.task],
)

print("\nmean macro-F1 over 5 seeded runs (each run resamples its pairs):\n")
print(format_report(report))

raw = report.cell(RepresentationKind.PCA_RAW, 50, "shifted-topic")
base = report.cell(RepresentationKind.BASE, 50, "shifted-topic")
print(
    f"\nat 50 training pairs the subspace representation beats the raw one "
    f"by {raw.mean_macro_f1 - base.mean_macro_f1:+.3f} macro-F1"
)
print(f"component counts picked per run by intrinsic CV: {list(raw.chosen_c)}")
