"""Suggest neutral replacements by deleting the contrast subspace.

Nearest neighbors of an offensive word are usually its own spelling variants.
Removing the learned contrast subspace from the word's vector and searching
again surfaces words that share the content but not the offensiveness.
"""

import numpy as np

from pairspace import (
    EmbeddedPairSet,
    EmbeddingTable,
    learn_subspace,
    mean_shift,
    neighbors_before,
    substitute,
)

rng = np.random.default_rng(13)
DIM = 16

words = [
    ("jerk", "person"),
    ("creep", "neighbor"),
    ("slimeball", "colleague"),
    ("scumbag", "citizen"),
    ("lowlife", "resident"),
    ("nitwit", "student"),
]

tokens, rows = [], []
profane_rows, neutral_rows = [], []
for offensive, neutral in words:
    content = rng.normal(scale=0.7, size=DIM)
    content[0] = 0.0
    hot = content.copy()
    hot[0] = 2.0
    variant = content.copy()
    variant[0] = 2.3  # spelling variant sits next to its source
    tokens += [offensive, neutral, offensive + "z"]
    rows += [hot, content, variant]
    profane_rows.append(hot)
    neutral_rows.append(content)
table = EmbeddingTable(dim=DIM, tokens=tuple(tokens), vectors=np.array(rows))

pairs = EmbeddedPairSet(np.array(profane_rows), np.array(neutral_rows))
space = learn_subspace(mean_shift(pairs), c=1)
print("subspace learned from 6 pairs; first component carries the contrast\n")

print(f"{'word':<11} {'neighbors before':<28} neighbors after removal")
for offensive, _ in words[:4]:
    before = ", ".join(t for t, _ in neighbors_before(offensive, table, k=2))
    result = substitute(offensive, table, space, k=2)
    after = ", ".join(t for t, _ in result.candidates)
    print(f"{offensive:<11} {before:<28} {after}")

print(
    "\nbefore removal the top neighbor is the word's own variant; after "
    "removal\nthe variants are filtered and the neutral counterparts win."
)
