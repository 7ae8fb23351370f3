"""Learn a contrast subspace from minimal pairs and use it on new vectors.

A minimal pair is two words that differ only in the aspect we care about
(here: an offensive word and a neutral counterpart).  This script builds a
toy vocabulary whose offensive words all share one hidden direction, learns
that direction back from a handful of pairs, and shows projection and
removal at work.
"""

import numpy as np

from pairspace import (
    EmbeddingTable,
    embed_pairs,
    learn_subspace,
    mean_shift,
    project,
    remove_subspace,
)

rng = np.random.default_rng(7)
DIM = 12

# hidden geometry: axis 0 carries "offensiveness", the rest is content
pairs = [
    ("jerk", "person"),
    ("creep", "neighbor"),
    ("slimeball", "colleague"),
    ("scumbag", "citizen"),
    ("lowlife", "resident"),
]
tokens, rows = [], []
for offensive, neutral in pairs:
    content = rng.normal(scale=0.6, size=DIM)
    content[0] = 0.0
    offensive_vec = content.copy()
    offensive_vec[0] = 2.0 + rng.normal(scale=0.2)
    tokens += [offensive, neutral]
    rows += [offensive_vec, content]
table = EmbeddingTable(dim=DIM, tokens=tuple(tokens), vectors=np.array(rows))

print(f"vocabulary: {len(table)} tokens, {table.dim} dimensions")

pair_set = embed_pairs(pairs, table)
print(f"embedded {pair_set.n_pairs} minimal pairs (mode {pair_set.mode.value})")

# mean-shifting removes each pair's shared content, leaving pure contrast
shifted = mean_shift(pair_set)
print("after mean shift, every pair sums to the zero vector:",
      bool(np.max(np.abs(shifted.vectors_a + shifted.vectors_b)) == 0.0))

space = learn_subspace(shifted, c=2)
print("\nlearned a 2-component subspace from the shifted pairs")
print("explained variance ratios:", np.round(space.explained_variance_ratio, 4))
print("first component weight on the hidden axis:",
      round(float(abs(space.components[0][0])), 4), "(1.0 would be exact)")

# projection = coordinates inside the subspace; removal = what is left outside
word = "creep"
vector = table.lookup(word)
coords = project(vector, space)
print(f"\nprojection of {word!r} onto the subspace: {np.round(coords, 3)}")

cleaned = remove_subspace(vector, space)
print(f"after removal, the vector is orthogonal to the subspace "
      f"(max dot {np.max(np.abs(space.components @ cleaned)):.2e}) "
      f"and unit length ({np.linalg.norm(cleaned):.6f})")

neutral_vec = table.lookup("neighbor")
cos_before = vector @ neutral_vec / (np.linalg.norm(vector) * np.linalg.norm(neutral_vec))
cos_after = cleaned @ neutral_vec / np.linalg.norm(neutral_vec)
print(f"\ncosine({word!r}, 'neighbor') before removal: {cos_before:.3f}")
print(f"cosine after removal:                          {cos_after:.3f}")
print("removal keeps the content and discards the offensive component.")
