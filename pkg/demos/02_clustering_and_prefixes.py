#!/usr/bin/env python3
"""Walkthrough: candidate extraction, PCA + K-means, prefix-to-class mapping.

The unsupervised half of the pipeline: it never sees a label, yet recovers
noun classes because words of one class share a prefix and therefore a region
of embedding space.
"""

from pathlib import Path

import numpy as np

from nounclass.cluster import kmeans, reduce_pca
from nounclass.corpus import extract_candidates
from nounclass.prefixes import map_profiles, profile_clustering
from nounclass.report import plot_clusters
from nounclass.synth import generate_pair, preset

OUT = Path("demo_output")
OUT.mkdir(exist_ok=True)

pair = generate_pair(preset("tiny"))

# ---------------------------------------------------------------------------
# Step 1: noun candidates from the raw corpus (type-frequency filtering;
# no POS tagger exists for the languages this targets).
# ---------------------------------------------------------------------------
candidates, stats = extract_candidates(pair.corpus_lines, min_len=3, min_freq=2)
print(f"corpus: {stats.sentences} sentences, {stats.tokens} tokens, "
      f"{stats.types} types -> {stats.candidates} candidates")
print("dropped:", stats.dropped_by_rule or "nothing")

# ---------------------------------------------------------------------------
# Step 2: reduce candidate embeddings, then partition with seeded K-means.
# ---------------------------------------------------------------------------
words, matrix, missing = pair.target.subset(candidates)
reduced = reduce_pca(words, matrix, d=10)
print(f"\nPCA: {matrix.shape[1]} -> {reduced.d} dims; "
      f"top-3 variance {np.round(reduced.explained_variance[:3], 3)}")

clustering = kmeans(reduced, k=6, seed=42)
print(f"k-means: k={clustering.k}, inertia {clustering.inertia:.2f} "
      f"after {clustering.iterations} iterations ({clustering.rng})")

# ---------------------------------------------------------------------------
# Step 3: per-cluster prefix profiles, mapped through the planted inventory.
# Consistency = share of members carrying the dominant prefix.
# ---------------------------------------------------------------------------
profiles = map_profiles(profile_clustering(clustering), pair.inventory())
print("\ncluster  size  prefix  consistency  class")
for p in profiles:
    flag = " (ambiguous)" if p.ambiguous else ""
    print(f"  {p.cluster_id:>2}    {p.size:>4}   {p.dominant_prefix:<5}"
          f"  {p.consistency:>8.1f}%   {p.mapped_class}{flag}")

# Grade the mapping against the plant.
members = clustering.members()
for p in profiles:
    gold = [pair.gold[w] for w in members[p.cluster_id]]
    purity = 100.0 * max(gold.count(c) for c in set(gold)) / len(gold)
    print(f"  cluster {p.cluster_id}: gold purity {purity:.1f}%")

png = plot_clusters(reduced, clustering, OUT / "clusters.png")
print(f"\nscatter written to {png}")
