#!/usr/bin/env python3
"""Walkthrough: weighted ensemble voting and innovation discovery.

Plants a vowel-coalescence innovation (wa- rewritten to a- on half of class 2)
that the labeled source language cannot explain, then shows the two methods
disagreeing productively: transfer handles cognates, clustering finds the
novel prefix, and the ensemble keeps only what it can defend.
"""

from nounclass.cluster import kmeans, reduce_pca
from nounclass.corpus import candidate_ranks, extract_candidates
from nounclass.ensemble import agreement_rate, ensemble_vote, frequency_baseline
from nounclass.prefixes import cluster_predictions, detect_innovations, map_profiles, profile_clustering
from nounclass.report import discovery_summary, render_text_report, variant_share
from nounclass.synth import generate_pair, preset
from nounclass.transfer import classify_corpus

pair = generate_pair(preset("innovation"))
planted = pair.manifest["innovations"][0]
print(f"planted: {planted['replaced']}- -> {planted['novel']}- at rate {planted['rate']}"
      f" ({len(planted['rewritten_words'])} words rewritten)")

# Two methods, independently.
transfer = classify_corpus(list(pair.target), pair.source, k=5, threshold=0.60)
candidates, _ = extract_candidates(pair.corpus_lines)
words, matrix, _ = pair.target.subset(candidates)
reduced = reduce_pca(words, matrix, d=50)
clustering = kmeans(reduced, k=13, seed=42)  # 12 planted classes + 1 for the variant
profiles = map_profiles(profile_clustering(clustering), pair.inventory())
cluster_preds = cluster_predictions(clustering, profiles)

print(f"\ntransfer:   {transfer.retained_count} predictions")
print(f"clustering: {len(cluster_preds)} predictions")
rate = agreement_rate(transfer.retained, cluster_preds)
print(f"cross-method agreement: {rate:.1f}%  (disagreement is where discovery lives)")

# ---------------------------------------------------------------------------
# Innovation detection: large, consistent clusters the inventory cannot name.
# ---------------------------------------------------------------------------
reports = detect_innovations(
    profiles, pair.inventory(), min_consistency=90.0, min_size=20,
    frequencies=candidate_ranks(candidates), members=clustering.members(),
)
for r in reports:
    print(f"\ninnovation candidate: {r.dominant_prefix}- "
          f"({r.size} words, {r.consistency:.1f}% consistency): {r.reason}")
    print(f"  exemplars: {', '.join(r.exemplars[:5])}")
    base = sum(p.size for p in profiles if p.mapped_class == 2)
    print(f"  share of class 2 if it is a class-2 variant: "
          f"{variant_share(r.size, base):.1f}%")
    truly_rewritten = sum(1 for w in clustering.members()[r.cluster_id]
                          if w in set(planted["rewritten_words"]))
    print(f"  {truly_rewritten}/{r.size} members are genuine plants")

# ---------------------------------------------------------------------------
# Weighted ensemble: transfer 1.0, clustering 0.8, gate at 0.70.
# ---------------------------------------------------------------------------
out = ensemble_vote(transfer.retained, cluster_preds,
                    weights={"transfer": 1.0, "clustering": 0.8}, min_conf=0.70)
summary = out.summary()
print(f"\nensemble: {summary['accepted']} accepted, {summary['rejected']} rejected, "
      f"{summary['excluded_unknown']} unknown-cluster words excluded")
gold_hits = sum(1 for r in out.accepted if pair.gold[r.word] == r.final_class)
print(f"accepted accuracy vs plant: {100 * gold_hits / len(out.accepted):.1f}%")

baseline = frequency_baseline(
    {c: n for c, n in map(tuple, pair.manifest["counts"]["target_class_counts"])},
    [r.word for r in out.accepted],
)
base_hits = sum(1 for p in baseline if pair.gold[p.word] == p.noun_class)
print(f"frequency-baseline accuracy on the same words: "
      f"{100 * base_hits / len(baseline):.1f}%")

print("\n" + render_text_report(
    discovery_summary(out, profiles, reports, extra={"agreement_rate": rate})))
