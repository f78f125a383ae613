"""Summary statistics and evaluation metrics."""

import numpy as np
import pytest

from nounclass.cluster import ReducedMatrix, kmeans
from nounclass.core import Prediction
from nounclass.ensemble import EnsembleResult, MethodVote, ensemble_vote
from nounclass.report import (
    discovery_summary,
    internal_consistency,
    label_accuracy,
    load_reference_values,
    plot_clusters,
    render_text_report,
    variant_share,
)


def result(word, cls, conf=0.9, methods=("transfer", "clustering")):
    votes = {m: MethodVote(cls, conf, 1.0) for m in methods}
    return EnsembleResult(word, cls, conf, votes, True, conf * len(methods))


class TestDiscoverySummary:
    def test_empty_input_zeroed(self):
        summary = discovery_summary([])
        assert summary["discovered_words"] == 0
        assert summary["class_distribution"] == []
        assert summary["method_counts"] == {}

    def test_counts_and_shares_recomputable(self):
        results = [result(f"a{i}", 6) for i in range(6)] + [result(f"b{i}", 7) for i in range(2)]
        summary = discovery_summary(results)
        assert summary["discovered_words"] == 8
        dist = {row["class"]: row for row in summary["class_distribution"]}
        assert dist[6]["count"] == 6
        assert dist[6]["share"] == pytest.approx(100.0 * 6 / 8)
        assert sum(row["count"] for row in summary["class_distribution"]) == 8
        assert sum(row["share"] for row in summary["class_distribution"]) == pytest.approx(100.0)

    def test_synthetic_distribution_matches_plant(self, tiny_pair):
        from nounclass.prefixes import cluster_predictions, map_profiles, profile_clustering
        from nounclass.cluster import reduce_pca
        from nounclass.transfer import classify_corpus

        tr = classify_corpus(list(tiny_pair.target), tiny_pair.source, k=5, threshold=0.6)
        red = reduce_pca(list(tiny_pair.target.words), np.array(tiny_pair.target.matrix), d=10)
        cl = kmeans(red, k=6, seed=42)
        profiles = map_profiles(profile_clustering(cl), tiny_pair.inventory())
        out = ensemble_vote(tr.retained, cluster_predictions(cl, profiles))
        summary = discovery_summary(out, profiles)

        planted = {}
        for c, n in tiny_pair.manifest["counts"]["target_class_counts"]:
            planted[c] = n
        got = {row["class"]: row["count"] for row in summary["class_distribution"]}
        # Accepted ensemble counts track planted class sizes within noise.
        for cls, n in planted.items():
            assert got.get(cls, 0) >= 0.7 * n

    def test_variant_share_definition(self):
        # 266-word variant vs 1090 regular words -> 19.6% of the class.
        assert variant_share(266, 1090) == pytest.approx(19.6, abs=0.05)
        assert variant_share(0, 10) == 0.0
        assert variant_share(0, 0) == 0.0


class TestInternalConsistency:
    def test_all_match(self):
        preds = [Prediction(w, 1, 0.9, "m") for w in ("a", "b")]
        res = internal_consistency(preds, {"a": "a", "b": "b"})
        assert res.percentage == pytest.approx(100.0)
        assert (res.matched, res.with_form, res.without_form) == (2, 2, 0)

    def test_one_of_four(self):
        preds = [Prediction(w, 1, 0.9, "m") for w in "abcd"]
        forms = {"a": "a", "b": "x", "c": "y", "d": "z"}
        res = internal_consistency(preds, forms)
        assert res.percentage == pytest.approx(25.0)

    def test_missing_forms_counted_separately(self):
        preds = [Prediction(w, 1, 0.9, "m") for w in "abc"]
        res = internal_consistency(preds, {"a": "a"})
        assert res.percentage == pytest.approx(100.0)
        assert res.without_form == 2

    def test_no_forms_absent(self):
        res = internal_consistency([Prediction("a", 1, 0.9, "m")], {})
        assert res.percentage is None


class TestLabelAccuracy:
    def test_exact_match(self):
        preds = [Prediction("a", 1, 0.9, "m"), Prediction("b", 2, 0.9, "m")]
        acc = label_accuracy(preds, {"a": 1, "b": 2})
        assert acc.percentage == pytest.approx(100.0)
        assert acc.correct == acc.total == 2

    def test_confusion_counts(self):
        preds = [Prediction("a", 1, 0.9, "m"), Prediction("b", 3, 0.9, "m")]
        acc = label_accuracy(preds, {"a": 1, "b": 2})
        assert acc.percentage == pytest.approx(50.0)
        assert acc.confusion[(2, 3)] == 1
        assert sum(acc.confusion.values()) == acc.total

    def test_disjoint_words_absent(self):
        acc = label_accuracy([Prediction("a", 1, 0.9, "m")], {"z": 1})
        assert acc is None

    def test_synthetic_transfer_accuracy_high(self, tiny_pair):
        from nounclass.transfer import classify_corpus

        tr = classify_corpus(list(tiny_pair.target), tiny_pair.source, k=5, threshold=0.6)
        acc = label_accuracy(tr.retained, tiny_pair.gold)
        assert acc is not None
        assert acc.percentage >= 95.0


class TestRendering:
    def test_reference_values_load_and_are_marked(self):
        ref = load_reference_values()
        assert "NOT reproducible" in ref["note"]
        assert ref["values"]["discovered_words"] == 2455

    def test_text_report_contains_sections(self):
        results = [result("akimbola", 2)]
        summary = discovery_summary(results)
        summary["agreement_rate"] = 36.7
        text = render_text_report(summary, load_reference_values())
        assert "Class distribution" in text
        assert "36.7%" in text
        assert "non-normative" in text

    def test_plot_writes_image(self, tmp_path, rng):
        words = [f"w{i}" for i in range(30)]
        coords = rng.normal(size=(30, 5))
        red = ReducedMatrix(words, coords, "pca", 5)
        cl = kmeans(red, k=3, seed=42)
        out = plot_clusters(red, cl, tmp_path / "clusters.png")
        assert out.exists()
        assert out.stat().st_size > 1000
