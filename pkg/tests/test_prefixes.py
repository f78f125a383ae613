"""Prefix profiling, inventory mapping, innovation detection."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nounclass.cluster import Clustering
from nounclass.core import UNKNOWN_CLASS, ValidationError
from nounclass.prefixes import (
    PrefixInventory,
    cluster_predictions,
    detect_innovations,
    map_cluster,
    map_profiles,
    profile_cluster,
    profile_clustering,
)


@pytest.fixture()
def inventory():
    return PrefixInventory.default()


def small_clustering(assignments):
    k = max(assignments.values()) + 1
    return Clustering(
        assignments=assignments,
        centroids=np.zeros((k, 2)),
        inertia=0.0,
        seed=42,
        iterations=1,
        inertia_history=[0.0],
    )


class TestProfileCluster:
    def test_length_two_beats_shorter_on_tie(self):
        # "ma" covers 3/4 = 75%, single "m" the same 75%: longer prefix wins.
        profile = profile_cluster(["maembe", "matunda", "magari", "kitabu"])
        assert profile.dominant_prefix == "ma"
        assert profile.consistency == pytest.approx(75.0)

    def test_elision_prefix(self):
        profile = profile_cluster(["k'adzamuhala", "k'ahendzeze", "k'ululu"])
        assert profile.dominant_prefix == "k'"
        assert profile.consistency == pytest.approx(100.0)

    def test_singleton_takes_longest(self):
        profile = profile_cluster(["watu"])
        assert profile.dominant_prefix == "wat"
        assert profile.consistency == pytest.approx(100.0)

    def test_histogram_counts(self):
        profile = profile_cluster(["maembe", "matunda"])
        assert profile.prefix_histogram["ma"] == 2
        assert profile.prefix_histogram["mae"] == 1
        assert profile.prefix_histogram["m"] == 2

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            profile_cluster([])

    @given(st.permutations(["maembe", "matunda", "magari", "kitabu", "kiti"]))
    def test_permutation_invariant(self, members):
        base = profile_cluster(["maembe", "matunda", "magari", "kitabu", "kiti"])
        other = profile_cluster(list(members))
        assert other.dominant_prefix == base.dominant_prefix
        assert other.consistency == base.consistency

    def test_consistency_equals_direct_recount(self, rng):
        vocab = ["".join(rng.choice(list("abkmuw"), size=5)) for _ in range(30)]
        profile = profile_cluster(vocab)
        recount = sum(1 for w in vocab if w.startswith(profile.dominant_prefix))
        assert profile.consistency == pytest.approx(100.0 * recount / len(vocab))
        assert 0.0 <= profile.consistency <= 100.0


class TestMapCluster:
    def test_ma_maps_to_class_6(self, inventory):
        profile = profile_cluster(["maembe", "matunda", "magari"])
        mapped = map_cluster(profile, inventory)
        assert mapped.mapped_class == 6
        assert not mapped.ambiguous

    def test_mu_ambiguous_first_listed(self, inventory):
        profile = profile_cluster(["mutu", "muti", "muko"])
        mapped = map_cluster(profile, inventory)
        assert mapped.mapped_class == 1
        assert mapped.ambiguous
        assert mapped.candidate_classes == [1, 3]

    def test_absent_prefix_unknown(self, inventory):
        profile = profile_cluster(["zxqqa", "zxqqb"])
        mapped = map_cluster(profile, inventory)
        assert mapped.mapped_class == UNKNOWN_CLASS

    def test_longest_match_wins(self, inventory):
        # dominant "oku" should match the 3-char entry (class 15), not "u".
        profile = profile_cluster(["okulinda", "okusoma", "okuimba"])
        assert profile.dominant_prefix == "oku"
        mapped = map_cluster(profile, inventory)
        assert mapped.matched_prefix == "oku"
        assert mapped.mapped_class == 15

    def test_three_char_dominant_matches_two_char_entry(self, inventory):
        profile = profile_cluster(["k'adza", "k'ahendza"])
        assert profile.dominant_prefix == "k'a"
        mapped = map_cluster(profile, inventory)
        assert mapped.matched_prefix == "k'"
        assert mapped.mapped_class == 15

    def test_pure_function_of_inputs(self, inventory):
        profile = profile_cluster(["maembe", "matunda"])
        m1 = map_cluster(profile, inventory)
        m2 = map_cluster(profile, inventory)
        assert (m1.mapped_class, m1.ambiguous, m1.matched_prefix) == (
            m2.mapped_class, m2.ambiguous, m2.matched_prefix)


class TestInventoryValidation:
    def test_prefix_too_long_rejected(self):
        with pytest.raises(ValidationError, match="1-3"):
            PrefixInventory({"abcd": [1]})

    def test_class_outside_universe_rejected(self):
        with pytest.raises(ValidationError, match="universe"):
            PrefixInventory({"ma": [99]}, class_universe=frozenset({1, 2, 6}))

    def test_roundtrip_file(self, tmp_path, inventory):
        path = tmp_path / "inv.jsonl"
        inventory.save(path)
        again = PrefixInventory.load(path)
        assert again.entries == inventory.entries
        assert again.provenance == inventory.provenance


class TestDetectInnovations:
    def _profiles(self, inventory):
        flagged = profile_cluster(["qo" + s for s in ("la", "ta", "ka", "ma")] * 13
                                  + ["xulu", "xaka"], cluster_id=4)
        known = profile_cluster(["maembe", "matunda", "magari"], cluster_id=1)
        return map_profiles([flagged, known], inventory)

    def test_planted_novel_prefix_flagged(self, inventory):
        profiles = self._profiles(inventory)
        reports = detect_innovations(profiles, inventory, min_consistency=90, min_size=20)
        assert [r.cluster_id for r in reports] == [4]
        assert reports[0].dominant_prefix == "qo"
        assert reports[0].consistency >= 90

    def test_inventory_hit_not_flagged(self, inventory):
        known = map_profiles([profile_cluster(["ma" + s for s in "bcdefghijklmnopqrstu"],
                                              cluster_id=0)], inventory)
        assert detect_innovations(known, inventory, min_size=10) == []

    def test_low_consistency_not_flagged(self, inventory):
        # Novel prefix at 60% coverage, below the 90% threshold.
        members = ["qola"] * 12 + ["zena"] * 4 + ["hiki"] * 4
        profiles = map_profiles([profile_cluster(members, cluster_id=0)], inventory)
        assert profiles[0].consistency == pytest.approx(60.0)
        assert detect_innovations(profiles, inventory, min_consistency=90, min_size=10) == []

    def test_small_cluster_not_flagged(self, inventory):
        profiles = map_profiles([profile_cluster(["qola", "qoba"], cluster_id=0)], inventory)
        assert detect_innovations(profiles, inventory, min_size=20) == []

    def test_exemplars_ordered_by_frequency(self, inventory):
        members = [f"qo{c}a" for c in "bdfghjklmnpr"] * 3
        profiles = map_profiles([profile_cluster(members, cluster_id=0)], inventory)
        freqs = {w: i for i, w in enumerate(sorted(set(members)))}
        reports = detect_innovations(
            profiles, inventory, min_size=10,
            frequencies=freqs, members={0: sorted(set(members))},
        )
        exemplars = reports[0].exemplars
        assert len(exemplars) == 10
        assert exemplars == sorted(exemplars, key=lambda w: (-freqs[w], w))

    def test_expectation_conflict_flagged(self, inventory):
        profiles = map_profiles(
            [profile_cluster(["ma" + s for s in "bcdefghijklmnopqrstu"], cluster_id=0)],
            inventory)
        reports = detect_innovations(
            profiles, inventory, min_size=10, expected={"ma": 2})
        assert len(reports) == 1
        assert "expected" in reports[0].reason

    def test_outcomes_partition_profiles(self, inventory):
        """Each profile is mapped, unknown, or flagged; flags only on unknowns."""
        members = {
            0: ["maembe", "matunda", "magari"],
            1: ["qo" + s for s in ("la", "ta", "ka")] * 10,
            2: ["zx" + s for s in ("a", "b")],
        }
        profiles = map_profiles(
            [profile_cluster(m, cluster_id=c) for c, m in members.items()], inventory)
        reports = detect_innovations(profiles, inventory, min_consistency=90, min_size=5)
        flagged = {r.cluster_id for r in reports}
        for p in profiles:
            outcomes = [p.mapped_class != UNKNOWN_CLASS,
                        p.mapped_class == UNKNOWN_CLASS and p.cluster_id not in flagged,
                        p.cluster_id in flagged]
            assert sum(outcomes) == 1


class TestClusterPredictions:
    def test_confidence_is_consistency_fraction(self, inventory):
        clustering = small_clustering({"maembe": 0, "matunda": 0, "kitabu": 1, "kidogo": 1})
        profiles = map_profiles(profile_clustering(clustering), inventory)
        preds = {p.word: p for p in cluster_predictions(clustering, profiles)}
        assert preds["maembe"].noun_class == 6
        assert preds["maembe"].confidence == pytest.approx(1.0)
        assert preds["kitabu"].noun_class == 7
        assert preds["maembe"].method == "clustering"

    def test_unknown_cluster_words_carry_unknown(self, inventory):
        clustering = small_clustering({"zxqa": 0, "zxqb": 0})
        profiles = map_profiles(profile_clustering(clustering), inventory)
        preds = cluster_predictions(clustering, profiles)
        assert all(p.noun_class == UNKNOWN_CLASS for p in preds)

    def test_join_matches_direct_recomputation(self, inventory, rng):
        words = [f"ma{i:02d}" for i in range(20)] + [f"ki{i:02d}" for i in range(20)]
        assignment = {w: int(i >= 20) for i, w in enumerate(words)}
        clustering = small_clustering(assignment)
        profiles = map_profiles(profile_clustering(clustering), inventory)
        by_id = {p.cluster_id: p for p in profiles}
        preds = cluster_predictions(clustering, profiles)
        # Independent join oracle: look the word's cluster up directly.
        for p in preds:
            prof = by_id[assignment[p.word]]
            assert p.noun_class == prof.mapped_class
            assert p.confidence == pytest.approx(prof.consistency / 100.0)

    def test_missing_profile_rejected(self, inventory):
        clustering = small_clustering({"maembe": 0, "kitabu": 1})
        profiles = map_profiles([profile_cluster(["maembe"], cluster_id=0)], inventory)
        with pytest.raises(ValidationError, match="no profile"):
            cluster_predictions(clustering, profiles)
