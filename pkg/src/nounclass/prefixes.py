"""Per-cluster prefix profiling, mapping to noun classes, and innovation detection.

Prefix patterns are the first 1-3 characters of each member word; the dominant
prefix is the candidate with the highest coverage, with ties going to the
longer prefix. Cluster-to-class mapping is longest-prefix lookup against a
configurable Bantu prefix inventory; ambiguous entries resolve to the first
listed class and are flagged rather than hidden, because clustering is known
to fail for classes with ambiguous prefixes (mu-: 1 or 3).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .cluster import Clustering
from .core import UNKNOWN_CLASS, ClassId, Prediction, ValidationError, read_jsonl, write_jsonl

MAX_PREFIX_LEN = 3


@dataclass
class PrefixInventory:
    """Ordered mapping from prefix strings to candidate noun classes."""

    entries: dict[str, list[ClassId]]
    provenance: dict[str, str] = field(default_factory=dict)
    class_universe: frozenset | None = None

    def __post_init__(self):
        for prefix, classes in self.entries.items():
            if not 1 <= len(prefix) <= MAX_PREFIX_LEN:
                raise ValidationError(
                    f"inventory prefix {prefix!r} must be 1-{MAX_PREFIX_LEN} characters"
                )
            if not classes:
                raise ValidationError(f"inventory prefix {prefix!r} lists no classes")
            if self.class_universe is not None:
                for c in classes:
                    if c not in self.class_universe:
                        raise ValidationError(
                            f"inventory prefix {prefix!r}: class {c!r} outside declared universe"
                        )

    def match(self, dominant: str) -> tuple[str, list[ClassId]] | None:
        """Longest inventory prefix that is a prefix of ``dominant``, or None."""
        for length in range(min(len(dominant), MAX_PREFIX_LEN), 0, -1):
            key = dominant[:length]
            if key in self.entries:
                return key, self.entries[key]
        return None

    @classmethod
    def load(cls, path: str | Path) -> "PrefixInventory":
        meta, records = read_jsonl(path)
        entries: dict[str, list[ClassId]] = {}
        provenance: dict[str, str] = {}
        for rec in records:
            prefix = rec["prefix"]
            if prefix in entries:
                raise ValidationError(f"{path}: duplicate inventory prefix {prefix!r}")
            entries[prefix] = list(rec["classes"])
            provenance[prefix] = rec.get("source", "unspecified")
        universe = None
        if meta and "classes" in meta:
            universe = frozenset(meta["classes"]) | {UNKNOWN_CLASS}
        return cls(entries, provenance, universe)

    @classmethod
    def default(cls) -> "PrefixInventory":
        """The packaged cross-linguistic Bantu inventory."""
        path = resources.files("nounclass").joinpath("data/bantu_prefixes.jsonl")
        with resources.as_file(path) as p:
            return cls.load(p)

    def save(self, path: str | Path) -> None:
        meta = None
        if self.class_universe is not None:
            declared = sorted((c for c in self.class_universe if c != UNKNOWN_CLASS), key=str)
            meta = {"classes": declared}
        write_jsonl(
            path,
            (
                {
                    "prefix": p,
                    "classes": cs,
                    "source": self.provenance.get(p, "unspecified"),
                }
                for p, cs in self.entries.items()
            ),
            meta=meta,
        )


@dataclass
class ClusterProfile:
    """Prefix statistics for one cluster, plus its mapped class once assigned."""

    cluster_id: int
    size: int
    dominant_prefix: str
    consistency: float  # percentage in [0, 100]
    prefix_histogram: dict[str, int]
    mapped_class: ClassId | None = None
    ambiguous: bool = False
    matched_prefix: str | None = None
    candidate_classes: list[ClassId] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "cluster": self.cluster_id,
            "size": self.size,
            "dominant_prefix": self.dominant_prefix,
            "consistency": self.consistency,
            "class": self.mapped_class,
            "ambiguous": self.ambiguous,
            "matched_prefix": self.matched_prefix,
            "candidate_classes": list(self.candidate_classes),
            "prefix_histogram": dict(sorted(self.prefix_histogram.items())),
        }


@dataclass
class InnovationReport:
    """A cluster whose dominant prefix is not explained by the inventory."""

    cluster_id: int
    dominant_prefix: str
    consistency: float
    size: int
    exemplars: list[str]
    mapped_class: ClassId | None
    reason: str

    def to_record(self) -> dict:
        return {
            "cluster": self.cluster_id,
            "dominant_prefix": self.dominant_prefix,
            "consistency": self.consistency,
            "size": self.size,
            "exemplars": list(self.exemplars),
            "class": self.mapped_class,
            "reason": self.reason,
        }


def profile_cluster(members: Sequence[str], cluster_id: int = 0) -> ClusterProfile:
    """Prefix profile of one cluster's member words (mapped_class left unset).

    For each prefix length 3, 2, 1 the most frequent prefix is a candidate;
    the dominant prefix is the candidate with the highest coverage, ties going
    to the longer prefix. Consistency is the dominant prefix's coverage as a
    percentage of cluster size.
    """
    if not members:
        raise ValidationError("profile_cluster: members must be non-empty")
    for w in members:
        if len(w) < 1:
            raise ValidationError("profile_cluster: zero-length member word")

    size = len(members)
    histogram: Counter[str] = Counter()
    best_per_length: list[tuple[float, int, str]] = []
    for length in (3, 2, 1):
        counts: Counter[str] = Counter(w[:length] for w in members if len(w) >= length)
        histogram.update(counts)
        if not counts:
            continue
        # Most frequent prefix of this length; count ties break lexicographically.
        prefix, n = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        best_per_length.append((n / size, length, prefix))

    coverage, _, dominant = max(best_per_length, key=lambda t: (t[0], t[1]))
    return ClusterProfile(
        cluster_id=cluster_id,
        size=size,
        dominant_prefix=dominant,
        consistency=100.0 * coverage,
        prefix_histogram=dict(histogram),
    )


def profile_clustering(clustering: Clustering) -> list[ClusterProfile]:
    """Profiles for every cluster in a clustering, ordered by cluster id."""
    return [
        profile_cluster(words, cluster_id=cid)
        for cid, words in sorted(clustering.members().items())
        if words
    ]


def map_cluster(profile: ClusterProfile, inventory: PrefixInventory) -> ClusterProfile:
    """Assign a noun class by longest-prefix lookup of the dominant prefix.

    Ambiguous inventory entries resolve to the first listed class and flag the
    profile; no match yields the class "unknown".
    """
    hit = inventory.match(profile.dominant_prefix)
    if hit is None:
        return replace(
            profile,
            mapped_class=UNKNOWN_CLASS,
            ambiguous=False,
            matched_prefix=None,
            candidate_classes=[],
        )
    matched, classes = hit
    return replace(
        profile,
        mapped_class=classes[0],
        ambiguous=len(classes) > 1,
        matched_prefix=matched,
        candidate_classes=list(classes),
    )


def map_profiles(
    profiles: Sequence[ClusterProfile], inventory: PrefixInventory
) -> list[ClusterProfile]:
    return [map_cluster(p, inventory) for p in profiles]


def detect_innovations(
    profiles: Sequence[ClusterProfile],
    inventory: PrefixInventory,
    min_consistency: float = 90.0,
    min_size: int = 20,
    frequencies: Mapping[str, float] | None = None,
    expected: Mapping[str, ClassId] | None = None,
    members: Mapping[int, Sequence[str]] | None = None,
) -> list[InnovationReport]:
    """Clusters whose dominant prefix the inventory cannot explain.

    A cluster is flagged when it is large and internally consistent enough
    (>= min_size members, >= min_consistency) and either no inventory prefix
    matches its dominant prefix, or the match contradicts a configured
    expectation (``expected``: dominant prefix -> anticipated class).
    Exemplar words are reported by descending frequency when frequencies are
    supplied, else lexicographically.
    """
    reports: list[InnovationReport] = []
    for profile in profiles:
        if profile.size < min_size or profile.consistency < min_consistency:
            continue
        hit = inventory.match(profile.dominant_prefix)
        reason = None
        mapped: ClassId | None = None
        if hit is None:
            reason = "no inventory prefix matches"
        else:
            _, classes = hit
            mapped = classes[0]
            if expected and profile.dominant_prefix in expected:
                want = expected[profile.dominant_prefix]
                if mapped != want:
                    reason = f"maps to {mapped!r} but {want!r} was expected"
        if reason is None:
            continue

        words = list((members or {}).get(profile.cluster_id, []))
        if frequencies:
            words.sort(key=lambda w: (-frequencies.get(w, 0), w))
        else:
            words.sort()
        reports.append(
            InnovationReport(
                cluster_id=profile.cluster_id,
                dominant_prefix=profile.dominant_prefix,
                consistency=profile.consistency,
                size=profile.size,
                exemplars=words[:10],
                mapped_class=mapped,
                reason=reason,
            )
        )
    return reports


def cluster_predictions(
    clustering: Clustering, profiles: Sequence[ClusterProfile]
) -> list[Prediction]:
    """Per-word predictions from a mapped clustering (method "clustering").

    Every word receives its cluster's mapped class with confidence
    consistency/100. Words in unknown-mapped clusters carry the class
    "unknown"; downstream ensemble voting excludes them.
    """
    by_id = {p.cluster_id: p for p in profiles}
    predictions: list[Prediction] = []
    for word, cid in clustering.assignments.items():
        profile = by_id.get(cid)
        if profile is None:
            raise ValidationError(f"cluster {cid} (word {word!r}) has no profile")
        if profile.mapped_class is None:
            raise ValidationError(f"cluster {cid} profile has not been mapped")
        predictions.append(
            Prediction(
                word=word,
                noun_class=profile.mapped_class,
                confidence=profile.consistency / 100.0,
                method="clustering",
            )
        )
    return predictions
