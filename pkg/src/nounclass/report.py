"""Summary statistics and evaluation metrics for pipeline outputs.

Every percentage in a summary is recomputable from the counts emitted next to
it. Reference values from the original full-scale Giriama run ship in a data
file clearly marked non-normative: they required a pretrained 300M-parameter
model and private corpora, so reports show them side by side without implying
desk-scale reproducibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .cluster import Clustering, ReducedMatrix, reduce_pca
from .core import ClassId, class_key
from .ensemble import EnsembleOutput, EnsembleResult
from .prefixes import ClusterProfile, InnovationReport


def _word_class(p) -> tuple[str, ClassId]:
    cls = getattr(p, "noun_class", None)
    if cls is None:
        cls = p.final_class
    return p.word, cls


@dataclass
class ConsistencyResult:
    """Exact-match rate of externally generated forms against corpus forms."""

    percentage: float | None
    matched: int
    with_form: int
    without_form: int

    def to_record(self) -> dict:
        return {
            "percentage": self.percentage,
            "matched": self.matched,
            "with_form": self.with_form,
            "without_form": self.without_form,
        }


@dataclass
class LabelAccuracy:
    percentage: float
    correct: int
    total: int
    confusion: dict[tuple[ClassId, ClassId], int]

    def to_record(self) -> dict:
        return {
            "percentage": self.percentage,
            "correct": self.correct,
            "total": self.total,
            "confusion": [[g, p, n] for (g, p), n in sorted(self.confusion.items(), key=str)],
        }


def discovery_summary(
    results: EnsembleOutput | Sequence[EnsembleResult],
    profiles: Sequence[ClusterProfile] = (),
    innovations: Sequence[InnovationReport] = (),
    extra: Mapping | None = None,
) -> dict:
    """Counts per method, class distribution, cluster table, innovation list."""
    accepted = results.accepted if isinstance(results, EnsembleOutput) else list(results)

    method_counts: dict[str, int] = {}
    class_counts: dict[ClassId, int] = {}
    agreed = 0
    for r in accepted:
        class_counts[r.final_class] = class_counts.get(r.final_class, 0) + 1
        if r.agreed:
            agreed += 1
        for m in r.per_method:
            method_counts[m] = method_counts.get(m, 0) + 1

    total = len(accepted)
    distribution = [
        {"class": c, "count": n, "share": 100.0 * n / total if total else 0.0}
        for c, n in sorted(class_counts.items(), key=lambda cn: class_key(cn[0]))
    ]
    cluster_table = [
        {
            "cluster": p.cluster_id,
            "size": p.size,
            "dominant_prefix": p.dominant_prefix,
            "consistency": p.consistency,
            "class": p.mapped_class,
            "ambiguous": p.ambiguous,
        }
        for p in profiles
    ]
    summary = {
        "discovered_words": total,
        "agreed": agreed,
        "method_counts": dict(sorted(method_counts.items())),
        "class_distribution": distribution,
        "clusters": cluster_table,
        "innovations": [i.to_record() for i in innovations],
    }
    if isinstance(results, EnsembleOutput):
        summary["ensemble"] = results.summary()
    if extra:
        summary.update(extra)
    return summary


def variant_share(variant_size: int, base_class_size: int) -> float:
    """Share of a class accounted for by a variant cluster, in percent.

    The denominator includes the variant itself: a 266-word variant cluster
    next to 1,090 regular words is 19.6% of the class.
    """
    total = variant_size + base_class_size
    if total == 0:
        return 0.0
    return 100.0 * variant_size / total


def internal_consistency(
    predictions: Sequence,
    generated_forms: Mapping[str, str],
) -> ConsistencyResult:
    """Percentage of predicted words whose generated surface form matches the corpus form.

    Words with no generated form are counted separately, not as mismatches.
    """
    matched = 0
    with_form = 0
    without_form = 0
    for p in predictions:
        word, _ = _word_class(p)
        form = generated_forms.get(word)
        if form is None:
            without_form += 1
            continue
        with_form += 1
        if form == word:
            matched += 1
    pct = 100.0 * matched / with_form if with_form else None
    return ConsistencyResult(pct, matched, with_form, without_form)


def label_accuracy(
    predictions: Sequence,
    gold: Mapping[str, ClassId],
) -> LabelAccuracy | None:
    """Exact-match accuracy over words present in both predictions and gold.

    Returns None (absent) when the intersection is empty. The confusion table
    maps (gold class, predicted class) to a count.
    """
    if not gold:
        raise ValueError("label_accuracy: gold mapping is empty")
    confusion: dict[tuple[ClassId, ClassId], int] = {}
    correct = 0
    total = 0
    for p in predictions:
        word, pred_class = _word_class(p)
        if word not in gold:
            continue
        total += 1
        g = gold[word]
        confusion[(g, pred_class)] = confusion.get((g, pred_class), 0) + 1
        if g == pred_class:
            correct += 1
    if total == 0:
        return None
    return LabelAccuracy(100.0 * correct / total, correct, total, confusion)


def load_reference_values() -> dict:
    """Non-normative reference numbers from the original full-scale run."""
    path = resources.files("nounclass").joinpath("data/reference_values.json")
    return json.loads(path.read_text(encoding="utf-8"))


def render_text_report(summary: dict, reference: dict | None = None) -> str:
    """Human-readable report with an optional this-run vs reference column."""
    lines = ["Noun-class discovery report", "=" * 27, ""]
    lines.append(f"Discovered words (accepted): {summary.get('discovered_words', 0)}")
    lines.append(f"Multi-method agreements:     {summary.get('agreed', 0)}")
    for method, n in summary.get("method_counts", {}).items():
        lines.append(f"  contributions from {method}: {n}")
    if summary.get("agreement_rate") is not None:
        lines.append(f"Cross-method agreement:      {summary['agreement_rate']:.1f}%")

    dist = summary.get("class_distribution", [])
    if dist:
        lines += ["", "Class distribution", "------------------"]
        for row in dist:
            lines.append(
                f"  class {row['class']!s:>8}: {row['count']:>6}  ({row['share']:.1f}%)"
            )

    clusters = summary.get("clusters", [])
    if clusters:
        lines += ["", "Clusters", "--------",
                  "  id  size  prefix  consistency  class"]
        for row in clusters:
            amb = " (ambiguous)" if row.get("ambiguous") else ""
            lines.append(
                f"  {row['cluster']:>2}  {row['size']:>4}  {row['dominant_prefix']:<6}"
                f"  {row['consistency']:>10.1f}%  {row['class']}{amb}"
            )

    innovations = summary.get("innovations", [])
    if innovations:
        lines += ["", "Innovation candidates", "---------------------"]
        for row in innovations:
            lines.append(
                f"  cluster {row['cluster']}: {row['dominant_prefix']}- "
                f"({row['size']} words, {row['consistency']:.1f}% consistency): {row['reason']}"
            )
            if row.get("exemplars"):
                lines.append(f"    e.g. {', '.join(row['exemplars'][:5])}")

    if reference:
        lines += ["", "Reference values (non-normative, original full-scale run)",
                  "-" * 58]
        for key, val in reference.get("values", {}).items():
            lines.append(f"  {key}: {val}")
        if reference.get("note"):
            lines.append(f"  note: {reference['note']}")
    return "\n".join(lines) + "\n"


def plot_clusters(
    reduced: ReducedMatrix,
    clustering: Clustering,
    path: str | Path,
) -> Path:
    """Static 2-D scatter of the clustering, written as an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    coords = reduced.coords
    if coords.shape[1] > 2:
        flat = reduce_pca(reduced.words, coords, d=2)
        coords = flat.coords
    labels = [clustering.assignments[w] for w in reduced.words]

    fig, ax = plt.subplots(figsize=(8, 6))
    scatter = ax.scatter(coords[:, 0], coords[:, 1], c=labels, cmap="tab20", s=8, alpha=0.7)
    ax.set_title(f"{clustering.k} clusters over {len(reduced.words)} words")
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    fig.colorbar(scatter, ax=ax, label="cluster")
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
