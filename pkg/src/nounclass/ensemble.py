"""Weighted multi-method voting with a minimum-confidence gate, plus baselines.

Per word, each method contributes weight(m) * confidence(m) to the score of
its predicted class. The raw winning score is kept for audit, but the gate is
applied to the normalized score

    combined = score(final_class) / sum of weights of methods that predicted
               the word

because a 0.70 threshold is only meaningful on a [0, 1] scale. Words below
the gate land in a rejected stream with a reason, so accepted + rejected
always partition the input words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import UNKNOWN_CLASS, ClassId, Prediction, ValidationError, class_key

DEFAULT_WEIGHTS = {"transfer": 1.0, "clustering": 0.8}
DEFAULT_MIN_CONF = 0.70
KNOWN_METHODS = ("transfer", "clustering")


@dataclass(frozen=True)
class MethodVote:
    noun_class: ClassId
    confidence: float
    weight: float


@dataclass
class EnsembleResult:
    """Merged prediction for one word with per-method provenance."""

    word: str
    final_class: ClassId
    combined_confidence: float
    per_method: dict[str, MethodVote]
    agreed: bool
    raw_score: float
    rejection_reason: str | None = None

    @property
    def accepted(self) -> bool:
        return self.rejection_reason is None

    def to_record(self) -> dict:
        rec = {
            "word": self.word,
            "class": self.final_class,
            "combined_confidence": self.combined_confidence,
            "raw_score": self.raw_score,
            "agreed": self.agreed,
            "per_method": {
                m: {"class": v.noun_class, "confidence": v.confidence, "weight": v.weight}
                for m, v in sorted(self.per_method.items())
            },
        }
        if self.rejection_reason is not None:
            rec["reason"] = self.rejection_reason
        return rec


@dataclass
class EnsembleOutput:
    accepted: list[EnsembleResult]
    rejected: list[EnsembleResult]
    excluded_unknown: int = 0
    duplicate_predictions: int = 0

    def summary(self) -> dict:
        n_in = len(self.accepted) + len(self.rejected)
        mean_acc = (
            sum(r.combined_confidence for r in self.accepted) / len(self.accepted)
            if self.accepted
            else None
        )
        mean_all = (
            sum(r.combined_confidence for r in self.accepted + self.rejected) / n_in
            if n_in
            else None
        )
        return {
            "input_words": n_in,
            "accepted": len(self.accepted),
            "rejected": len(self.rejected),
            "excluded_unknown": self.excluded_unknown,
            "duplicate_predictions": self.duplicate_predictions,
            "mean_confidence_accepted": mean_acc,
            "mean_confidence_all": mean_all,
            "agreed": sum(1 for r in self.accepted if r.agreed),
        }


def _first_by_word(predictions: Iterable, counter: list[int]) -> dict[str, object]:
    """Index predictions by word, keeping the first seen per word."""
    by_word: dict[str, object] = {}
    for p in predictions:
        if p.word in by_word:
            counter[0] += 1
            continue
        by_word[p.word] = p
    return by_word


def ensemble_vote(
    transfer: Sequence,
    clustering: Sequence,
    weights: Mapping[str, float] | None = None,
    min_conf: float = DEFAULT_MIN_CONF,
    *,
    require_multi: bool = False,
) -> EnsembleOutput:
    """Merge transfer and clustering predictions by weighted per-class voting.

    Accepts any objects exposing ``word``, ``noun_class`` and ``confidence``.
    Clustering predictions of class "unknown" never participate. With
    ``require_multi`` set, words seen by only one method are rejected instead
    of passing through on that method's vote alone.
    """
    weights = dict(DEFAULT_WEIGHTS if weights is None else weights)
    for name in weights:
        if name not in KNOWN_METHODS:
            raise ValidationError(f"unknown method name in weights: {name!r}")
    for name, w in weights.items():
        if w <= 0:
            raise ValidationError(f"weight for {name!r} must be positive, got {w}")

    dup_counter = [0]
    unknown = 0
    per_method_by_word: dict[str, dict[str, object]] = {}
    cluster_known = []
    for p in clustering:
        if p.noun_class == UNKNOWN_CLASS:
            unknown += 1
            continue
        cluster_known.append(p)
    per_method_by_word["transfer"] = _first_by_word(transfer, dup_counter)
    per_method_by_word["clustering"] = _first_by_word(cluster_known, dup_counter)

    # Union of words, in first-appearance order across methods (transfer first).
    words: list[str] = []
    seen: set[str] = set()
    for method in KNOWN_METHODS:
        for w in per_method_by_word.get(method, {}):
            if w not in seen:
                seen.add(w)
                words.append(w)

    accepted: list[EnsembleResult] = []
    rejected: list[EnsembleResult] = []
    for word in words:
        votes: dict[str, MethodVote] = {}
        for method in KNOWN_METHODS:
            pred = per_method_by_word.get(method, {}).get(word)
            if pred is None:
                continue
            if not 0.0 <= pred.confidence <= 1.0:
                raise ValidationError(
                    f"{method} confidence for {word!r} outside [0,1]: {pred.confidence}"
                )
            votes[method] = MethodVote(pred.noun_class, pred.confidence, weights[method])

        scores: dict[ClassId, float] = {}
        for v in votes.values():
            scores[v.noun_class] = scores.get(v.noun_class, 0.0) + v.weight * v.confidence
        final_class = min(scores, key=lambda c: (-scores[c], class_key(c)))
        raw = scores[final_class]
        total_weight = sum(v.weight for v in votes.values())
        combined = raw / total_weight
        agreed = all(v.noun_class == final_class for v in votes.values())

        result = EnsembleResult(
            word=word,
            final_class=final_class,
            combined_confidence=combined,
            per_method=votes,
            agreed=agreed,
            raw_score=raw,
        )
        if require_multi and len(votes) < 2:
            result.rejection_reason = "single method"
            rejected.append(result)
        elif combined < min_conf:
            result.rejection_reason = f"combined confidence {combined:.4f} < {min_conf}"
            rejected.append(result)
        else:
            accepted.append(result)

    return EnsembleOutput(
        accepted=accepted,
        rejected=rejected,
        excluded_unknown=unknown,
        duplicate_predictions=dup_counter[0],
    )


def agreement_rate(a: Sequence, b: Sequence) -> float | None:
    """Percentage of words predicted by both methods on which the classes agree.

    Words classed "unknown" on either side do not count as predictions.
    Returns None when the two methods share no words (undefined rate).
    """
    map_a = {p.word: p.noun_class for p in a if p.noun_class != UNKNOWN_CLASS}
    map_b = {p.word: p.noun_class for p in b if p.noun_class != UNKNOWN_CLASS}
    shared = map_a.keys() & map_b.keys()
    if not shared:
        return None
    matches = sum(1 for w in shared if map_a[w] == map_b[w])
    return 100.0 * matches / len(shared)


def frequency_baseline(
    class_distribution: Mapping[ClassId, int],
    targets: Sequence[str],
) -> list[Prediction]:
    """Assign the modal source class to every target word.

    Confidence is the modal class's share of the distribution; distribution
    ties break toward the lower class id.
    """
    if not class_distribution:
        raise ValidationError("frequency_baseline: empty class distribution")
    total = sum(class_distribution.values())
    modal = min(class_distribution, key=lambda c: (-class_distribution[c], class_key(c)))
    share = class_distribution[modal] / total
    return [Prediction(w, modal, share, "frequency") for w in targets]


def random_baseline(
    class_set: Iterable[ClassId],
    targets: Sequence[str],
    seed: int,
) -> list[Prediction]:
    """Uniform seeded class draw per word; same seed reproduces the output."""
    classes = sorted(set(class_set), key=class_key)
    if not classes:
        raise ValidationError("random_baseline: empty class set")
    rng = np.random.default_rng(seed)
    conf = 1.0 / len(classes)
    picks = rng.integers(0, len(classes), size=len(targets))
    return [Prediction(w, classes[int(i)], conf, "random") for w, i in zip(targets, picks)]
