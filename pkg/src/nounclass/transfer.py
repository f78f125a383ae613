"""Cross-lingual KNN classification of target words against labeled source embeddings.

For each target word the K nearest source neighbors (by cosine similarity)
vote on a noun class. Confidence is the product of vote agreement and
geometric support:

    vote_conf  = (votes for the winning class) / k
    sim_conf   = mean similarity of the winner's supporting neighbors,
                 clamped to [0, 1]
    confidence = vote_conf * sim_conf

Vote ties break by higher summed similarity, then lower class id. Target
words that also occur verbatim in the source index are classified normally;
pass ``exclude_self=True`` for same-language experiments.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import ClassId, Prediction, ValidationError, class_key
from .store import EmbeddingStore, WordEmbedding, nearest

log = logging.getLogger(__name__)

DEFAULT_K = 5
DEFAULT_THRESHOLD = 0.60


@dataclass(frozen=True)
class Neighbor:
    word: str
    noun_class: ClassId
    similarity: float

    def to_record(self) -> dict:
        return {"word": self.word, "class": self.noun_class, "similarity": self.similarity}


@dataclass
class TransferPrediction:
    """One classified target word with its full neighbor evidence."""

    word: str
    predicted_class: ClassId
    confidence: float
    neighbors: list[Neighbor]
    vote_conf: float
    sim_conf: float
    method: str = "transfer"

    @property
    def noun_class(self) -> ClassId:
        return self.predicted_class

    def to_prediction(self) -> Prediction:
        return Prediction(self.word, self.predicted_class, self.confidence, self.method)

    def to_record(self) -> dict:
        return {
            "word": self.word,
            "class": self.predicted_class,
            "confidence": self.confidence,
            "vote_conf": self.vote_conf,
            "sim_conf": self.sim_conf,
            "neighbors": [n.to_record() for n in self.neighbors],
            "method": self.method,
        }


@dataclass
class TransferResult:
    """Thresholded corpus classification plus its reporting counters."""

    retained: list[TransferPrediction]
    attempted: int
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (word, reason)
    threshold: float = DEFAULT_THRESHOLD
    k: int = DEFAULT_K
    mean_confidence_retained: float | None = None
    mean_confidence_all: float | None = None

    @property
    def retained_count(self) -> int:
        return len(self.retained)

    def summary(self) -> dict:
        return {
            "attempted": self.attempted,
            "retained": self.retained_count,
            "skipped": len(self.skipped),
            "threshold": self.threshold,
            "k": self.k,
            "mean_confidence_retained": self.mean_confidence_retained,
            "mean_confidence_all": self.mean_confidence_all,
        }


def vote(neighbors: Sequence[Neighbor], k: int) -> tuple[ClassId, float, float]:
    """Plurality vote over neighbor classes -> (class, vote_conf, sim_conf).

    Ties break by higher summed similarity, then lower class id. sim_conf is
    the mean similarity of the winning class's supporters, clamped to [0, 1]
    so confidence stays a probability-like score even with negative cosines.
    """
    if not neighbors:
        raise ValidationError("vote: no neighbors")
    votes: dict[ClassId, int] = {}
    sims: dict[ClassId, list[float]] = {}
    for nb in neighbors:
        votes[nb.noun_class] = votes.get(nb.noun_class, 0) + 1
        sims.setdefault(nb.noun_class, []).append(nb.similarity)

    winner = min(
        votes,
        key=lambda c: (-votes[c], -sum(sims[c]), class_key(c)),
    )
    vote_conf = votes[winner] / k
    sim_conf = sum(sims[winner]) / len(sims[winner])
    sim_conf = max(0.0, min(1.0, sim_conf))
    return winner, vote_conf, sim_conf


def classify_word(
    target: WordEmbedding,
    source: EmbeddingStore,
    k: int = DEFAULT_K,
    *,
    exclude_self: bool = False,
) -> TransferPrediction:
    """Classify one target word by the plurality class of its k nearest source words."""
    if len(source) == 0:
        raise ValidationError("classify_word: source index is empty")
    if not source.fully_labeled:
        raise ValidationError("classify_word: source index has unlabeled entries")
    if not np.all(np.isfinite(target.vector)) or not np.any(target.vector):
        raise ValidationError(f"degenerate vector for target word {target.word!r}")

    exclude = frozenset({target.word}) if exclude_self else frozenset()
    found = nearest(target.vector, source, k, exclude=exclude)
    neighbors = [Neighbor(w, source.labels[w], s) for w, s in found.neighbors]
    if found.short:
        log.warning(
            "classify_word(%r): only %d of k=%d neighbors available", target.word, len(neighbors), k
        )
    winner, vote_conf, sim_conf = vote(neighbors, k=len(neighbors))
    return TransferPrediction(
        word=target.word,
        predicted_class=winner,
        confidence=vote_conf * sim_conf,
        neighbors=neighbors,
        vote_conf=vote_conf,
        sim_conf=sim_conf,
    )


def classify_corpus(
    targets: Iterable[WordEmbedding],
    source: EmbeddingStore,
    k: int = DEFAULT_K,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    exclude_self: bool = False,
) -> TransferResult:
    """Classify every target word, retaining predictions with confidence >= threshold.

    Degenerate target vectors are skipped with a diagnostic instead of failing
    the run. Results keep input order; classification of each word is pure, so
    the outcome does not depend on evaluation order.
    """
    retained: list[TransferPrediction] = []
    skipped: list[tuple[str, str]] = []
    attempted = 0
    conf_sum_all = 0.0

    for target in targets:
        try:
            pred = classify_word(target, source, k, exclude_self=exclude_self)
        except ValidationError as exc:
            if "degenerate vector" in str(exc):
                skipped.append((target.word, str(exc)))
                log.warning("classify_corpus: skipping %r: %s", target.word, exc)
                continue
            raise
        attempted += 1
        conf_sum_all += pred.confidence
        if pred.confidence >= threshold:
            retained.append(pred)

    mean_all = conf_sum_all / attempted if attempted else None
    mean_retained = (
        math.fsum(p.confidence for p in retained) / len(retained) if retained else None
    )
    return TransferResult(
        retained=retained,
        attempted=attempted,
        skipped=skipped,
        threshold=threshold,
        k=k,
        mean_confidence_retained=mean_retained,
        mean_confidence_all=mean_all,
    )
