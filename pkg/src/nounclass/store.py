"""Embedding stores: load, validate, and index `.embjsonl` dumps; cosine-similarity queries.

File format (``.embjsonl``): the first line is a header object
``{"dim": D, "lang": code, "count": N}``; every following line is one record
``{"word": str, "vector": [D floats], "label": optional class id}``.
Labeled paradigm files use a ``{"lang": code}`` header followed by
``{"word": str, "class": id}`` lines.

Loaded stores are immutable and safe to share across threads; ``nearest``
may be called concurrently for independent queries.
"""

from __future__ import annotations

import json
import logging
import math
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from .core import ClassId, ValidationError, dumps

log = logging.getLogger(__name__)


def normalize_word(word: str) -> str:
    """NFC-normalize and lowercase a surface form (apostrophe is a word character)."""
    return unicodedata.normalize("NFC", word).lower()


@dataclass(frozen=True, eq=False)
class WordEmbedding:
    """A surface form with its embedding vector and optional gold noun class."""

    word: str
    lang: str
    vector: np.ndarray
    label: ClassId | None = None


@dataclass
class LoadReport:
    """Per-file ingest accounting: how many records were kept, dropped, or deduplicated."""

    kept: int = 0
    duplicates: int = 0
    nonfinite: int = 0
    degenerate: int = 0
    empty_word: int = 0

    @property
    def warnings(self) -> int:
        return self.duplicates + self.nonfinite + self.degenerate + self.empty_word


class EmbeddingStore:
    """An immutable, order-preserving collection of word embeddings for one language.

    Iteration order equals file order of the kept records, so loading the same
    bytes twice yields identical stores.
    """

    def __init__(
        self,
        words: Sequence[str],
        matrix: np.ndarray,
        lang: str,
        labels: Mapping[str, ClassId] | None = None,
        report: LoadReport | None = None,
    ):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValidationError(
                f"matrix shape {matrix.shape} does not align with {len(words)} words"
            )
        self.words: list[str] = list(words)
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self.lang = lang
        self.labels: dict[str, ClassId] = dict(labels or {})
        self.report = report or LoadReport(kept=len(self.words))
        self._row: dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self._row) != len(self.words):
            raise ValidationError("duplicate words in store; deduplicate before construction")
        self._norms = np.linalg.norm(self.matrix, axis=1)
        self._lex_rank = np.argsort(np.argsort(np.array(self.words)))  # rank of each row's word

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._row

    def __iter__(self) -> Iterator[WordEmbedding]:
        for word in self.words:
            yield self.entry(word)

    def entry(self, word: str) -> WordEmbedding:
        i = self._row[word]
        return WordEmbedding(word, self.lang, self.matrix[i], self.labels.get(word))

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self._row[word]]

    @property
    def fully_labeled(self) -> bool:
        return len(self.labels) == len(self.words)

    def with_labels(self, labels: Mapping[str, ClassId]) -> "EmbeddingStore":
        """A copy of this store with labels attached (e.g. from a paradigm file)."""
        merged = dict(self.labels)
        merged.update({w: c for w, c in labels.items() if w in self._row})
        return EmbeddingStore(self.words, self.matrix, self.lang, merged, self.report)

    def subset(self, words: Sequence[str]) -> tuple[list[str], np.ndarray, list[str]]:
        """Rows for the given words, preserving the given order.

        Returns (present_words, matrix_rows, missing_words).
        """
        present, missing = [], []
        for w in words:
            (present if w in self._row else missing).append(w)
        rows = np.array([self._row[w] for w in present], dtype=int)
        return present, self.matrix[rows] if len(rows) else np.empty((0, self.dim)), missing


@dataclass
class LabeledParadigmSet:
    """(word, noun-class) supervision for the source language."""

    entries: dict[str, ClassId]
    lang: str
    duplicates: int = 0

    @property
    def class_set(self) -> set:
        return set(self.entries.values())

    def class_distribution(self) -> dict[ClassId, int]:
        dist: dict[ClassId, int] = {}
        for c in self.entries.values():
            dist[c] = dist.get(c, 0) + 1
        return dist


def _parse_header(path: Path, line: str, required: Sequence[str]) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: header line is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise ValidationError(f"{path}: header must be a JSON object")
    for key in required:
        if key not in header:
            raise ValidationError(f"{path}: header is missing required key {key!r}")
    return header


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Load and validate an ``.embjsonl`` dump.

    A record whose vector length disagrees with the header dimension rejects
    the whole file; non-finite or zero-norm vectors reject only the record
    (counted in the load report); duplicate words keep the first occurrence.
    """
    path = Path(path)
    report = LoadReport()
    words: list[str] = []
    vectors: list[np.ndarray] = []
    labels: dict[str, ClassId] = {}
    seen: set[str] = set()

    with path.open("r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise ValidationError(f"{path}: empty file, expected header line")
        header = _parse_header(path, first, ("dim", "lang"))
        dim = int(header["dim"])
        lang = str(header["lang"])
        if dim < 1:
            raise ValidationError(f"{path}: header dim must be >= 1, got {dim}")

        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {lineno} is not valid JSON: {exc}") from exc
            vec = np.asarray(rec["vector"], dtype=np.float64)
            if vec.shape != (dim,):
                raise ValidationError(
                    f"{path}: line {lineno}: dimension mismatch "
                    f"(header dim={dim}, record has {vec.shape[0] if vec.ndim == 1 else vec.shape})"
                )
            word = normalize_word(str(rec["word"]))
            if not word:
                report.empty_word += 1
                log.warning("%s: line %d: empty word after normalization, record dropped", path, lineno)
                continue
            if not np.all(np.isfinite(vec)):
                report.nonfinite += 1
                log.warning("%s: line %d: non-finite component in %r, record dropped", path, lineno, word)
                continue
            if not np.any(vec):
                report.degenerate += 1
                log.warning("%s: line %d: zero vector for %r, record dropped", path, lineno, word)
                continue
            if word in seen:
                report.duplicates += 1
                continue
            seen.add(word)
            words.append(word)
            vectors.append(vec)
            if rec.get("label") is not None:
                labels[word] = rec["label"]

    report.kept = len(words)
    matrix = np.vstack(vectors) if vectors else np.empty((0, dim))
    return EmbeddingStore(words, matrix, lang, labels, report)


def save_embeddings(path: str | Path, store: EmbeddingStore) -> None:
    """Write a store back out as ``.embjsonl`` (floats round-trip exactly)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps({"dim": store.dim, "lang": store.lang, "count": len(store)}) + "\n")
        for entry in store:
            rec: dict = {"word": entry.word, "vector": [float(x) for x in entry.vector]}
            if entry.label is not None:
                rec["label"] = entry.label
            fh.write(dumps(rec) + "\n")


def load_paradigms(path: str | Path) -> LabeledParadigmSet:
    """Load a labeled paradigm file; duplicate words keep the first class seen."""
    path = Path(path)
    entries: dict[str, ClassId] = {}
    duplicates = 0
    with path.open("r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise ValidationError(f"{path}: empty file, expected header line")
        header = _parse_header(path, first, ("lang",))
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {lineno} is not valid JSON: {exc}") from exc
            word = normalize_word(str(rec["word"]))
            if not word:
                raise ValidationError(f"{path}: line {lineno}: empty word")
            if word in entries:
                duplicates += 1
                continue
            entries[word] = rec["class"]
    if not entries:
        raise ValidationError(f"{path}: paradigm set has no entries")
    return LabeledParadigmSet(entries, str(header["lang"]), duplicates)


def save_paradigms(path: str | Path, paradigms: LabeledParadigmSet) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps({"lang": paradigms.lang}) + "\n")
        for word, cls in paradigms.entries.items():
            fh.write(dumps({"word": word, "class": cls}) + "\n")


def cosine(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Cosine similarity dot(a,b)/(|a||b|), clamped to [-1, 1].

    Raises on zero vectors ("degenerate vector") and on dimension mismatch.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("degenerate vector: zero norm")
    sim = float(np.dot(a, b)) / (na * nb)
    return max(-1.0, min(1.0, sim))


@dataclass
class NearestResult:
    """Ranked ``(word, similarity)`` neighbors; ``short`` flags k > index size."""

    neighbors: list[tuple[str, float]]
    short: bool = False

    def __iter__(self):
        return iter(self.neighbors)

    def __len__(self) -> int:
        return len(self.neighbors)

    def __getitem__(self, i):
        return self.neighbors[i]


def nearest(
    query: Sequence[float] | np.ndarray,
    index: EmbeddingStore,
    k: int,
    *,
    exclude: frozenset[str] | set[str] = frozenset(),
) -> NearestResult:
    """Top-k index words by descending cosine similarity to ``query``.

    Ties break by ascending lexicographic word order, making the ranking
    deterministic. If k exceeds the (non-excluded) index size, all entries
    are returned and the result is flagged short.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if len(index) == 0:
        raise ValidationError("nearest: index is empty")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (index.dim,):
        raise ValidationError(f"query dimension {q.shape} does not match index dim {index.dim}")
    qnorm = float(np.linalg.norm(q))
    if qnorm == 0.0 or not math.isfinite(qnorm):
        raise ValidationError("degenerate vector: zero or non-finite query")

    sims = (index.matrix @ q) / (index._norms * qnorm)
    np.clip(sims, -1.0, 1.0, out=sims)
    # lexsort: primary key last -> sort by -similarity, ties by lexicographic rank
    order = np.lexsort((index._lex_rank, -sims))
    neighbors: list[tuple[str, float]] = []
    for row in order:
        word = index.words[row]
        if word in exclude:
            continue
        neighbors.append((word, float(sims[row])))
        if len(neighbors) == k:
            break
    short = len(neighbors) < k
    if short:
        log.warning("nearest: k=%d exceeds usable index size %d", k, len(neighbors))
    return NearestResult(neighbors, short)
