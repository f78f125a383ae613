"""Synthetic agglutinative lexicon pairs with planted noun classes and innovations.

Words are class-prefix + CV-syllable stem. A controllable fraction of stems is
shared between the two languages (cognates), and innovations rewrite a stated
fraction of one class's surface prefix (e.g. wa- to a-, modeling vowel
coalescence). Pseudo-embeddings are deterministic hash features of character
n-grams with positional down-weighting plus seeded Gaussian noise, so shared
prefixes and shared stems land nearby in cosine space without any neural model.

Same spec and seed produce byte-identical output files, which makes every
pipeline stage checkable against the plant manifest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import ClassId, ValidationError
from .prefixes import PrefixInventory
from .store import EmbeddingStore, LabeledParadigmSet, save_embeddings, save_paradigms

CONSONANTS = "bdfghjklmnprstvz"
VOWELS = "aeiou"

#: Per-position decay of n-gram feature weight, applied at the position of
#: the gram's last character. Word-initial patterns (the prefix) dominate the
#: vector, which is what lets clustering recover class structure; decaying by
#: the end position keeps prefix/stem boundary grams from drowning the signal.
POSITION_DECAY = 0.5

#: Relative weight per n-gram length. Bigrams carry most of the class signal
#: (the prefixes are mostly two characters); unigrams are damped so that
#: classes sharing an initial letter stay separable.
N_GRAM_WEIGHTS = {1: 0.5, 2: 2.0, 3: 1.0}

DEFAULT_EMBEDDING_DIM = 64


@dataclass(frozen=True)
class ClassSpec:
    noun_class: ClassId
    prefix: str
    weight: float = 1.0


@dataclass(frozen=True)
class Innovation:
    novel_prefix: str
    replaced_prefix: str
    rate: float


@dataclass
class SynthSpec:
    classes: list[ClassSpec]
    stems: int
    cognate_overlap: float
    innovations: list[Innovation] = field(default_factory=list)
    seed: int = 42
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    noise: float = 0.0
    source_lang: str = "syn-src"
    target_lang: str = "syn-tgt"

    def validate(self) -> None:
        if not self.classes:
            raise ValidationError("spec needs at least one class")
        prefixes = [c.prefix for c in self.classes]
        if len(set(prefixes)) != len(prefixes):
            raise ValidationError("class prefixes must be unique")
        if any(c.weight <= 0 for c in self.classes):
            raise ValidationError("class weights must be positive")
        if not 0.0 <= self.cognate_overlap <= 1.0:
            raise ValidationError("cognate_overlap must be in [0, 1]")
        if self.stems < 1:
            raise ValidationError("stems must be >= 1")
        if self.embedding_dim < 8:
            raise ValidationError("embedding_dim must be >= 8")
        if self.noise < 0:
            raise ValidationError("noise must be >= 0")
        for inn in self.innovations:
            if not 0.0 <= inn.rate <= 1.0:
                raise ValidationError(f"innovation rate {inn.rate} outside [0, 1]")
            if inn.replaced_prefix not in prefixes:
                raise ValidationError(
                    f"innovation replaces {inn.replaced_prefix!r}, which no class uses"
                )
            if inn.novel_prefix in prefixes:
                raise ValidationError(
                    f"novel prefix {inn.novel_prefix!r} collides with a class prefix"
                )

    def to_record(self) -> dict:
        return {
            "classes": [asdict(c) for c in self.classes],
            "stems": self.stems,
            "cognate_overlap": self.cognate_overlap,
            "innovations": [asdict(i) for i in self.innovations],
            "seed": self.seed,
            "embedding_dim": self.embedding_dim,
            "noise": self.noise,
            "source_lang": self.source_lang,
            "target_lang": self.target_lang,
        }


@dataclass
class SynthPair:
    source: EmbeddingStore
    target: EmbeddingStore
    gold: dict[str, ClassId]
    manifest: dict
    corpus_lines: list[str]

    def inventory(self) -> PrefixInventory:
        """The planted prefix inventory (source-language truth, no innovations)."""
        entries = {c["prefix"]: [c["noun_class"]] for c in self.manifest["spec"]["classes"]}
        provenance = {p: "planted" for p in entries}
        universe = frozenset(cs[0] for cs in entries.values()) | {"unknown"}
        return PrefixInventory(entries, provenance, universe)


_gram_directions: dict[tuple[str, int], np.ndarray] = {}


def _gram_direction(gram: str, dim: int) -> np.ndarray:
    """Fixed pseudo-random unit-scale direction for one n-gram.

    The gram's hash seeds a PCG64 draw of a Gaussian vector, so distinct grams
    get near-orthogonal directions (no hard index collisions) and the map is
    deterministic across runs and processes.
    """
    key = (gram, dim)
    if key not in _gram_directions:
        seed = int.from_bytes(hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "big")
        _gram_directions[key] = np.random.default_rng(seed).standard_normal(dim) / np.sqrt(dim)
    return _gram_directions[key]


def pseudo_embed(word: str, dim: int = DEFAULT_EMBEDDING_DIM) -> np.ndarray:
    """Deterministic hash-seeded n-gram embedding (n in {1,2,3}).

    Each character n-gram contributes along its fixed hash-derived direction,
    weighted by N_GRAM_WEIGHTS[n] * POSITION_DECAY**(end position). Words
    sharing prefixes or stems therefore land nearby in cosine space.
    """
    vec = np.zeros(dim)
    for n in (1, 2, 3):
        w_n = N_GRAM_WEIGHTS[n]
        for p in range(len(word) - n + 1):
            vec += w_n * POSITION_DECAY ** (p + n - 1) * _gram_direction(word[p : p + n], dim)
    return vec


def _draw_stem(rng: np.random.Generator) -> str:
    syllables = int(rng.integers(2, 4))  # 2 or 3 CV syllables
    parts = []
    for _ in range(syllables):
        parts.append(CONSONANTS[int(rng.integers(len(CONSONANTS)))])
        parts.append(VOWELS[int(rng.integers(len(VOWELS)))])
    return "".join(parts)


def _draw_unique_stems(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    stems: list[str] = []
    while len(stems) < count:
        stem = _draw_stem(rng)
        if stem in taken:
            continue
        taken.add(stem)
        stems.append(stem)
    return stems


def generate_pair(spec: SynthSpec) -> SynthPair:
    """Generate a (labeled source, unlabeled target, gold labels) triple.

    Every random draw comes from one PCG64 generator seeded with spec.seed,
    in a fixed order, so the full output is a pure function of the spec.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    classes = spec.classes
    weights = np.array([c.weight for c in classes], dtype=np.float64)
    weights /= weights.sum()
    prefix_of = {c.noun_class: c.prefix for c in classes}

    taken: set[str] = set()
    source_stems = _draw_unique_stems(rng, spec.stems, taken)
    source_class_idx = rng.choice(len(classes), size=spec.stems, p=weights)
    source_entries = [
        {"word": prefix_of[classes[int(ci)].noun_class] + stem,
         "class": classes[int(ci)].noun_class,
         "stem": stem}
        for stem, ci in zip(source_stems, source_class_idx)
    ]

    n_cognate = int(round(spec.cognate_overlap * spec.stems))
    cognate_rows = rng.choice(spec.stems, size=n_cognate, replace=False)
    fresh_stems = _draw_unique_stems(rng, spec.stems - n_cognate, taken)
    fresh_class_idx = rng.choice(len(classes), size=len(fresh_stems), p=weights)

    target_entries: list[dict] = []
    for row in cognate_rows:
        src = source_entries[int(row)]
        target_entries.append(
            {"word": src["word"], "class": src["class"], "stem": src["stem"],
             "cognate": True, "rewritten": False, "base_prefix": prefix_of[src["class"]]}
        )
    for stem, ci in zip(fresh_stems, fresh_class_idx):
        cls = classes[int(ci)].noun_class
        target_entries.append(
            {"word": prefix_of[cls] + stem, "class": cls, "stem": stem,
             "cognate": False, "rewritten": False, "base_prefix": prefix_of[cls]}
        )

    innovation_log: list[dict] = []
    for inn in spec.innovations:
        rewritten: list[str] = []
        for entry in target_entries:
            if entry["base_prefix"] != inn.replaced_prefix or entry["rewritten"]:
                continue
            if rng.random() < inn.rate:
                entry["word"] = inn.novel_prefix + entry["stem"]
                entry["rewritten"] = True
                entry["surface_prefix"] = inn.novel_prefix
                rewritten.append(entry["word"])
        innovation_log.append(
            {"novel": inn.novel_prefix, "replaced": inn.replaced_prefix,
             "rate": inn.rate, "rewritten_words": rewritten}
        )
    for entry in target_entries:
        entry.setdefault("surface_prefix", entry["base_prefix"])

    # Surface collisions (fresh stem recreating a cognate word, or a rewrite
    # landing on an existing surface) would break store uniqueness; drop later
    # duplicates deterministically.
    seen_words: set[str] = set()
    deduped: list[dict] = []
    for entry in target_entries:
        if entry["word"] in seen_words:
            continue
        seen_words.add(entry["word"])
        deduped.append(entry)
    target_entries = deduped

    def build_store(entries: Sequence[dict], lang: str, labeled: bool) -> EmbeddingStore:
        words = [e["word"] for e in entries]
        matrix = np.vstack([pseudo_embed(w, spec.embedding_dim) for w in words])
        if spec.noise > 0:
            matrix = matrix + rng.normal(0.0, spec.noise, size=matrix.shape)
        labels = {e["word"]: e["class"] for e in entries} if labeled else None
        return EmbeddingStore(words, matrix, lang, labels)

    source_store = build_store(source_entries, spec.source_lang, labeled=True)
    target_store = build_store(target_entries, spec.target_lang, labeled=False)
    gold = {e["word"]: e["class"] for e in target_entries}

    # Corpus: every target word at least twice, shuffled into 8-token lines.
    tokens = [e["word"] for e in target_entries] * 2
    order = rng.permutation(len(tokens))
    shuffled = [tokens[int(i)] for i in order]
    corpus_lines = [" ".join(shuffled[i : i + 8]) for i in range(0, len(shuffled), 8)]

    class_counts: dict = {}
    for e in target_entries:
        key = e["class"]
        class_counts[key] = class_counts.get(key, 0) + 1
    manifest = {
        "spec": spec.to_record(),
        "source": source_entries,
        "target": target_entries,
        "innovations": innovation_log,
        "counts": {
            "source_words": len(source_entries),
            "target_words": len(target_entries),
            "cognates": sum(1 for e in target_entries if e["cognate"]),
            "rewritten": sum(1 for e in target_entries if e["rewritten"]),
            "target_class_counts": [[c, n] for c, n in sorted(class_counts.items(), key=str)],
        },
    }
    return SynthPair(source_store, target_store, gold, manifest, corpus_lines)


def write_pair(pair: SynthPair, outdir: str | Path) -> dict[str, Path]:
    """Write all pair files into a directory; returns name -> path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "source": outdir / "source.embjsonl",
        "target": outdir / "target.embjsonl",
        "paradigms": outdir / "source_paradigms.jsonl",
        "gold": outdir / "target_gold.jsonl",
        "corpus": outdir / "corpus.txt",
        "inventory": outdir / "inventory.jsonl",
        "manifest": outdir / "manifest.json",
    }
    save_embeddings(paths["source"], pair.source)
    save_embeddings(paths["target"], pair.target)
    save_paradigms(
        paths["paradigms"],
        LabeledParadigmSet(dict(pair.source.labels), pair.source.lang),
    )
    save_paradigms(paths["gold"], LabeledParadigmSet(dict(pair.gold), pair.target.lang))
    paths["corpus"].write_text("\n".join(pair.corpus_lines) + "\n", encoding="utf-8")
    pair.inventory().save(paths["inventory"])
    paths["manifest"].write_text(
        json.dumps(pair.manifest, sort_keys=True, ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )
    return paths


_TWELVE_CLASSES = [
    ClassSpec(1, "mu"), ClassSpec(2, "wa"), ClassSpec(4, "mi"), ClassSpec(5, "ji"),
    ClassSpec(6, "ma"), ClassSpec(7, "ki"), ClassSpec(8, "vi"), ClassSpec(9, "ny"),
    ClassSpec(11, "lu"), ClassSpec(14, "bu"), ClassSpec(15, "ku"), ClassSpec(16, "pa"),
]


def preset(name: str, seed: int | None = None) -> SynthSpec:
    """Named generation presets used by tests, demos, and the CLI."""
    specs = {
        # 12 classes, 60% vocabulary overlap, low noise.
        "overlap60": SynthSpec(
            classes=list(_TWELVE_CLASSES),
            stems=3000,
            cognate_overlap=0.6,
            noise=0.02,
        ),
        # overlap60 plus a planted wa->a coalescence over a boosted class 2
        # (weight tuned so roughly 300 class-2 words land in the target).
        "innovation": SynthSpec(
            classes=[ClassSpec(2, "wa", 1.35) if c.noun_class == 2 else c
                     for c in _TWELVE_CLASSES],
            stems=3000,
            cognate_overlap=0.6,
            noise=0.02,
            innovations=[Innovation("a", "wa", 0.5)],
        ),
        # Small and fast, for demos and smoke tests.
        "tiny": SynthSpec(
            classes=[ClassSpec(1, "mu"), ClassSpec(2, "wa"), ClassSpec(6, "ma"),
                     ClassSpec(7, "ki"), ClassSpec(8, "vi"), ClassSpec(15, "ku")],
            stems=240,
            cognate_overlap=0.7,
            noise=0.01,
        ),
    }
    if name not in specs:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(specs)}")
    spec = specs[name]
    if seed is not None:
        spec.seed = seed
    return spec


PRESET_NAMES = ("overlap60", "innovation", "tiny")


def load_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
