"""Noun-class discovery toolkit for low-resource Bantu languages.

Combines K-nearest-neighbor transfer from a labeled related language,
clustering with prefix-pattern analysis, and weighted ensemble voting,
all over precomputed word embeddings.
"""

__version__ = "0.1.0"

from .core import UNKNOWN_CLASS, ClassId, Prediction, ValidationError, class_key
from .store import (
    EmbeddingStore,
    LabeledParadigmSet,
    NearestResult,
    WordEmbedding,
    cosine,
    load_embeddings,
    load_paradigms,
    nearest,
    normalize_word,
    save_embeddings,
    save_paradigms,
)

__all__ = [
    "UNKNOWN_CLASS",
    "ClassId",
    "Prediction",
    "ValidationError",
    "class_key",
    "EmbeddingStore",
    "LabeledParadigmSet",
    "NearestResult",
    "WordEmbedding",
    "cosine",
    "load_embeddings",
    "load_paradigms",
    "nearest",
    "normalize_word",
    "save_embeddings",
    "save_paradigms",
    "__version__",
]
