"""Word-list embedding export for byte-level encoders."""

__version__ = "0.1.0"

from .export import POOLING, ModelLoadError, embed_batch, export_embeddings, load_encoder

__all__ = [
    "POOLING",
    "ModelLoadError",
    "embed_batch",
    "export_embeddings",
    "load_encoder",
    "__version__",
]
