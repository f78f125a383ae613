"""Batch word-embedding export from a byte/character-level encoder.

Each word's vector is the mean of the encoder's final-layer hidden states over
the word's own byte positions; padding and special tokens (EOS, sentinels) are
excluded from the pool, and that choice is recorded in the dump header.

Output is the line-delimited ``.embjsonl`` format: a header object
``{"dim", "lang", "count", ...}`` followed by one ``{"word", "vector"}``
record per input word. Floats are printed with 9 significant digits.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import torch

log = logging.getLogger(__name__)

POOLING = "mean over the word's byte positions, excluding padding and special tokens"


class ModelLoadError(RuntimeError):
    """The encoder or tokenizer could not be loaded."""


def load_encoder(model_id: str, device: str = "cpu"):
    """Load tokenizer and encoder in deterministic evaluation mode."""
    from transformers import AutoTokenizer, T5EncoderModel

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = T5EncoderModel.from_pretrained(model_id)
    except Exception as exc:  # transformers raises a zoo of types here
        raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
    model.eval()
    model.to(device)
    return tokenizer, model


def embed_batch(
    words: Sequence[str],
    tokenizer,
    model,
    device: str = "cpu",
) -> torch.Tensor:
    """Mean-pooled final-layer states for one batch of words."""
    enc = tokenizer(list(words), padding=True, return_tensors="pt").to(device)
    with torch.no_grad():
        hidden = model(
            input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]
        ).last_hidden_state

    keep = enc["attention_mask"].bool()
    for special_id in tokenizer.all_special_ids:
        keep &= enc["input_ids"] != special_id
    counts = keep.sum(dim=1).clamp(min=1)
    pooled = (hidden * keep.unsqueeze(-1)).sum(dim=1) / counts.unsqueeze(-1)
    return pooled.cpu()


def iter_batches(words: Sequence[str], batch_size: int) -> Iterable[Sequence[str]]:
    for start in range(0, len(words), batch_size):
        yield words[start : start + batch_size]


def read_word_list(path: str | Path) -> list[str]:
    words = [w.strip() for w in Path(path).read_text(encoding="utf-8").splitlines()]
    return [w for w in words if w]


def format_vector(vector) -> str:
    """JSON array literal with 9 significant digits per component."""
    return "[" + ",".join(format(float(v), ".9g") for v in vector) + "]"


def export_embeddings(
    words_file: str | Path,
    model_id: str,
    output_path: str | Path,
    batch_size: int = 32,
    device: str = "cpu",
    lang: str = "und",
) -> dict:
    """Run the encoder over a word list and write an ``.embjsonl`` dump.

    Returns a small summary dict (count, dim). Deterministic for a fixed
    model: evaluation mode, no dropout, no sampling.
    """
    words = read_word_list(words_file)
    tokenizer, model = load_encoder(model_id, device)
    dim = int(model.config.d_model)

    output_path = Path(output_path)
    import json

    header = {
        "dim": dim,
        "lang": lang,
        "count": len(words),
        "model": str(model_id),
        "pooling": POOLING,
    }
    with output_path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True, ensure_ascii=False) + "\n")
        done = 0
        for batch in iter_batches(words, batch_size):
            vectors = embed_batch(batch, tokenizer, model, device)
            if not torch.isfinite(vectors).all():
                raise ValueError("encoder produced non-finite components")
            for word, vec in zip(batch, vectors):
                word_json = json.dumps(word, ensure_ascii=False)
                fh.write(f'{{"word":{word_json},"vector":{format_vector(vec)}}}\n')
            done += len(batch)
            log.info("embedded %d/%d words", done, len(words))

    return {"count": len(words), "dim": dim, "output": str(output_path)}
