import pytest
import torch


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly-initialized byte-level encoder saved to disk.

    Stands in for the real pretrained checkpoint so the suite runs hermetic;
    everything under test (pooling, batching, format) is model-agnostic.
    """
    from transformers import ByT5Tokenizer, T5Config, T5EncoderModel

    out = tmp_path_factory.mktemp("tiny-byte-encoder")
    config = T5Config(
        vocab_size=384,
        d_model=32,
        d_ff=64,
        d_kv=16,
        num_layers=2,
        num_heads=2,
        tie_word_embeddings=False,
    )
    torch.manual_seed(1234)
    model = T5EncoderModel(config).eval()
    tokenizer = ByT5Tokenizer()
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


@pytest.fixture()
def words_file(tmp_path):
    path = tmp_path / "words.txt"
    words = ["watu", "kitu", "akimbola", "k'ululu", "maembe", "a", "wazuri", "mukala"]
    path.write_text("".join(w + "\n" for w in words), encoding="utf-8")
    return path
