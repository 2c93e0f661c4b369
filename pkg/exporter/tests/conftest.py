from __future__ import annotations

import os

os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

import pytest
import torch
import transformers
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import BertConfig, BertModel, BertTokenizerFast

transformers.logging.set_verbosity_error()

# Wordpieces cover every test corpus; "jewish" and "rabbi" split into two
# pieces so subword pooling has real work to do.
VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "hello", "women", "girls", "she", "her", "good", "day", "nice",
    "the", "a", "so", "happy", "love", "talk", "about",
    "muslim", "islam", "jew", "##ish", "##s", "rab", "##bi",
]


def _build_tokenizer() -> BertTokenizerFast:
    table = {w: i for i, w in enumerate(VOCAB)}
    core = Tokenizer(models.WordPiece(vocab=table, unk_token="[UNK]"))
    core.normalizer = normalizers.BertNormalizer(lowercase=True)
    core.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    core.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", table["[CLS]"]), ("[SEP]", table["[SEP]"])],
    )
    return BertTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory) -> str:
    """A two-layer, 16-wide encoder with fixed random weights."""
    path = tmp_path_factory.mktemp("checkpoint")
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=96,
    )
    torch.manual_seed(7)
    model = BertModel(config)
    model.save_pretrained(path)
    _build_tokenizer().save_pretrained(path)
    return str(path)


def write_corpus(path, rows: list[tuple[str, str, str]]) -> None:
    path.write_text(
        "".join(f"{i}\t{label}\t{text}\n" for i, label, text in rows), encoding="utf-8"
    )
