"""Text cleanup and the tokenizer contract shared with the pipeline.

Cleanup happens on the raw string, in three independent switchable steps:
user mentions, links, then emoji. Tokenization afterwards must produce
exactly what the pipeline's own tokenizer would produce on the same text;
the downstream corpus loader re-tokenizes the text column and refuses
embeddings whose token stream disagrees, so this is a hard contract, not
a convention.
"""

from __future__ import annotations

import re
import unicodedata

# Token-anchored, so "@user" goes but "mail@host.com" stays.
_MENTION = re.compile(r"(?<!\S)@\w+")
_LINK = re.compile(r"(?<!\S)(?:https?://\S+|www\.\S+)")

# Blocks that hold emoji and their modifiers; category So catches strays
# (dingbats rendered as emoji, enclosed alphanumerics) outside the blocks.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # mahjong tiles through symbols-extended
    (0x2600, 0x27BF),    # misc symbols and dingbats
    (0x2B00, 0x2BFF),    # stars, heavy arrows
    (0xFE00, 0xFE0F),    # variation selectors
    (0x200D, 0x200D),    # zero-width joiner
)


def _is_emoji(ch: str) -> bool:
    code = ord(ch)
    if any(lo <= code <= hi for lo, hi in _EMOJI_RANGES):
        return True
    return unicodedata.category(ch) == "So"


def clean_text(
    text: str,
    *,
    strip_mentions: bool = True,
    strip_links: bool = True,
    strip_emoji: bool = True,
) -> str:
    if strip_links:
        text = _LINK.sub(" ", text)
    if strip_mentions:
        text = _MENTION.sub(" ", text)
    if strip_emoji:
        text = "".join(" " if _is_emoji(ch) else ch for ch in text)
    return " ".join(text.split())


def tokenize(text: str) -> list[str]:
    """Split ``text`` into normalized tokens.

    Lowercase, split on whitespace, strip leading and trailing
    non-alphanumeric characters from each piece, drop empty results.
    Interior punctuation survives. Matches the pipeline tokenizer
    character for character.
    """
    out: list[str] = []
    for piece in text.lower().split():
        start, end = 0, len(piece)
        while start < end and not piece[start].isalnum():
            start += 1
        while end > start and not piece[end - 1].isalnum():
            end -= 1
        if end > start:
            out.append(piece[start:end])
    return out
