"""Unicode tokenization safe for Persian (Arabic-script) text.

Tokens are maximal runs of letters, combining marks, and digits. The
zero-width non-joiner (U+200C) joins Persian morphemes inside one word, so
it is treated as a word character and then stripped from token edges.
Punctuation and symbols separate tokens. Only Latin-range characters are
lowercased; Arabic script has no case and is left untouched.
"""

from __future__ import annotations

import unicodedata

ZWNJ = "‌"
_LATIN_LIMIT = 0x250  # Basic Latin through Latin Extended-B


def _is_word_char(ch: str) -> bool:
    if ch == ZWNJ:
        return True
    return unicodedata.category(ch)[0] in ("L", "M", "N")


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    current: list[str] = []
    for ch in text:
        if _is_word_char(ch):
            if ord(ch) < _LATIN_LIMIT:
                ch = ch.lower()
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return [t for t in (tok.strip(ZWNJ) for tok in tokens) if t]
