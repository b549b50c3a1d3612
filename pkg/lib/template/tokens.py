"""
Tokenisation par frontières de mots Unicode (UAX-29)
"""
from typing import List

import regex

_WORD_BOUNDARY = regex.compile(r"\b", flags=regex.WORD | regex.V1)


def _pieces(text: str) -> List[str]:
    cuts = sorted({0, len(text), *(m.start() for m in _WORD_BOUNDARY.finditer(text))})
    return [text[a:b] for a, b in zip(cuts, cuts[1:])]


def tokenize(text: str) -> List[str]:
    """Segments entre frontières de mots contenant au moins une lettre ou un chiffre"""
    if not text:
        return []
    return [piece for piece in _pieces(text) if any(c.isalnum() for c in piece)]


def token_count(text: str) -> int:
    return len(tokenize(text))


def word_tokens(text: str) -> List[str]:
    """Tokens en minuscules, pour les tables de fréquences et le TF-IDF"""
    return [t.lower() for t in tokenize(text)]
