"""
Style des directives : instruction ou question
"""
import re
from enum import Enum
from typing import Optional

from ..config import Settings, default_settings

_FIRST_WORD = re.compile(r"[A-Za-z']+")


class DirectiveStyle(str, Enum):
    INSTRUCTION = "Instruction"
    QUESTION = "Question"


def classify_directive_style(directive_text: str, settings: Optional[Settings] = None) -> DirectiveStyle:
    """
    Question si le texte finit par '?' ou commence par un mot interrogatif

    Args:
        directive_text: Texte du span Directive
        settings: Réglages (liste taxonomy.question_words)
    """
    settings = settings or default_settings()
    text = directive_text.strip()
    if text.endswith('?'):
        return DirectiveStyle.QUESTION

    match = _FIRST_WORD.search(text)
    if match and match.group(0).lower() in set(settings.get('taxonomy.question_words', [])):
        return DirectiveStyle.QUESTION
    return DirectiveStyle.INSTRUCTION
