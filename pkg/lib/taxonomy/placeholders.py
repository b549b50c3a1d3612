"""
Typage des placeholders d'après leur nom puis leur contexte immédiat
"""
import re
from enum import Enum
from typing import List, Optional

from ..config import Settings, default_settings

_CAMEL = re.compile(r"([a-z0-9])([A-Z])")

# Ordre d'évaluation du dictionnaire de mots-clés
_KEYWORD_ORDER = ("UserQuestion", "ContextualInformation", "KnowledgeInput", "MetadataShortPhrase")


class PlaceholderType(str, Enum):
    USER_QUESTION = "UserQuestion"
    CONTEXTUAL_INFORMATION = "ContextualInformation"
    KNOWLEDGE_INPUT = "KnowledgeInput"
    METADATA_SHORT_PHRASE = "MetadataShortPhrase"
    OTHER = "Other"


def name_parts(name: str) -> List[str]:
    """
    Découpe un nom de placeholder en mots

    "chat_history" -> ["chat", "history", "chathistory"], "userName" -> ["user", "name", "username"]
    """
    snake = _CAMEL.sub(r"\1_\2", name).lower()
    parts = [p for p in re.split(r"[_\d]+", snake) if p]
    joined = ''.join(parts)
    if joined and joined not in parts:
        parts.append(joined)
    # singulier naïf
    parts += [p[:-1] for p in parts if len(p) > 3 and p.endswith('s') and p[:-1] not in parts]
    return parts


def classify_placeholder(name: str, context_window: str = "",
                         settings: Optional[Settings] = None) -> PlaceholderType:
    """
    Type d'un placeholder

    Args:
        name: Nom issu du parser
        context_window: Texte autour du placeholder
        settings: Réglages (taxonomy.placeholder_keywords / placeholder_context_cues)

    Returns:
        PlaceholderType
    """
    settings = settings or default_settings()
    keywords = settings.get('taxonomy.placeholder_keywords', {})
    parts = name_parts(name)
    for type_name in _KEYWORD_ORDER:
        if any(part in keywords.get(type_name, []) for part in parts):
            return PlaceholderType(type_name)

    window = context_window.lower()
    for type_name, cues in settings.get('taxonomy.placeholder_context_cues', {}).items():
        if any(cue in window for cue in cues):
            return PlaceholderType(type_name)
    return PlaceholderType.OTHER
