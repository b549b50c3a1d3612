"""
Typage des contraintes et sous-catégories d'exclusion
"""
import re
from enum import Enum
from typing import Optional

from ..config import Settings, default_settings


class ConstraintType(str, Enum):
    EXCLUSION = "Exclusion"
    INCLUSION = "Inclusion"
    WORD_COUNT = "WordCount"
    OTHER = "Other"


class ExclusionSubcategory(str, Enum):
    OUTPUT_CONTROL = "OutputControl"
    REDUNDANCY_CONTEXT_ADHERENCE = "RedundancyContextAdherence"
    ACCURACY_RELEVANCE = "AccuracyRelevance"
    CLARITY_ABOUT_UNKNOWNS = "ClarityAboutUnknowns"
    TECHNICAL_RESTRICTION = "TechnicalRestriction"


# Exclusion avant longueur, longueur avant inclusion
_CHECK_ORDER = (ConstraintType.EXCLUSION, ConstraintType.WORD_COUNT, ConstraintType.INCLUSION)


def classify_constraint(sentence: str, settings: Optional[Settings] = None) -> ConstraintType:
    """Type d'une phrase de contrainte"""
    settings = settings or default_settings()
    cues = settings.get('taxonomy.constraint_cues', {})
    text = sentence.replace('’', "'").lower()
    for constraint_type in _CHECK_ORDER:
        pattern = cues.get(constraint_type.value)
        if pattern and re.search(pattern, text):
            return constraint_type
    return ConstraintType.OTHER
