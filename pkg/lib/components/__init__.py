"""
Module components : segmentation en composants, libellés et évaluation
"""
from .segmenter import (
    KINDS, LABELED_KINDS, ComponentKind, ComponentSpan, Segmenter, Sentence,
    component_order, component_presence, get_segmenter, segment, split_sentences,
)
from .scoring import GoldLabeling, MatchScores, canonicalize_label, load_gold, score_against_gold
from .llm_labeler import SEGMENTER_BACKENDS, LLMLabeler, build_segmenter

__all__ = [
    'KINDS', 'LABELED_KINDS', 'ComponentKind', 'ComponentSpan', 'Segmenter', 'Sentence',
    'component_order', 'component_presence', 'get_segmenter', 'segment', 'split_sentences',
    'GoldLabeling', 'MatchScores', 'canonicalize_label', 'load_gold', 'score_against_gold',
    'SEGMENTER_BACKENDS', 'LLMLabeler', 'build_segmenter',
]
