"""
Module template : parsing des placeholders, rendu et tokenisation
"""
from .parser import (
    PLACEHOLDER_PATTERN, Placeholder, PlaceholderSyntax, PositionThird, PromptTemplate,
    RawPrompt, Span, is_template, parse_template, placeholder_position, render,
)
from .tokens import token_count, tokenize, word_tokens

__all__ = [
    'PLACEHOLDER_PATTERN', 'Placeholder', 'PlaceholderSyntax', 'PositionThird', 'PromptTemplate',
    'RawPrompt', 'Span', 'is_template', 'parse_template', 'placeholder_position', 'render',
    'token_count', 'tokenize', 'word_tokens',
]
