"""
Module harness : génération via un fournisseur (HTTP ou scripté), mesure du
respect du format JSON et comparaison de variantes
"""
from .provider import HttpChatProvider, MockProvider, ProviderConfig, ProviderReply, build_provider, resolve_pointer
from .scoring import (
    FormatFollowReport, OutputCheck, binary_format_following, check_output, extract_json,
    format_follow_report, graded_format_following,
)
from .experiment import (
    ComparisonReport, GenerationResult, InputSet, VariantResult, compare_patterns, generate,
    knowledge_length, length_bucket, load_bindings, populate, positioning_variants,
)
from .judge import ContentJudge

__all__ = [
    'HttpChatProvider', 'MockProvider', 'ProviderConfig', 'ProviderReply', 'build_provider', 'resolve_pointer',
    'FormatFollowReport', 'OutputCheck', 'binary_format_following', 'check_output', 'extract_json',
    'format_follow_report', 'graded_format_following',
    'ComparisonReport', 'GenerationResult', 'InputSet', 'VariantResult', 'compare_patterns', 'generate',
    'knowledge_length', 'length_bucket', 'load_bindings', 'populate', 'positioning_variants',
    'ContentJudge',
]
