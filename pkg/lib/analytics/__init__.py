"""
Module analytics : statistiques de corpus et rapport
"""
from .stats import (
    JSON_PATTERNS, CooccurrenceMatrix, Distribution, ExclusionClusters, PlaceholderStats, TransitionMatrix,
    ambiguous_span_count, canonical_order, component_frequency, constraint_type_distribution, cooccurrence_matrix,
    directive_style_distribution, exclusion_clusters, json_pattern_distribution, placeholder_component_distribution,
    placeholder_stats, start_position_counts, start_position_frequency, term_frequencies, transition_matrix,
)
from .report import (
    SCHEMA_VERSION, CorpusReport, analyze_corpus, build_report, dumps, render_markdown,
    report_document, write_report,
)

__all__ = [
    'JSON_PATTERNS', 'CooccurrenceMatrix', 'Distribution', 'ExclusionClusters', 'PlaceholderStats', 'TransitionMatrix',
    'ambiguous_span_count', 'canonical_order', 'component_frequency', 'constraint_type_distribution',
    'cooccurrence_matrix', 'directive_style_distribution', 'exclusion_clusters', 'json_pattern_distribution',
    'placeholder_component_distribution', 'placeholder_stats', 'start_position_counts',
    'start_position_frequency', 'term_frequencies', 'transition_matrix',
    'SCHEMA_VERSION', 'CorpusReport', 'analyze_corpus', 'build_report', 'dumps', 'render_markdown',
    'report_document', 'write_report',
]
