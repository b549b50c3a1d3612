"""
Module taxonomy : style des directives, types de placeholders et de contraintes,
sous-catégories d'exclusion, motifs JSON
"""
from .directive import DirectiveStyle, classify_directive_style
from .placeholders import PlaceholderType, classify_placeholder, name_parts
from .constraints import ConstraintType, ExclusionSubcategory, classify_constraint
from .clustering import ClusterResult, cluster_exclusions, purity
from .json_patterns import (
    ExpectedJsonSchema, JsonFormatPattern, detect_json_pattern, extract_schema, is_json_declared,
)

__all__ = [
    'DirectiveStyle', 'classify_directive_style',
    'PlaceholderType', 'classify_placeholder', 'name_parts',
    'ConstraintType', 'ExclusionSubcategory', 'classify_constraint',
    'ClusterResult', 'cluster_exclusions', 'purity',
    'ExpectedJsonSchema', 'JsonFormatPattern', 'detect_json_pattern', 'extract_schema', 'is_json_declared',
]
