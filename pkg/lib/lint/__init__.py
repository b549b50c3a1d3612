"""
Module lint : règles R1 à R8, moteur, corrections automatiques et rendu
"""
from .rules import RULES, Hit, LintRule, Severity, explain_rule, has_output_exclusion, knowledge_input_conflict
from .engine import LintDiagnostic, exceeds, lint, lint_template, max_severity, rule_settings
from .fixes import apply_fixes, insert_exclusion, rewrite_placeholder_first
from .output import diagnostics_document, format_diagnostic, format_json, format_text, use_color

__all__ = [
    'RULES', 'Hit', 'LintRule', 'Severity', 'explain_rule', 'has_output_exclusion', 'knowledge_input_conflict',
    'LintDiagnostic', 'exceeds', 'lint', 'lint_template', 'max_severity', 'rule_settings',
    'apply_fixes', 'insert_exclusion', 'rewrite_placeholder_first',
    'diagnostics_document', 'format_diagnostic', 'format_json', 'format_text', 'use_color',
]
