"""
Moteur de lint : évalue les règles actives sur un AnalysisBundle
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..bundle import AnalysisBundle, analyze
from ..config import Settings, default_settings
from ..errors import UnknownRule
from ..template import PromptTemplate, Span
from .rules import RULES, Severity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LintDiagnostic:
    rule_id: str
    severity: Severity
    span: Optional[Span]
    message: str
    suggestion: Optional[str] = None

    def location(self, template: PromptTemplate) -> Tuple[int, int]:
        """(ligne, colonne) 1-based ; (1, 1) pour un diagnostic global"""
        if self.span is None:
            return 1, 1
        return template.line_col(self.span.start)

    def to_dict(self, template: Optional[PromptTemplate] = None) -> Dict:
        result = {
            'rule': self.rule_id,
            'severity': self.severity.value,
            'span': {'start': self.span.start, 'end': self.span.end} if self.span else None,
            'message': self.message,
            'suggestion': self.suggestion,
        }
        if template is not None:
            result['line'], result['column'] = self.location(template)
        return result


def _sort_key(diagnostic: LintDiagnostic):
    start = diagnostic.span.start if diagnostic.span else -1
    return diagnostic.severity.rank, start, diagnostic.rule_id


def rule_settings(settings: Settings) -> Dict[str, Tuple[bool, Severity]]:
    """(activée, sévérité) de chaque règle, défauts du catalogue si absente"""
    configured = settings.get('lint.rules', {}) or {}
    unknown = sorted(set(configured) - set(RULES))
    if unknown:
        raise UnknownRule(f"unknown rule(s) in configuration: {', '.join(unknown)}")
    resolved = {}
    for rule_id, rule in RULES.items():
        entry = configured.get(rule_id, {})
        severity = Severity.parse(entry['severity']) if 'severity' in entry else rule.severity
        resolved[rule_id] = (entry.get('enabled', True), severity)
    return resolved


def lint(bundle: AnalysisBundle, settings: Optional[Settings] = None) -> List[LintDiagnostic]:
    """
    Applique les règles actives à un bundle

    Args:
        bundle: Bundle complet (IncompleteBundle sinon)
        settings: Réglages (section lint)

    Returns:
        Diagnostics triés par sévérité, position puis identifiant de règle
    """
    settings = settings or default_settings()
    bundle.validate()

    diagnostics = []
    for rule_id, (enabled, severity) in rule_settings(settings).items():
        if not enabled:
            continue
        for hit in RULES[rule_id].check(bundle, settings):
            diagnostics.append(LintDiagnostic(rule_id, severity, hit.span, hit.message, hit.suggestion))

    diagnostics.sort(key=_sort_key)
    if diagnostics:
        logger.debug(f"🔍 {bundle.template.id or '<template>'}: {len(diagnostics)} diagnostic(s)")
    return diagnostics


def lint_template(template: PromptTemplate, settings: Optional[Settings] = None) -> List[LintDiagnostic]:
    """Analyse puis lint d'un template parsé"""
    return lint(analyze(template, settings), settings)


def max_severity(diagnostics: List[LintDiagnostic]) -> Optional[Severity]:
    if not diagnostics:
        return None
    return min((d.severity for d in diagnostics), key=lambda s: s.rank)


def exceeds(diagnostics: List[LintDiagnostic], fail_level: Severity) -> bool:
    """Vrai si un diagnostic atteint le seuil d'échec"""
    return any(d.severity.rank <= fail_level.rank for d in diagnostics)
