"""
Rendu des diagnostics : texte (une ligne par diagnostic) ou JSON
"""
import json
import os
from typing import Dict, List, Optional, TextIO

from ..template import PromptTemplate
from .engine import LintDiagnostic
from .rules import Severity

# Codes ANSI par sévérité
COLORS = {
    Severity.ERROR: '\033[31m',
    Severity.WARNING: '\033[33m',
    Severity.INFO: '\033[36m',
}
RESET = '\033[0m'


def use_color(stream: Optional[TextIO]) -> bool:
    """Couleur seulement sur un terminal et si NO_COLOR est absent"""
    if os.getenv('NO_COLOR'):
        return False
    isatty = getattr(stream, 'isatty', None)
    return bool(isatty and isatty())


def format_diagnostic(path: str, template: PromptTemplate, diagnostic: LintDiagnostic, color: bool = False) -> str:
    """path:line:col: severity RID message [suggestion]"""
    line, column = diagnostic.location(template)
    severity = diagnostic.severity.value
    if color:
        severity = f"{COLORS[diagnostic.severity]}{severity}{RESET}"
    text = f"{path}:{line}:{column}: {severity} {diagnostic.rule_id} {diagnostic.message}"
    if diagnostic.suggestion:
        text += f" [{diagnostic.suggestion}]"
    return text


def format_text(path: str, template: PromptTemplate, diagnostics: List[LintDiagnostic], color: bool = False) -> str:
    return ''.join(format_diagnostic(path, template, d, color) + '\n' for d in diagnostics)


def diagnostics_document(results: List[Dict]) -> Dict:
    """
    Document JSON du lint

    Args:
        results: [{'path', 'template', 'diagnostics'}, ...] dans l'ordre des fichiers
    """
    files = []
    for result in results:
        files.append({
            'path': result['path'],
            'diagnostics': [d.to_dict(result['template']) for d in result['diagnostics']],
        })
    summary = {s.value: 0 for s in Severity}
    for result in results:
        for d in result['diagnostics']:
            summary[d.severity.value] += 1
    return {'files': files, 'summary': summary}


def format_json(results: List[Dict]) -> str:
    return json.dumps(diagnostics_document(results), indent=2, ensure_ascii=False) + '\n'
