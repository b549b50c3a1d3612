"""
Corrections automatiques de R4 (knowledge input avant la directive) et de R3
(contrainte d'exclusion pour la sortie JSON)

R4 est appliqué en premier, le template est ré-analysé, puis R3.
"""
import logging
import re
import warnings
from typing import List, Optional

from ..bundle import AnalysisBundle, analyze
from ..components import ComponentKind, Sentence
from ..config import Settings, default_settings
from ..errors import ConflictingFixesWarning
from ..taxonomy import JsonFormatPattern, PlaceholderType
from ..template import PromptTemplate, Span, parse_template
from .engine import LintDiagnostic
from .rules import has_output_exclusion, knowledge_input_conflict

logger = logging.getLogger(__name__)

_MOVABLE = (ComponentKind.DIRECTIVE, ComponentKind.CONSTRAINTS, ComponentKind.OUTPUT_FORMAT_STYLE)


def _line_bounds(data: bytes, span: Span):
    line_start = data.rfind(b'\n', 0, span.start) + 1
    line_end = data.find(b'\n', span.end)
    return line_start, (len(data) if line_end == -1 else line_end)


def _remove(data: bytes, span: Span) -> bytes:
    """Retire un span ; la ligne entière part si elle ne contient que lui"""
    line_start, line_end = _line_bounds(data, span)
    if not data[line_start:span.start].strip() and not data[span.end:line_end].strip():
        return data[:line_start] + data[line_end + 1:]
    end = span.end + 1 if data[span.end:span.end + 1] == b' ' else span.end
    return data[:span.start] + data[end:]


def _moved_sentences(bundle: AnalysisBundle) -> List[Sentence]:
    """Phrases Directive, Constraints ou OutputFormatStyle commençant avant le knowledge input"""
    conflict = knowledge_input_conflict(bundle)
    if conflict is None:
        return []
    knowledge, _ = conflict
    return sorted(
        (s for kind in _MOVABLE for s in bundle.sentences_of(kind) if s.span.start < knowledge.span.start),
        key=lambda s: s.span.start,
    )


def _without_placeholder(sentence: str, raw: str) -> str:
    """Phrase privée du placeholder qu'elle contenait, ponctuation recollée"""
    text = re.sub(r"\s+", " ", sentence.replace(raw, ' ', 1)).strip()
    text = re.sub(r"\s+([.,;:!?])", r"\1", text).rstrip(' :,;')
    if text and text[-1] not in '.!?':
        text += '.'
    return text


def rewrite_placeholder_first(bundle: AnalysisBundle) -> str:
    """
    Déplace directive, contraintes et format situés avant le knowledge input

    Le bloc déplacé est réinséré juste avant la ligne de la première question
    utilisateur qui suit le knowledge input, sinon après la ligne de celui-ci.
    Une phrase qui contient le knowledge input lui laisse sa place et seul le
    reste de la phrase est déplacé. Renvoie le texte inchangé si R4 ne
    s'applique pas.
    """
    template = bundle.template
    moved = _moved_sentences(bundle)
    if not moved:
        return template.text

    first_knowledge, _ = knowledge_input_conflict(bundle)
    knowledge_span, knowledge_name = first_knowledge.span, first_knowledge.name
    knowledge_raw = template.data[knowledge_span.start:knowledge_span.end]
    question_names = {i.placeholder.name for i in bundle.placeholders_of(PlaceholderType.USER_QUESTION)}

    data = template.data
    pieces = []
    for sentence in reversed(moved):
        span = sentence.span
        if span.contains(knowledge_span.start):
            pieces.append(_without_placeholder(template.slice(span), knowledge_raw.decode('utf-8')))
            data = data[:span.start] + knowledge_raw + data[span.end:]
        else:
            pieces.append(template.slice(span).strip())
            data = _remove(data, span)
    block = '\n'.join(p for p in reversed(pieces) if p)
    remaining = parse_template(data, template.id)

    knowledge = next(p for p in remaining.placeholders if p.name == knowledge_name)
    question = next(
        (p for p in remaining.placeholders if p.name in question_names and p.span.start > knowledge.span.start),
        None,
    )
    inserted = block.encode('utf-8')
    if question is not None:
        at = _line_bounds(data, question.span)[0]
        data = data[:at] + inserted + b'\n' + data[at:]
    else:
        at = _line_bounds(data, knowledge.span)[1]
        data = data[:at] + b'\n' + inserted + data[at:]
    return data.decode('utf-8')


def insert_exclusion(bundle: AnalysisBundle, sentence: str) -> str:
    """Insère la phrase d'exclusion avant le premier span de format de sortie"""
    template = bundle.template
    data = template.data
    inserted = sentence.encode('utf-8')
    formats = bundle.spans_of(ComponentKind.OUTPUT_FORMAT_STYLE)
    if formats:
        at = formats[0].span.start
        separator = b'\n' if at == 0 or data[at - 1:at] == b'\n' else b' '
        return (data[:at] + inserted + separator + data[at:]).decode('utf-8')
    body = template.text.rstrip('\n')
    trailing = template.text[len(body):]
    return body + '\n' + sentence + (trailing or '')


def apply_fixes(template: PromptTemplate, diagnostics: List[LintDiagnostic],
                settings: Optional[Settings] = None, bundle: Optional[AnalysisBundle] = None) -> str:
    """
    Applique les corrections de R4 puis R3

    Args:
        template: Template d'origine
        diagnostics: Diagnostics produits par lint() sur ce template
        settings: Réglages (phrase d'exclusion)
        bundle: Bundle déjà calculé pour ce template

    Returns:
        Texte corrigé ; multiset des placeholders préservé
    """
    settings = settings or default_settings()
    rules = {d.rule_id for d in diagnostics}
    if not rules & {'R3', 'R4'}:
        return template.text

    bundle = bundle or analyze(template, settings)
    text = template.text

    if 'R4' in rules:
        moved = _moved_sentences(bundle)
        formats = bundle.spans_of(ComponentKind.OUTPUT_FORMAT_STYLE)
        if 'R3' in rules and formats and any(formats[0].span.contains(s.span.start) for s in moved):
            message = f"{template.id or '<template>'}: R3 insertion point is moved by R4; R4 applied first"
            logger.warning(f"⚠️ {message}")
            warnings.warn(message, ConflictingFixesWarning)
        text = rewrite_placeholder_first(bundle)
        bundle = analyze(parse_template(text, template.id), settings)

    if 'R3' in rules:
        if bundle.json_pattern is not JsonFormatPattern.NOT_JSON and not has_output_exclusion(bundle, settings):
            text = insert_exclusion(bundle, settings.get('lint.exclusion_sentence'))

    if text != template.text:
        logger.info(f"🔧 {template.id or '<template>'}: corrections appliquées ({', '.join(sorted(rules & {'R3', 'R4'}))})")
    return text
