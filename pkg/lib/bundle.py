"""
Bundle d'analyse d'un template

Regroupe toutes les facettes calculées sur un même template (segmentation,
placeholders typés et positionnés, contraintes, motif JSON, style de la
directive). Consommé par le lint et par les statistiques de corpus.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

from .components import ComponentKind, ComponentSpan, Sentence, component_order, component_presence, get_segmenter
from .config import Settings, default_settings
from .errors import IncompleteBundle
from .taxonomy import (
    ConstraintType, DirectiveStyle, ExpectedJsonSchema, JsonFormatPattern, PlaceholderType,
    classify_constraint, classify_directive_style, classify_placeholder, detect_json_pattern, extract_schema,
)
from .template import Placeholder, PositionThird, PromptTemplate, parse_template, placeholder_position

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstraintFinding:
    sentence_index: int
    text: str
    type: ConstraintType


@dataclass(frozen=True)
class PlaceholderInfo:
    placeholder: Placeholder
    type: PlaceholderType
    position: PositionThird
    component: ComponentKind


@dataclass(frozen=True)
class AnalysisBundle:
    template: PromptTemplate
    sentences: Tuple[Sentence, ...] = ()
    spans: Optional[Tuple[ComponentSpan, ...]] = None
    placeholders: Optional[Tuple[PlaceholderInfo, ...]] = None
    constraints: Optional[Tuple[ConstraintFinding, ...]] = None
    json_pattern: Optional[JsonFormatPattern] = None
    json_schema: ExpectedJsonSchema = field(default_factory=ExpectedJsonSchema)
    directive_style: Optional[DirectiveStyle] = None

    def validate(self) -> 'AnalysisBundle':
        """Vérifie que toutes les facettes sont présentes"""
        missing = [name for name in ('spans', 'placeholders', 'constraints', 'json_pattern')
                   if getattr(self, name) is None]
        if missing:
            raise IncompleteBundle(f"bundle for '{self.template.id}' lacks: {', '.join(missing)}")
        return self

    @property
    def presence(self) -> Set[ComponentKind]:
        return component_presence(list(self.spans or ()))

    @property
    def order(self) -> List[ComponentKind]:
        return component_order(list(self.spans or ()))

    def spans_of(self, kind: ComponentKind) -> List[ComponentSpan]:
        return [s for s in self.spans or () if s.kind is kind]

    def sentences_of(self, kind: ComponentKind) -> List[Sentence]:
        indices = {i for s in self.spans_of(kind) for i in s.sentence_indices()}
        return [s for s in self.sentences if s.index in indices]

    def text_of(self, kind: ComponentKind) -> str:
        return '\n'.join(self.template.slice(s.span) for s in self.spans_of(kind))

    def placeholders_of(self, placeholder_type: PlaceholderType) -> List[PlaceholderInfo]:
        return [info for info in self.placeholders or () if info.type is placeholder_type]


def _kind_at(spans: List[ComponentSpan], offset: int) -> ComponentKind:
    for span in spans:
        if span.span.start <= offset < span.span.end:
            return span.kind
    return ComponentKind.OTHERS


def _context_window(template: PromptTemplate, placeholder: Placeholder, width: int) -> str:
    char_start = len(template.data[:placeholder.span.start].decode('utf-8'))
    char_end = len(template.data[:placeholder.span.end].decode('utf-8'))
    return template.text[max(0, char_start - width):char_end + width]


def analyze(template: PromptTemplate, settings: Optional[Settings] = None, segmenter=None) -> AnalysisBundle:
    """
    Calcule toutes les facettes d'un template

    Args:
        template: Template parsé
        settings: Réglages (défauts intégrés si None)
        segmenter: Objet exposant segment(template) (LLMLabeler par ex.) ;
                   segmenteur à lexiques par défaut

    Returns:
        AnalysisBundle complet
    """
    settings = settings or default_settings()
    rule_segmenter = get_segmenter(settings)
    sentences = rule_segmenter.split_sentences(template)
    spans = (segmenter or rule_segmenter).segment(template)

    width = settings.get('taxonomy.placeholder_context_window', 60)
    placeholders = tuple(
        PlaceholderInfo(
            placeholder=p,
            type=classify_placeholder(p.name, _context_window(template, p, width), settings),
            position=placeholder_position(template, p),
            component=_kind_at(spans, p.span.start),
        )
        for p in template.placeholders
    )

    constraint_sentences = []
    for span in spans:
        if span.kind is ComponentKind.CONSTRAINTS:
            constraint_sentences.extend(span.sentence_indices())
    constraints = tuple(
        ConstraintFinding(i, sentences[i].text, classify_constraint(sentences[i].text, settings))
        for i in constraint_sentences if i < len(sentences)
    )

    ofs_text = '\n'.join(template.slice(s.span) for s in spans if s.kind is ComponentKind.OUTPUT_FORMAT_STYLE)
    json_text = ofs_text or template.text
    json_pattern = detect_json_pattern(json_text, settings)
    json_schema = extract_schema(json_text) if json_pattern is not JsonFormatPattern.NOT_JSON else ExpectedJsonSchema()

    directive_style = None
    directive_spans = [s for s in spans if s.kind is ComponentKind.DIRECTIVE]
    if directive_spans:
        directive_style = classify_directive_style(template.slice(directive_spans[0].span), settings)

    return AnalysisBundle(
        template=template,
        sentences=tuple(sentences),
        spans=tuple(spans),
        placeholders=placeholders,
        constraints=constraints,
        json_pattern=json_pattern,
        json_schema=json_schema,
        directive_style=directive_style,
    )


def analyze_text(text, id: str = "", settings: Optional[Settings] = None) -> AnalysisBundle:
    """Parse puis analyse un texte brut"""
    return analyze(parse_template(text, id), settings)
