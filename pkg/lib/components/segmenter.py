"""
Segmentation d'un template en composants

Chaque phrase (ou ligne) reçoit un type parmi les 7 composants + Others via
des lexiques d'indices ordonnés (config/promptlint.json, section segmenter).
Les phrases consécutives de même type sont fusionnées en un ComponentSpan.
"""
import logging
import re
import threading
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from ..config import Settings, default_settings
from ..template import PromptTemplate, Span

logger = logging.getLogger(__name__)

_LIST_MARKER = re.compile(r"^(#{1,6}|[-*•>]|\d+[.)])\s+")
_ENUMERATOR = re.compile(r"^\s*(\d+[.)]|step\s*\d+\b)", re.IGNORECASE)
_FENCE = re.compile(r"^\s*```")
_LEADING_WORD = re.compile(r"[a-z']+")


class ComponentKind(str, Enum):
    PROFILE_ROLE = "ProfileRole"
    DIRECTIVE = "Directive"
    WORKFLOW = "Workflow"
    CONTEXT = "Context"
    EXAMPLES = "Examples"
    OUTPUT_FORMAT_STYLE = "OutputFormatStyle"
    CONSTRAINTS = "Constraints"
    OTHERS = "Others"


# Ordre d'énumération stable (rapports, matrices)
KINDS: Tuple[ComponentKind, ...] = tuple(ComponentKind)
LABELED_KINDS: Tuple[ComponentKind, ...] = tuple(k for k in ComponentKind if k is not ComponentKind.OTHERS)
_EXAMPLE_LINE_KINDS = {ComponentKind.CONTEXT, ComponentKind.DIRECTIVE}


@dataclass(frozen=True)
class Sentence:
    index: int
    span: Span
    text: str
    line: int
    paragraph: int
    enumerated: bool = False
    in_fence: bool = False


@dataclass(frozen=True)
class ComponentSpan:
    kind: ComponentKind
    span: Span
    sentence_range: Tuple[int, int]  # indices inclusifs (premier, dernier)
    ambiguous: bool = False

    def sentence_indices(self) -> range:
        return range(self.sentence_range[0], self.sentence_range[1] + 1)


def _byte_len(s: str) -> int:
    return len(s.encode('utf-8'))


class Segmenter:
    """Classifieur à lexiques, construit depuis la section 'segmenter' de la config"""

    def __init__(self, settings: Optional[Settings] = None):
        settings = settings or default_settings()
        config = settings.section('segmenter')
        self.priority = [ComponentKind(name) for name in config['priority']]
        self.lexicons: Dict[ComponentKind, List[re.Pattern]] = {
            ComponentKind(kind): [re.compile(p) for p in patterns]
            for kind, patterns in config['lexicons'].items()
        }
        self.directive_verbs = set(config['directive_verbs'])
        self.directive_prefixes = set(config['directive_prefixes'])
        self.abbreviations = set(config['abbreviations'])

    # ------------------------------------------------------------------
    # Découpage en phrases
    # ------------------------------------------------------------------

    def _is_boundary(self, line: str, i: int) -> bool:
        """Vrai si la ponctuation en position i termine une phrase"""
        if line[i] != '.':
            return True
        word_start = i
        while word_start > 0 and not line[word_start - 1].isspace():
            word_start -= 1
        word = line[word_start:i].lstrip('(').lower()
        if word.isdigit():
            return False
        return word not in self.abbreviations

    def _split_line(self, line: str) -> List[Tuple[int, int]]:
        """Découpe une ligne en intervalles de caractères (phrases)"""
        pieces = []
        start = 0
        in_quote = False
        depth = 0
        for i, ch in enumerate(line):
            if ch in '"“”':
                in_quote = not in_quote if ch == '"' else ch == '“'
            elif ch in '{[':
                depth += 1
            elif ch in '}]':
                depth = max(0, depth - 1)
            elif ch in '.!?' and not in_quote and depth == 0:
                if i + 1 < len(line) and line[i + 1] in ' \t' and self._is_boundary(line, i):
                    pieces.append((start, i + 1))
                    start = i + 1
        pieces.append((start, len(line)))

        result = []
        for a, b in pieces:
            segment = line[a:b]
            stripped = segment.strip()
            if not stripped:
                continue
            lead = len(segment) - len(segment.lstrip())
            result.append((a + lead, a + lead + len(stripped)))
        return result

    def split_sentences(self, template: PromptTemplate) -> List[Sentence]:
        """
        Découpe le template en phrases

        La fin de ligne est une frontière dure ; les lignes d'un bloc ```
        sont gardées entières.
        """
        sentences: List[Sentence] = []
        offset = 0
        paragraph = 0
        in_fence = False
        enumerated_lines: Set[int] = set()
        lines = template.text.split('\n')

        for line_no, line in enumerate(lines, start=1):
            line_bytes = _byte_len(line)
            if not line.strip():
                if not in_fence:
                    paragraph += 1
                offset += line_bytes + 1
                continue

            is_fence = bool(_FENCE.match(line))
            if is_fence or in_fence:
                stripped = line.strip()
                lead = len(line) - len(line.lstrip())
                start = offset + _byte_len(line[:lead])
                sentences.append(Sentence(
                    index=len(sentences), span=Span(start, start + _byte_len(stripped)),
                    text=stripped, line=line_no, paragraph=paragraph, in_fence=True,
                ))
                if is_fence:
                    in_fence = not in_fence
                offset += line_bytes + 1
                continue

            if _ENUMERATOR.match(line):
                enumerated_lines.add(line_no)
            for a, b in self._split_line(line):
                start = offset + _byte_len(line[:a])
                sentences.append(Sentence(
                    index=len(sentences), span=Span(start, start + _byte_len(line[a:b])),
                    text=line[a:b], line=line_no, paragraph=paragraph,
                ))
            offset += line_bytes + 1

        # Énumérateur retenu seulement sur au moins 2 lignes adjacentes
        runs = {n for n in enumerated_lines if n - 1 in enumerated_lines or n + 1 in enumerated_lines}
        return [replace(s, enumerated=True) if s.line in runs else s for s in sentences]

    # ------------------------------------------------------------------
    # Classification
    # ------------------------------------------------------------------

    def _cue_text(self, text: str) -> str:
        text = text.replace('’', "'").replace('**', '').strip()
        text = _LIST_MARKER.sub('', text, count=1)
        return text.lower().strip()

    def _directive_fallback(self, cue: str) -> bool:
        if cue.endswith('?'):
            return True
        words = _LEADING_WORD.findall(cue)
        while words and words[0] in self.directive_prefixes:
            words = words[1:]
        return bool(words) and words[0] in self.directive_verbs

    def matched_kinds(self, text: str) -> Tuple[List[ComponentKind], bool]:
        """
        Types dont un lexique reconnaît la phrase

        Returns:
            (types forts par ordre de priorité, repli Directive par verbe ou '?')
        """
        cue = self._cue_text(text)
        strong = [
            kind for kind in self.priority
            if any(p.search(cue) for p in self.lexicons.get(kind, []))
        ]
        return strong, self._directive_fallback(cue)

    def classify_sentences(self, sentences: List[Sentence]) -> List[Tuple[ComponentKind, bool]]:
        """Type (et drapeau d'ambiguïté) de chaque phrase, avec héritage d'en-tête"""
        labels = []
        block: Optional[ComponentKind] = None
        block_paragraph = -1

        for s in sentences:
            if s.paragraph != block_paragraph:
                block = None

            if s.in_fence:
                kind = ComponentKind.EXAMPLES if block is ComponentKind.EXAMPLES else ComponentKind.OUTPUT_FORMAT_STYLE
                labels.append((kind, False))
                continue

            strong, fallback = self.matched_kinds(s.text)
            weak = []
            if s.enumerated:
                weak.append(ComponentKind.WORKFLOW)
            if fallback:
                weak.append(ComponentKind.DIRECTIVE)

            if strong and block is ComponentKind.EXAMPLES and set(strong) <= _EXAMPLE_LINE_KINDS:
                # "Input:" ou "Question:" dans un bloc d'exemples
                kind = block
            elif strong:
                candidates = strong + [k for k in weak if k not in strong]
                kind = min(candidates, key=self.priority.index)
            elif block is not None:
                # Les indices faibles cèdent au bloc ouvert par un en-tête
                kind = block
            elif weak:
                kind = min(weak, key=self.priority.index)
            else:
                kind = ComponentKind.OTHERS

            ambiguous = len(set(strong) | set(weak)) >= 2
            labels.append((kind, ambiguous))

            if kind is not ComponentKind.OTHERS and s.text.rstrip().endswith(':') and (strong or weak):
                block = kind
                block_paragraph = s.paragraph

        return labels

    def segment(self, template: PromptTemplate) -> List[ComponentSpan]:
        """
        Segmente un template en ComponentSpan ordonnés

        Args:
            template: Template parsé

        Returns:
            Liste de spans (Others inclus), triée par position
        """
        sentences = self.split_sentences(template)
        labels = self.classify_sentences(sentences)
        spans: List[ComponentSpan] = []
        for sentence, (kind, ambiguous) in zip(sentences, labels):
            if spans and spans[-1].kind is kind:
                last = spans[-1]
                spans[-1] = ComponentSpan(
                    kind=kind,
                    span=Span(last.span.start, sentence.span.end),
                    sentence_range=(last.sentence_range[0], sentence.index),
                    ambiguous=last.ambiguous or ambiguous,
                )
            else:
                spans.append(ComponentSpan(kind, sentence.span, (sentence.index, sentence.index), ambiguous))

        ambiguous_count = sum(1 for _, a in labels if a)
        if ambiguous_count:
            logger.debug(f"Template '{template.id}': {ambiguous_count} phrase(s) ambiguës")
        return spans


_segmenters: Dict[str, Segmenter] = {}
_segmenters_lock = threading.Lock()


def get_segmenter(settings: Optional[Settings] = None) -> Segmenter:
    """Segmenteur partagé, une instance par configuration effective"""
    settings = settings or default_settings()
    key = settings.config_hash()
    with _segmenters_lock:
        if key not in _segmenters:
            _segmenters[key] = Segmenter(settings)
        return _segmenters[key]


def split_sentences(template: PromptTemplate, settings: Optional[Settings] = None) -> List[Sentence]:
    return get_segmenter(settings).split_sentences(template)


def segment(template: PromptTemplate, settings: Optional[Settings] = None) -> List[ComponentSpan]:
    return get_segmenter(settings).segment(template)


def component_presence(spans: List[ComponentSpan]) -> Set[ComponentKind]:
    """Types présents (au moins un span), Others exclu"""
    return {s.kind for s in spans if s.kind is not ComponentKind.OTHERS}


def component_order(spans: List[ComponentSpan]) -> List[ComponentKind]:
    """Types par ordre de première apparition, doublons retirés, Others exclu"""
    order = []
    for s in sorted(spans, key=lambda s: s.span.start):
        if s.kind is not ComponentKind.OTHERS and s.kind not in order:
            order.append(s.kind)
    return order
