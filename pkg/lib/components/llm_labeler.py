"""
Étiquetage des composants par un LLM externe (optionnel)

Le fournisseur renvoie un objet JSON {nom de composant -> texte} ; les clés
passent par canonicalize_label et chaque phrase prend le type du texte qui
la contient. build_segmenter choisit le segmenteur selon segmenter.backend.
"""
import json
import logging
from typing import Dict, List, Optional

from ..config import Settings, default_settings
from ..errors import ConfigError
from ..template import PromptTemplate, Span
from .scoring import canonicalize_label
from .segmenter import ComponentKind, ComponentSpan, get_segmenter

logger = logging.getLogger(__name__)

LABELING_PROMPT = """Split the following prompt template into these components: \
Profile/Role, Directive, Workflow, Context, Examples, Output Format/Style, Constraints. \
Assign each piece of text to exactly one component. Reply with a JSON object mapping \
component names to the exact text copied from the template.

TEMPLATE:
{template}"""


class LLMLabeler:
    """Segmenteur adossé à un fournisseur de chat-completion (contrat du harness)"""

    def __init__(self, provider, settings: Optional[Settings] = None):
        """
        Args:
            provider: Objet exposant send(prompt, template_id, input_id) -> réponse (.text)
            settings: Réglages (seuil de similarité des libellés)
        """
        self.provider = provider
        self.settings = settings or default_settings()

    def _parse_reply(self, reply: str) -> Dict[ComponentKind, List[str]]:
        from ..harness.scoring import extract_json

        candidate, _ = extract_json(reply)
        try:
            obj = json.loads(candidate)
        except json.JSONDecodeError:
            logger.warning("⚠️ Réponse du labeler non JSON, tout passe en Others")
            return {}
        if not isinstance(obj, dict):
            return {}

        texts: Dict[ComponentKind, List[str]] = {}
        for raw_kind, value in obj.items():
            kind = canonicalize_label(str(raw_kind), self.settings)
            values = value if isinstance(value, list) else [value]
            texts.setdefault(kind, []).extend(str(v) for v in values if v)
        return texts

    def segment(self, template: PromptTemplate) -> List[ComponentSpan]:
        """Même contrat que Segmenter.segment"""
        reply = self.provider.send(
            LABELING_PROMPT.format(template=template.text), template_id=template.id, input_id='segment',
        ).text
        texts = self._parse_reply(reply)
        sentences = get_segmenter(self.settings).split_sentences(template)

        spans: List[ComponentSpan] = []
        for sentence in sentences:
            kind = ComponentKind.OTHERS
            for candidate in ComponentKind:
                if any(sentence.text in chunk for chunk in texts.get(candidate, [])):
                    kind = candidate
                    break
            if spans and spans[-1].kind is kind:
                last = spans[-1]
                spans[-1] = ComponentSpan(kind, Span(last.span.start, sentence.span.end),
                                          (last.sentence_range[0], sentence.index))
            else:
                spans.append(ComponentSpan(kind, sentence.span, (sentence.index, sentence.index)))
        return spans


SEGMENTER_BACKENDS = ('cue', 'llm')


def build_segmenter(settings: Optional[Settings] = None, provider=None):
    """
    Segmenteur choisi par segmenter.backend

    Args:
        settings: Réglages
        provider: Fournisseur de chat-completion, requis pour le backend 'llm'

    Returns:
        Segmenter à lexiques (cue) ou LLMLabeler (llm)
    """
    settings = settings or default_settings()
    backend = settings.get('segmenter.backend', 'cue')
    if backend == 'cue':
        return get_segmenter(settings)
    if backend == 'llm':
        if provider is None:
            raise ConfigError("segmenter backend 'llm' needs a chat-completion provider")
        logger.info("🤖 Segmentation déléguée au LLM")
        return LLMLabeler(provider, settings)
    raise ConfigError(f"unknown segmenter backend '{backend}' (expected {' or '.join(SEGMENTER_BACKENDS)})")
