"""
Normalisation des libellés et évaluation contre un étiquetage de référence
"""
import json
import logging
import re
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from pathlib import Path
from typing import Dict, List, Optional

from ..config import Settings, default_settings
from ..errors import CorpusFormatError, IdMismatch, NoIdentified
from .segmenter import ComponentKind, ComponentSpan

logger = logging.getLogger(__name__)


def _normalize_label(raw: str) -> str:
    text = raw.strip().lower().replace('_', ' ').replace('-', ' ')
    return re.sub(r"\s+", " ", text)


def canonicalize_label(raw: str, settings: Optional[Settings] = None) -> ComponentKind:
    """
    Ramène un libellé libre (sortie LLM, fichier gold) à un ComponentKind

    Ratio SequenceMatcher contre le nom canonique et les alias de chaque type ;
    sous le seuil configuré -> Others.
    """
    settings = settings or default_settings()
    threshold = settings.get('segmenter.label_similarity_threshold', 0.6)
    aliases = settings.get('segmenter.label_aliases', {})

    label = _normalize_label(raw)
    best_kind, best_ratio = ComponentKind.OTHERS, 0.0
    for kind in ComponentKind:
        for candidate in [kind.value, *aliases.get(kind.value, [])]:
            ratio = SequenceMatcher(None, label, _normalize_label(candidate)).ratio()
            if ratio > best_ratio:
                best_kind, best_ratio = kind, ratio

    if best_ratio < threshold:
        return ComponentKind.OTHERS
    return best_kind


@dataclass(frozen=True)
class GoldLabeling:
    """Étiquettes de référence d'un template : index de phrase -> type"""
    template_id: str
    labels: Dict[int, ComponentKind]
    text: Optional[str] = None

    def kind_of(self, sentence_index: int) -> ComponentKind:
        return self.labels.get(sentence_index, ComponentKind.OTHERS)


@dataclass(frozen=True)
class MatchScores:
    precision: float
    p_full: float
    p_partial: float
    correct: int = 0
    identified: int = 0
    n_templates: int = 0
    per_template: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'precision': round(self.precision, 6),
            'p_full': round(self.p_full, 6),
            'p_partial': round(self.p_partial, 6),
            'correct': self.correct,
            'identified': self.identified,
            'n_templates': self.n_templates,
        }


def score_against_gold(predicted: Dict[str, List[ComponentSpan]],
                       gold: Dict[str, GoldLabeling]) -> MatchScores:
    """
    Précision, correspondance complète et partielle

    Un composant identifié = un span prédit hors Others ; il est correct si
    toutes les phrases qu'il couvre portent ce type dans le gold.

    Args:
        predicted: id -> spans prédits
        gold: id -> étiquetage de référence

    Returns:
        MatchScores
    """
    if set(predicted) != set(gold):
        missing = sorted(set(predicted) ^ set(gold))
        raise IdMismatch(f"template ids differ between predictions and gold: {', '.join(missing[:5])}")

    total_correct = total_identified = full = partial = 0
    per_template = {}
    for template_id in sorted(predicted):
        labeling = gold[template_id]
        identified = [s for s in predicted[template_id] if s.kind is not ComponentKind.OTHERS]
        correct = sum(
            1 for s in identified
            if all(labeling.kind_of(i) is s.kind for i in s.sentence_indices())
        )
        per_template[template_id] = {'identified': len(identified), 'correct': correct}
        total_correct += correct
        total_identified += len(identified)
        if identified and correct == len(identified):
            full += 1
        if correct > 0:
            partial += 1

    if total_identified == 0:
        raise NoIdentified("no component identified in any template")

    n = len(predicted)
    return MatchScores(
        precision=total_correct / total_identified,
        p_full=full / n,
        p_partial=partial / n,
        correct=total_correct,
        identified=total_identified,
        n_templates=n,
        per_template=per_template,
    )


def load_gold(path, settings: Optional[Settings] = None) -> Dict[str, GoldLabeling]:
    """
    Charge un fichier gold JSONL : {"id", "text"?, "labels": [{"sentence", "kind"}]}

    Les noms de type passent par canonicalize_label.
    """
    path = Path(path)
    gold: Dict[str, GoldLabeling] = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                labels = {}
                for item in obj['labels']:
                    index = int(item['sentence'])
                    if index in labels:
                        raise ValueError(f"sentence {index} labelled twice")
                    labels[index] = canonicalize_label(item['kind'], settings)
                gold[obj['id']] = GoldLabeling(obj['id'], labels, obj.get('text'))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise CorpusFormatError(path, line_number, str(e)) from e

    logger.info(f"📂 {len(gold)} étiquetages gold chargés depuis {path.name}")
    return gold
