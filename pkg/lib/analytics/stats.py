"""
Statistiques de corpus calculées sur des AnalysisBundle

Toutes les fractions sont accompagnées de leur dénominateur. Les comptes sont
commutatifs : l'ordre du corpus ne change aucun résultat.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..bundle import AnalysisBundle
from ..components import KINDS, LABELED_KINDS, ComponentKind
from ..config import Settings, default_settings
from ..errors import EmptyCorpus, KindAbsent, NoJsonTemplates, TooFewSentences
from ..taxonomy import (
    ClusterResult, ConstraintType, DirectiveStyle, JsonFormatPattern, PlaceholderType, cluster_exclusions,
)
from ..template import PLACEHOLDER_PATTERN, PositionThird, word_tokens

logger = logging.getLogger(__name__)

JSON_PATTERNS = (
    JsonFormatPattern.P1_JSON_OUTPUT,
    JsonFormatPattern.P2_PLUS_ATTRIBUTE_NAMES,
    JsonFormatPattern.P3_PLUS_ATTRIBUTE_DESCRIPTIONS,
)


@dataclass(frozen=True)
class Distribution:
    """Fractions numérateur / dénominateur par libellé"""
    labels: Tuple[str, ...]
    counts: Tuple[int, ...]
    denominators: Tuple[int, ...]

    @property
    def fractions(self) -> Tuple[float, ...]:
        return tuple(c / d if d else 0.0 for c, d in zip(self.counts, self.denominators))

    def fraction_of(self, label) -> float:
        label = getattr(label, 'value', label)
        return self.fractions[self.labels.index(label)]

    def count_of(self, label) -> int:
        label = getattr(label, 'value', label)
        return self.counts[self.labels.index(label)]

    @classmethod
    def from_counts(cls, labels: Sequence, counter: Counter, denominator: int) -> 'Distribution':
        names = tuple(getattr(label, 'value', label) for label in labels)
        return cls(names, tuple(counter.get(label, 0) for label in labels), tuple(denominator for _ in labels))

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.labels),
            'counts': list(self.counts),
            'denominators': list(self.denominators),
            'fractions': [round(f, 6) for f in self.fractions],
        }


@dataclass(frozen=True)
class TransitionMatrix:
    kinds: Tuple[ComponentKind, ...]
    counts: np.ndarray
    probs: np.ndarray
    absorbing: Tuple[ComponentKind, ...] = ()

    def prob(self, a: ComponentKind, b: ComponentKind) -> float:
        return float(self.probs[self.kinds.index(a), self.kinds.index(b)])

    def count(self, a: ComponentKind, b: ComponentKind) -> int:
        return int(self.counts[self.kinds.index(a), self.kinds.index(b)])

    def to_dict(self) -> Dict:
        return {
            'kinds': [k.value for k in self.kinds],
            'counts': self.counts.astype(int).tolist(),
            'probs': [[round(float(p), 6) for p in row] for row in self.probs],
            'absorbing': [k.value for k in self.absorbing],
            'pair_rule': 'per-template-once',
        }


@dataclass(frozen=True)
class CooccurrenceMatrix:
    kinds: Tuple[ComponentKind, ...]
    counts: np.ndarray
    pairs: Tuple[Tuple[ComponentKind, ComponentKind, int], ...] = ()

    def to_dict(self) -> Dict:
        return {
            'kinds': [k.value for k in self.kinds],
            'counts': self.counts.astype(int).tolist(),
            'pairs': [{'a': a.value, 'b': b.value, 'count': c} for a, b, c in self.pairs],
        }


@dataclass(frozen=True)
class PlaceholderStats:
    n_templates: int
    total: int
    types: Distribution
    positions: Dict[str, Distribution] = field(default_factory=dict)
    names: Tuple[Tuple[str, int], ...] = ()

    def name_fraction(self, name: str) -> float:
        return dict(self.names).get(name, 0) / self.total if self.total else 0.0

    def to_dict(self) -> Dict:
        return {
            'total': self.total,
            'types': self.types.to_dict(),
            'positions': {t: d.to_dict() for t, d in sorted(self.positions.items())},
            'names': [
                {'name': n, 'count': c, 'fraction': round(c / self.total, 6)}
                for n, c in self.names
            ],
        }


def _require(corpus: Sequence[AnalysisBundle]):
    if not corpus:
        raise EmptyCorpus("corpus contains no template")


def component_frequency(corpus: Sequence[AnalysisBundle]) -> Distribution:
    """Part des templates contenant chaque type de composant"""
    _require(corpus)
    counter = Counter(kind for bundle in corpus for kind in bundle.presence)
    return Distribution.from_counts(LABELED_KINDS, counter, len(corpus))


def transition_matrix(corpus: Sequence[AnalysisBundle]) -> TransitionMatrix:
    """
    Matrice de transition entre types consécutifs

    Paires comptées une fois par template sur l'ordre de première apparition ;
    une ligne sans sortie est marquée absorbante et reste à zéro.
    """
    _require(corpus)
    index = {kind: i for i, kind in enumerate(LABELED_KINDS)}
    counts = np.zeros((len(LABELED_KINDS), len(LABELED_KINDS)), dtype=np.int64)
    for bundle in corpus:
        pairs = set(zip(bundle.order, bundle.order[1:]))
        for a, b in pairs:
            counts[index[a], index[b]] += 1

    row_sums = counts.sum(axis=1, keepdims=True)
    probs = np.divide(counts, row_sums, out=np.zeros(counts.shape, dtype=float), where=row_sums > 0)
    absorbing = tuple(kind for kind in LABELED_KINDS if row_sums[index[kind], 0] == 0)
    return TransitionMatrix(kinds=LABELED_KINDS, counts=counts, probs=probs, absorbing=absorbing)


def start_position_counts(corpus: Sequence[AnalysisBundle]) -> Dict[ComponentKind, Tuple[int, int]]:
    """type -> (templates qui commencent par ce type, templates qui le contiennent)"""
    containing = Counter(kind for bundle in corpus for kind in bundle.presence)
    starts = Counter(bundle.order[0] for bundle in corpus if bundle.order)
    return {kind: (starts.get(kind, 0), containing[kind]) for kind in LABELED_KINDS if containing[kind]}


def start_position_frequency(corpus: Sequence[AnalysisBundle], kind: ComponentKind) -> float:
    """Part des templates contenant kind dont l'ordre commence par kind"""
    _require(corpus)
    counts = start_position_counts(corpus)
    if kind not in counts:
        raise KindAbsent(f"no template contains {kind.value}")
    starts, containing = counts[kind]
    return starts / containing


def placeholder_stats(corpus: Sequence[AnalysisBundle]) -> PlaceholderStats:
    """Types (niveau template), positions par type et fréquences des noms (niveau occurrence)"""
    _require(corpus)
    type_presence = Counter()
    positions: Dict[PlaceholderType, Counter] = {}
    names = Counter()
    total = 0
    for bundle in corpus:
        type_presence.update({info.type for info in bundle.placeholders})
        for info in bundle.placeholders:
            positions.setdefault(info.type, Counter())[info.position] += 1
            names[info.placeholder.name] += 1
            total += 1

    position_distributions = {
        placeholder_type.value: Distribution.from_counts(tuple(PositionThird), counter, sum(counter.values()))
        for placeholder_type, counter in positions.items()
    }
    ranked = tuple(sorted(names.items(), key=lambda kv: (-kv[1], kv[0])))
    return PlaceholderStats(
        n_templates=len(corpus),
        total=total,
        types=Distribution.from_counts(tuple(PlaceholderType), type_presence, len(corpus)),
        positions=position_distributions,
        names=ranked,
    )


def json_pattern_distribution(corpus: Sequence[AnalysisBundle]) -> Distribution:
    """Répartition P1/P2/P3 parmi les templates qui déclarent du JSON"""
    _require(corpus)
    counter = Counter(b.json_pattern for b in corpus if b.json_pattern is not JsonFormatPattern.NOT_JSON)
    total = sum(counter.values())
    if total == 0:
        raise NoJsonTemplates("no template declares JSON output")
    return Distribution.from_counts(JSON_PATTERNS, counter, total)


def _strip_placeholders(text: str) -> str:
    return PLACEHOLDER_PATTERN.sub(b' ', text.encode('utf-8')).decode('utf-8')


def term_frequencies(corpus: Sequence[AnalysisBundle], kind: ComponentKind, top_k: Optional[int] = None,
                     settings: Optional[Settings] = None) -> List[Tuple[str, int]]:
    """
    Termes les plus fréquents dans les spans d'un type

    Args:
        corpus: Bundles analysés
        kind: Type de composant
        top_k: Nombre de termes (défaut : analytics.top_k_terms)
        settings: Réglages (stoplist)

    Returns:
        [(terme, compte)] trié par compte décroissant puis ordre lexicographique
    """
    settings = settings or default_settings()
    _require(corpus)
    top_k = top_k if top_k is not None else settings.get('analytics.top_k_terms', 10)
    stoplist = set(settings.get('tokens.stoplist', []))

    bundles = [b for b in corpus if b.spans_of(kind)]
    if not bundles:
        raise KindAbsent(f"no template contains {kind.value}")

    counter = Counter()
    for bundle in bundles:
        for span in bundle.spans_of(kind):
            text = _strip_placeholders(bundle.template.slice(span.span))
            counter.update(t for t in word_tokens(text) if t not in stoplist)
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]


def cooccurrence_matrix(corpus: Sequence[AnalysisBundle]) -> CooccurrenceMatrix:
    """Nombre de templates contenant à la fois i et j (diagonale : présence)"""
    _require(corpus)
    index = {kind: i for i, kind in enumerate(LABELED_KINDS)}
    counts = np.zeros((len(LABELED_KINDS), len(LABELED_KINDS)), dtype=np.int64)
    for bundle in corpus:
        present = sorted((index[k] for k in bundle.presence))
        for i in present:
            for j in present:
                counts[i, j] += 1

    pairs = [
        (LABELED_KINDS[i], LABELED_KINDS[j], int(counts[i, j]))
        for i in range(len(LABELED_KINDS)) for j in range(i + 1, len(LABELED_KINDS)) if counts[i, j] > 0
    ]
    pairs.sort(key=lambda p: (-p[2], index[p[0]], index[p[1]]))
    return CooccurrenceMatrix(kinds=LABELED_KINDS, counts=counts, pairs=tuple(pairs))


def canonical_order(corpus: Sequence[AnalysisBundle]) -> List[ComponentKind]:
    """
    Ordre modal : part du type de départ le plus fréquent puis suit la
    transition la plus probable vers un type non visité

    Égalités départagées par la fréquence globale puis l'ordre de l'énumération.
    """
    _require(corpus)
    frequency = component_frequency(corpus)
    matrix = transition_matrix(corpus)
    starts = Counter(b.order[0] for b in corpus if b.order)
    if not starts:
        return []

    def tie_key(kind: ComponentKind):
        return (-frequency.count_of(kind), LABELED_KINDS.index(kind))

    current = min(starts, key=lambda k: (-starts[k], *tie_key(k)))
    order = [current]
    while True:
        candidates = [k for k in LABELED_KINDS if k not in order and matrix.prob(current, k) > 0]
        if not candidates:
            break
        current = min(candidates, key=lambda k: (-matrix.prob(current, k), *tie_key(k)))
        order.append(current)
    return order


def constraint_type_distribution(corpus: Sequence[AnalysisBundle]) -> Distribution:
    """Répartition des types sur toutes les phrases de contrainte"""
    _require(corpus)
    counter = Counter(c.type for b in corpus for c in b.constraints)
    return Distribution.from_counts(tuple(ConstraintType), counter, sum(counter.values()))


def directive_style_distribution(corpus: Sequence[AnalysisBundle]) -> Distribution:
    """Instruction / Question parmi les templates ayant une directive"""
    _require(corpus)
    counter = Counter(b.directive_style for b in corpus if b.directive_style is not None)
    return Distribution.from_counts(tuple(DirectiveStyle), counter, sum(counter.values()))


def ambiguous_span_count(corpus: Sequence[AnalysisBundle]) -> int:
    """Spans dont au moins une phrase a été reconnue par deux lexiques ou plus"""
    return sum(1 for bundle in corpus for span in bundle.spans or () if span.ambiguous)


def placeholder_component_distribution(corpus: Sequence[AnalysisBundle]) -> Dict[str, Distribution]:
    """Pour chaque type de placeholder, composant qui contient ses occurrences"""
    _require(corpus)
    by_type: Dict[PlaceholderType, Counter] = {}
    for bundle in corpus:
        for info in bundle.placeholders:
            by_type.setdefault(info.type, Counter())[info.component] += 1
    return {
        placeholder_type.value: Distribution.from_counts(KINDS, counter, sum(counter.values()))
        for placeholder_type, counter in by_type.items()
    }


@dataclass(frozen=True)
class ExclusionClusters:
    sentences: Tuple[str, ...]
    result: ClusterResult
    k: int
    seed: int

    def members(self, cluster: int) -> List[str]:
        return [s for s, a in zip(self.sentences, self.result.assignments) if a == cluster]

    def to_dict(self, examples: int = 3) -> Dict:
        return {
            'k': self.k,
            'seed': self.seed,
            'n_sentences': len(self.sentences),
            'n_clusters': self.result.n_clusters,
            'degenerate': self.result.degenerate,
            'clusters': [
                {
                    'id': cluster,
                    'size': len(self.members(cluster)),
                    'top_terms': self.result.top_terms.get(cluster, []),
                    'examples': self.members(cluster)[:examples],
                }
                for cluster in sorted(set(self.result.assignments))
            ],
        }


def exclusion_clusters(corpus: Sequence[AnalysisBundle], settings: Optional[Settings] = None) -> Optional[ExclusionClusters]:
    """
    Sous-catégories des contraintes d'exclusion du corpus (k-means, graine fixe)

    Returns:
        ExclusionClusters, ou None s'il y a moins de phrases d'exclusion que de clusters
    """
    _require(corpus)
    settings = settings or default_settings()
    sentences = [c.text for b in corpus for c in b.constraints if c.type is ConstraintType.EXCLUSION]
    k = settings.get('taxonomy.clustering.k', 5)
    seed = settings.get('taxonomy.clustering.seed', 42)
    try:
        result = cluster_exclusions(sentences, k=k, seed=seed, settings=settings)
    except TooFewSentences:
        logger.info(f"Clustering des exclusions ignoré : {len(sentences)} phrase(s) pour k={k}")
        return None
    return ExclusionClusters(tuple(sentences), result, k, seed)
