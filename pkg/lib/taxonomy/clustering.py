"""
Sous-catégories des contraintes d'exclusion : TF-IDF + k-means

Le vectoriseur par défaut est un TF-IDF (l2) sur les tokens en minuscules,
stoplist retirée. Un fournisseur d'embeddings denses peut être branché :
callable(list[str]) -> vecteurs de même dimension.
"""
import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning
from sklearn.feature_extraction.text import TfidfVectorizer

from ..config import Settings, default_settings
from ..errors import DegenerateClustersWarning, TooFewSentences
from ..template import word_tokens

logger = logging.getLogger(__name__)

Vectorizer = Callable[[List[str]], Sequence[Sequence[float]]]


@dataclass(frozen=True)
class ClusterResult:
    assignments: List[int]
    top_terms: Dict[int, List[str]] = field(default_factory=dict)
    n_clusters: int = 0
    degenerate: bool = False

    def to_dict(self) -> Dict:
        return {
            'assignments': list(self.assignments),
            'top_terms': {str(c): terms for c, terms in sorted(self.top_terms.items())},
            'n_clusters': self.n_clusters,
            'degenerate': self.degenerate,
        }


def _relabel(labels: Sequence[int]) -> List[int]:
    """Renumérote les clusters par ordre de première apparition"""
    mapping: Dict[int, int] = {}
    for label in labels:
        mapping.setdefault(int(label), len(mapping))
    return [mapping[int(label)] for label in labels]


def _frequency_terms(sentences: List[str], assignments: List[int], stoplist, top_n: int) -> Dict[int, List[str]]:
    terms = {}
    for cluster in sorted(set(assignments)):
        counts = Counter(
            tok for s, a in zip(sentences, assignments) if a == cluster
            for tok in word_tokens(s) if tok not in stoplist
        )
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        terms[cluster] = [t for t, _ in ranked[:top_n]]
    return terms


def cluster_exclusions(sentences: List[str], k: Optional[int] = None, seed: Optional[int] = None,
                       settings: Optional[Settings] = None,
                       vectorizer: Optional[Vectorizer] = None) -> ClusterResult:
    """
    Regroupe des contraintes d'exclusion en k sous-catégories

    Args:
        sentences: Phrases d'exclusion
        k: Nombre de clusters (défaut : taxonomy.clustering.k)
        seed: Graine k-means++ (défaut : taxonomy.clustering.seed)
        settings: Réglages
        vectorizer: Fournisseur d'embeddings denses optionnel

    Returns:
        ClusterResult (un cluster par phrase, termes principaux par cluster)
    """
    settings = settings or default_settings()
    config = settings.section('taxonomy').get('clustering', {})
    k = k if k is not None else config.get('k', 5)
    seed = seed if seed is not None else config.get('seed', 42)
    top_n = config.get('top_terms', 5)
    stoplist = set(settings.get('tokens.stoplist', []))

    if len(sentences) < k:
        raise TooFewSentences(f"{len(sentences)} sentences for k={k}")

    feature_names = None
    if vectorizer is not None:
        matrix = np.asarray(vectorizer(list(sentences)), dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != len(sentences):
            raise ValueError("vectorizer must return one vector per sentence")
    else:
        tfidf = TfidfVectorizer(
            tokenizer=word_tokens, lowercase=False, token_pattern=None,
            stop_words=sorted(stoplist), norm='l2',
        )
        try:
            matrix = tfidf.fit_transform(sentences)
            feature_names = tfidf.get_feature_names_out()
        except ValueError:
            # vocabulaire vide : uniquement des mots de la stoplist
            matrix = None

    if matrix is None:
        assignments = [0] * len(sentences)
        centers = None
    else:
        kmeans = KMeans(
            n_clusters=k, init='k-means++', n_init=config.get('n_init', 10),
            max_iter=config.get('max_iter', 100), tol=config.get('tol', 1e-6), random_state=seed,
        )
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', ConvergenceWarning)
            raw_labels = kmeans.fit_predict(matrix)
        assignments = _relabel(raw_labels)
        # centres réordonnés selon la renumérotation
        order = list(dict.fromkeys(int(label) for label in raw_labels))
        centers = kmeans.cluster_centers_[order]

    n_clusters = len(set(assignments))
    degenerate = n_clusters < k
    if degenerate:
        logger.warning(f"⚠️ k-means dégénéré : {n_clusters} cluster(s) distinct(s) pour k={k}")
        warnings.warn(DegenerateClustersWarning(f"{n_clusters} effective clusters for k={k}"), stacklevel=2)

    if feature_names is not None and centers is not None:
        top_terms = {}
        for cluster, center in enumerate(centers):
            ranked = sorted(
                ((weight, term) for weight, term in zip(center, feature_names) if weight > 0),
                key=lambda wt: (-wt[0], wt[1]),
            )
            top_terms[cluster] = [term for _, term in ranked[:top_n]]
    else:
        top_terms = _frequency_terms(list(sentences), assignments, stoplist, top_n)

    return ClusterResult(assignments=assignments, top_terms=top_terms, n_clusters=n_clusters, degenerate=degenerate)


def purity(assignments: Sequence[int], gold_labels: Sequence) -> float:
    """Part des éléments dont le label majoritaire du cluster est le leur"""
    if len(assignments) != len(gold_labels):
        raise ValueError("assignments and gold labels differ in length")
    if not assignments:
        return 0.0
    by_cluster: Dict[int, Counter] = {}
    for cluster, label in zip(assignments, gold_labels):
        by_cluster.setdefault(cluster, Counter())[label] += 1
    return sum(c.most_common(1)[0][1] for c in by_cluster.values()) / len(assignments)
