"""
Assemblage, sérialisation et rendu Markdown du rapport de corpus
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..bundle import AnalysisBundle, analyze
from ..components import LABELED_KINDS
from ..config import Settings, default_settings
from ..errors import EmptyCorpus, NoJsonTemplates
from ..template import PromptTemplate
from .stats import (
    CooccurrenceMatrix, Distribution, ExclusionClusters, PlaceholderStats, TransitionMatrix, ambiguous_span_count,
    canonical_order, component_frequency, constraint_type_distribution, cooccurrence_matrix,
    directive_style_distribution, exclusion_clusters, json_pattern_distribution, placeholder_component_distribution, placeholder_stats, start_position_counts,
    term_frequencies, transition_matrix,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


def analyze_corpus(templates: Sequence[PromptTemplate], settings: Optional[Settings] = None,
                   workers: Optional[int] = None, segmenter=None) -> List[AnalysisBundle]:
    """
    Phase map : un bundle par template, ordre d'entrée conservé

    Args:
        templates: Templates parsés
        settings: Réglages
        workers: Threads (défaut : analytics.workers)
        segmenter: Segmenteur alternatif (LLMLabeler), lexiques sinon
    """
    settings = settings or default_settings()
    workers = workers or settings.get('analytics.workers', 1)
    if workers <= 1:
        return [analyze(t, settings, segmenter) for t in templates]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda t: analyze(t, settings, segmenter), templates))


@dataclass(frozen=True)
class CorpusReport:
    n_templates: int
    component_frequency: Distribution
    transitions: TransitionMatrix
    start_rates: Dict[str, Dict[str, float]]
    canonical_order: List[str]
    cooccurrence: CooccurrenceMatrix
    placeholders: PlaceholderStats
    placeholder_components: Dict[str, Distribution]
    json_patterns: Optional[Distribution]
    directive_styles: Distribution
    constraint_types: Distribution
    terms: Dict[str, List[List]] = field(default_factory=dict)
    ambiguous_spans: int = 0
    exclusions: Optional[ExclusionClusters] = None

    def to_dict(self) -> Dict:
        return {
            'n_templates': self.n_templates,
            'ambiguous_spans': self.ambiguous_spans,
            'component_frequency': self.component_frequency.to_dict(),
            'transitions': self.transitions.to_dict(),
            'start_rates': self.start_rates,
            'canonical_order': self.canonical_order,
            'cooccurrence': self.cooccurrence.to_dict(),
            'placeholders': {
                **self.placeholders.to_dict(),
                'components': {t: d.to_dict() for t, d in sorted(self.placeholder_components.items())},
            },
            'json_patterns': self.json_patterns.to_dict() if self.json_patterns else None,
            'directive_styles': self.directive_styles.to_dict(),
            'constraint_types': self.constraint_types.to_dict(),
            'exclusion_clusters': self.exclusions.to_dict() if self.exclusions else None,
            'terms': {kind: [{'term': t, 'count': c} for t, c in table] for kind, table in self.terms.items()},
        }


def build_report(corpus: Sequence[AnalysisBundle], settings: Optional[Settings] = None) -> CorpusReport:
    """
    Calcule toutes les statistiques sur le même ensemble de templates

    Raises:
        EmptyCorpus: corpus vide
    """
    settings = settings or default_settings()
    if not corpus:
        raise EmptyCorpus("corpus contains no template")

    start_rates = {
        kind.value: {'ratio': round(starts / containing, 6), 'starts': starts, 'templates': containing}
        for kind, (starts, containing) in start_position_counts(corpus).items()
    }

    try:
        json_patterns = json_pattern_distribution(corpus)
    except NoJsonTemplates:
        json_patterns = None

    top_k = settings.get('analytics.top_k_terms', 10)
    terms = {}
    for kind in LABELED_KINDS:
        if any(b.spans_of(kind) for b in corpus):
            terms[kind.value] = term_frequencies(corpus, kind, top_k, settings)

    report = CorpusReport(
        n_templates=len(corpus),
        component_frequency=component_frequency(corpus),
        transitions=transition_matrix(corpus),
        start_rates=start_rates,
        canonical_order=[k.value for k in canonical_order(corpus)],
        cooccurrence=cooccurrence_matrix(corpus),
        placeholders=placeholder_stats(corpus),
        placeholder_components=placeholder_component_distribution(corpus),
        json_patterns=json_patterns,
        directive_styles=directive_style_distribution(corpus),
        constraint_types=constraint_type_distribution(corpus),
        terms=terms,
        ambiguous_spans=ambiguous_span_count(corpus),
        exclusions=exclusion_clusters(corpus, settings),
    )
    logger.info(f"✅ Rapport calculé sur {len(corpus)} templates")
    return report


def report_document(report: CorpusReport, manifest: Dict) -> Dict:
    """Document JSON versionné (manifest embarqué)"""
    return {'schema_version': SCHEMA_VERSION, 'manifest': manifest, **report.to_dict()}


def dumps(document: Dict) -> str:
    """Sérialisation déterministe : clés triées, indentation 2, saut de ligne final"""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def _pct(value: float) -> str:
    return f"{value * 100:.1f}%"


def _distribution_table(title: str, dist: Dict) -> List[str]:
    lines = [f"### {title}", "", "| Label | Count | Denominator | Fraction |", "|---|---:|---:|---:|"]
    for label, count, denominator, fraction in zip(dist['labels'], dist['counts'], dist['denominators'], dist['fractions']):
        lines.append(f"| {label} | {count} | {denominator} | {_pct(fraction)} |")
    lines.append("")
    return lines


def render_markdown(document: Dict) -> str:
    """Tables Markdown pour chaque statistique du rapport"""
    manifest = document.get('manifest', {})
    lines = [
        "# PromptLint corpus report",
        "",
        f"- schema_version: {document['schema_version']}",
        f"- templates: {document['n_templates']}",
        f"- ambiguous spans (two or more lexicons matched): {document['ambiguous_spans']}",
        f"- tool version: {manifest.get('tool_version', '?')}",
        f"- config hash: `{manifest.get('config_hash', '?')}`",
        f"- generated at: {manifest.get('generated_at', '?')}",
        "",
        "## Components",
        "",
    ]
    lines += _distribution_table("Component frequency", document['component_frequency'])

    transitions = document['transitions']
    kinds = transitions['kinds']
    lines += ["### Transition probabilities (row -> column)", "",
              "| from \\ to | " + " | ".join(kinds) + " |",
              "|---|" + "---:|" * len(kinds)]
    for kind, row in zip(kinds, transitions['probs']):
        lines.append(f"| {kind} | " + " | ".join(f"{p:.2f}" for p in row) + " |")
    lines += ["", f"Absorbing: {', '.join(transitions['absorbing']) or 'none'}", ""]

    lines += ["### Start position", "", "| Kind | Starts | Templates | Rate |", "|---|---:|---:|---:|"]
    for kind, rate in sorted(document['start_rates'].items()):
        lines.append(f"| {kind} | {rate['starts']} | {rate['templates']} | {_pct(rate['ratio'])} |")
    lines += ["", f"Canonical order: {' -> '.join(document['canonical_order']) or 'n/a'}", ""]

    lines += ["### Co-occurring pairs", "", "| A | B | Templates |", "|---|---|---:|"]
    for pair in document['cooccurrence']['pairs']:
        lines.append(f"| {pair['a']} | {pair['b']} | {pair['count']} |")
    lines.append("")

    lines += ["## Placeholders", ""]
    placeholders = document['placeholders']
    lines += _distribution_table("Placeholder types (templates)", placeholders['types'])
    for placeholder_type, dist in placeholders['positions'].items():
        lines += _distribution_table(f"Positions of {placeholder_type}", dist)
    lines += ["### Placeholder names", "", "| Name | Count | Fraction |", "|---|---:|---:|"]
    for entry in placeholders['names']:
        lines.append(f"| {entry['name']} | {entry['count']} | {_pct(entry['fraction'])} |")
    lines.append("")

    lines += ["## Taxonomy", ""]
    if document['json_patterns']:
        lines += _distribution_table("JSON patterns", document['json_patterns'])
    else:
        lines += ["### JSON patterns", "", "No template declares JSON output.", ""]
    lines += _distribution_table("Directive styles", document['directive_styles'])
    lines += _distribution_table("Constraint types", document['constraint_types'])

    clusters = document['exclusion_clusters']
    lines += ["### Exclusion constraint clusters", ""]
    if clusters:
        lines += [f"k = {clusters['k']}, seed = {clusters['seed']}, {clusters['n_sentences']} sentences"
                  + (" (degenerate)" if clusters['degenerate'] else ""), "",
                  "| Cluster | Size | Top terms | Example |", "|---:|---:|---|---|"]
        for cluster in clusters['clusters']:
            example = cluster['examples'][0].replace('|', '\\|') if cluster['examples'] else ''
            lines.append(f"| {cluster['id']} | {cluster['size']} | {', '.join(cluster['top_terms'])} | {example} |")
        lines.append("")
    else:
        lines += ["Too few exclusion constraints to cluster.", ""]

    lines += ["## Terms", ""]
    for kind, table in document['terms'].items():
        lines += [f"### {kind}", "", "| Term | Count |", "|---|---:|"]
        lines += [f"| {entry['term']} | {entry['count']} |" for entry in table]
        lines.append("")

    return '\n'.join(lines).rstrip('\n') + '\n'


def write_report(document: Dict, output_dir) -> List[Path]:
    """Écrit report.json et report.md dans output_dir"""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    json_path = output_dir / 'report.json'
    md_path = output_dir / 'report.md'
    json_path.write_text(dumps(document), encoding='utf-8')
    md_path.write_text(render_markdown(document), encoding='utf-8')
    logger.info(f"💾 Rapport écrit dans {output_dir}")
    return [json_path, md_path]
