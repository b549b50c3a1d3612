from collections import Counter
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from conftest import FIXTURES
from lib.analytics import (
    ambiguous_span_count, analyze_corpus, build_report, canonical_order, component_frequency,
    constraint_type_distribution, cooccurrence_matrix, directive_style_distribution, exclusion_clusters,
    json_pattern_distribution, placeholder_component_distribution, placeholder_stats, render_markdown,
    report_document, start_position_frequency, term_frequencies, transition_matrix,
)
from lib.bundle import AnalysisBundle, ConstraintFinding, PlaceholderInfo
from lib.components import LABELED_KINDS, ComponentKind, ComponentSpan
from lib.config import default_settings
from lib.errors import EmptyCorpus, KindAbsent, NoJsonTemplates
from lib.ingest import load_corpus
from lib.taxonomy import ConstraintType, DirectiveStyle, JsonFormatPattern, PlaceholderType
from lib.template import Span, parse_template, placeholder_position

PR, D, W, C = ComponentKind.PROFILE_ROLE, ComponentKind.DIRECTIVE, ComponentKind.WORKFLOW, ComponentKind.CONTEXT
E, O, K = ComponentKind.EXAMPLES, ComponentKind.OUTPUT_FORMAT_STYLE, ComponentKind.CONSTRAINTS

SEQUENCES = [
    [PR, D, C, O],
    [D, C, K],
    [PR, D, K],
    [D, O, D],
    [C, D, K, C],
    [PR, D, C, K],
]


def bundle(tid, kinds, json_pattern=JsonFormatPattern.NOT_JSON, constraints=(), placeholders=(), template=None):
    spans = tuple(ComponentSpan(kind, Span(i * 10, i * 10 + 9), (i, i)) for i, kind in enumerate(kinds))
    return AnalysisBundle(
        template=template or parse_template(f"template {tid}", tid),
        spans=spans,
        placeholders=tuple(placeholders),
        constraints=tuple(constraints),
        json_pattern=json_pattern,
    )


CORPUS = [bundle(f"t{i}", kinds) for i, kinds in enumerate(SEQUENCES)]


def _pair_oracle(sequences):
    """Comptage naïf : ordre de première apparition, paires consécutives comptées une fois par template"""
    counts = Counter()
    for kinds in sequences:
        order = []
        for kind in kinds:
            if kind not in order:
                order.append(kind)
        for pair in set(zip(order, order[1:])):
            counts[pair] += 1
    return counts


def test_transition_counts_match_pair_oracle():
    matrix = transition_matrix(CORPUS)
    oracle = _pair_oracle(SEQUENCES)
    for a in LABELED_KINDS:
        for b in LABELED_KINDS:
            assert matrix.count(a, b) == oracle.get((a, b), 0)

    assert matrix.count(PR, D) == 3
    assert matrix.prob(D, C) == pytest.approx(0.5)
    assert matrix.prob(C, K) == pytest.approx(0.5)
    assert matrix.prob(PR, D) == pytest.approx(1.0)
    assert matrix.absorbing == (W, E, O, K)


def test_transition_rows_sum_to_one_or_zero():
    sums = transition_matrix(CORPUS).probs.sum(axis=1)
    for value in sums:
        assert value == pytest.approx(1.0) or value == 0.0


@hypothesis_settings(max_examples=30)
@given(st.permutations(CORPUS))
def test_statistics_ignore_corpus_order(shuffled):
    assert np.array_equal(transition_matrix(shuffled).counts, transition_matrix(CORPUS).counts)
    assert component_frequency(shuffled) == component_frequency(CORPUS)
    assert canonical_order(shuffled) == canonical_order(CORPUS)
    assert np.array_equal(cooccurrence_matrix(shuffled).counts, cooccurrence_matrix(CORPUS).counts)


def test_component_frequency():
    dist = component_frequency(CORPUS)
    assert dist.counts == (3, 6, 0, 4, 0, 2, 4)
    assert set(dist.denominators) == {6}

    small = [bundle('a', [D, K]), bundle('b', [K]), bundle('c', [PR, K]), bundle('d', [D])]
    assert component_frequency(small).fraction_of(K) == pytest.approx(0.75)


def test_start_position_frequency():
    assert start_position_frequency(CORPUS, PR) == pytest.approx(1.0)
    assert start_position_frequency(CORPUS, D) == pytest.approx(1 / 3)
    assert start_position_frequency(CORPUS, C) == pytest.approx(0.25)

    pair = [bundle('a', [PR, D]), bundle('b', [D, PR])]
    assert start_position_frequency(pair, PR) == pytest.approx(0.5)

    with pytest.raises(KindAbsent):
        start_position_frequency(CORPUS, W)


def test_canonical_order():
    assert canonical_order(CORPUS) == [PR, D, C, K]


def test_cooccurrence():
    matrix = cooccurrence_matrix(CORPUS)
    index = {kind: i for i, kind in enumerate(LABELED_KINDS)}
    assert matrix.counts[index[D], index[D]] == 6
    assert matrix.counts[index[D], index[K]] == 4
    assert matrix.counts[index[C], index[K]] == 3
    assert np.array_equal(matrix.counts, matrix.counts.T)
    assert matrix.pairs[0] == (D, C, 4)


def test_json_pattern_distribution():
    corpus = [
        bundle('a', [D], JsonFormatPattern.P1_JSON_OUTPUT),
        bundle('b', [D], JsonFormatPattern.P2_PLUS_ATTRIBUTE_NAMES),
        bundle('c', [D], JsonFormatPattern.P3_PLUS_ATTRIBUTE_DESCRIPTIONS),
        bundle('d', [D]),
    ]
    dist = json_pattern_distribution(corpus)
    assert dist.fractions == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    assert dist.denominators == (3, 3, 3)

    with pytest.raises(NoJsonTemplates):
        json_pattern_distribution([bundle('d', [D])])


def test_placeholder_stats():
    template = parse_template("Context: {document}\nQuestion: {question}\nAgain: {question} in {language} for {user}\n", 'p')
    types = [PlaceholderType.KNOWLEDGE_INPUT, PlaceholderType.USER_QUESTION, PlaceholderType.USER_QUESTION,
             PlaceholderType.METADATA_SHORT_PHRASE, PlaceholderType.OTHER]
    infos = [
        PlaceholderInfo(p, t, placeholder_position(template, p), C)
        for p, t in zip(template.placeholders, types)
    ]
    stats = placeholder_stats([bundle('p', [C], placeholders=infos, template=template), bundle('q', [D])])

    assert stats.total == 5
    assert stats.name_fraction('question') == pytest.approx(0.4)
    assert stats.names[0] == ('question', 2)
    assert stats.types.fraction_of(PlaceholderType.USER_QUESTION) == pytest.approx(0.5)
    assert sum(stats.positions['UserQuestion'].counts) == 2


def test_constraint_type_distribution():
    findings = [
        ConstraintFinding(0, "Do not lie.", ConstraintType.EXCLUSION),
        ConstraintFinding(1, "Never guess.", ConstraintType.EXCLUSION),
        ConstraintFinding(2, "Keep it under 50 words.", ConstraintType.WORD_COUNT),
    ]
    dist = constraint_type_distribution([bundle('a', [K], constraints=findings)])
    assert dist.counts == (2, 0, 1, 0)
    assert dist.fraction_of(ConstraintType.EXCLUSION) == pytest.approx(2 / 3)


def test_directive_style_distribution():
    corpus = [
        replace(bundle('a', [D]), directive_style=DirectiveStyle.INSTRUCTION),
        replace(bundle('b', [D]), directive_style=DirectiveStyle.INSTRUCTION),
        replace(bundle('c', [D]), directive_style=DirectiveStyle.QUESTION),
        bundle('d', [C]),
    ]
    dist = directive_style_distribution(corpus)
    assert dist.labels == ('Instruction', 'Question')
    assert dist.counts == (2, 1)
    assert dist.denominators == (3, 3)


def test_placeholder_component_distribution():
    template = parse_template("Context: {document}\nQuestion: {question}\nUse {document}\n", 'p')
    types = [PlaceholderType.KNOWLEDGE_INPUT, PlaceholderType.USER_QUESTION, PlaceholderType.KNOWLEDGE_INPUT]
    components = [C, D, D]
    infos = [
        PlaceholderInfo(p, t, placeholder_position(template, p), kind)
        for p, t, kind in zip(template.placeholders, types, components)
    ]
    dists = placeholder_component_distribution([bundle('p', [C, D], placeholders=infos, template=template)])

    assert set(dists) == {'KnowledgeInput', 'UserQuestion'}
    assert dists['KnowledgeInput'].count_of(C) == 1
    assert dists['KnowledgeInput'].count_of(D) == 1
    assert dists['KnowledgeInput'].fraction_of(C) == pytest.approx(0.5)
    assert dists['UserQuestion'].fraction_of(D) == 1.0


EXCLUSIONS = [
    "Do not mention prices.",
    "Never mention prices.",
    "Do not use markdown formatting.",
    "Avoid markdown formatting.",
]


def _exclusion_corpus(sentences):
    return [
        bundle(f"x{i}", [K], constraints=[ConstraintFinding(0, text, ConstraintType.EXCLUSION)])
        for i, text in enumerate(sentences)
    ]


def test_exclusion_clusters():
    settings = default_settings().with_overrides({'taxonomy': {'clustering': {'k': 2}}})
    clusters = exclusion_clusters(_exclusion_corpus(EXCLUSIONS), settings)
    assert clusters.k == 2
    assert clusters.result.assignments[0] == clusters.result.assignments[1]
    assert clusters.result.assignments[2] == clusters.result.assignments[3]

    doc = clusters.to_dict(examples=1)
    assert doc['n_sentences'] == 4
    assert doc['n_clusters'] == 2
    assert not doc['degenerate']
    assert sum(c['size'] for c in doc['clusters']) == 4
    assert all(len(c['examples']) == 1 for c in doc['clusters'])
    assert 'prices' in doc['clusters'][0]['top_terms']


def test_exclusion_clusters_skip_small_corpus():
    settings = default_settings().with_overrides({'taxonomy': {'clustering': {'k': 5}}})
    assert exclusion_clusters(_exclusion_corpus(EXCLUSIONS), settings) is None
    other = [bundle("y", [K], constraints=[ConstraintFinding(0, "Answer in 50 words.", ConstraintType.WORD_COUNT)])]
    assert exclusion_clusters(other * 6, settings) is None


def test_empty_corpus():
    for fn in (component_frequency, transition_matrix, placeholder_stats, canonical_order, build_report):
        with pytest.raises(EmptyCorpus):
            fn([])


def test_report_on_fixture_corpus():
    templates = [parse_template(p.text, p.id) for p in load_corpus(FIXTURES / 'analyze_corpus.jsonl')]
    corpus = analyze_corpus(templates)
    assert analyze_corpus(templates, workers=2) == corpus

    report = build_report(corpus)
    assert report.n_templates == 4
    assert report.ambiguous_spans == 1
    assert ambiguous_span_count(corpus) == 1
    assert report.canonical_order == ['Directive', 'Context', 'OutputFormatStyle', 'Constraints']
    assert report.component_frequency.counts == (2, 4, 0, 3, 0, 2, 3)
    assert report.json_patterns.counts == (1, 0, 1)
    assert report.exclusions is None
    assert report.to_dict()['exclusion_clusters'] is None
    assert term_frequencies(corpus, D, top_k=2) == [('below', 3), ('article', 2)]

    markdown = render_markdown(report_document(report, {'subcommand': 'analyze'}))
    assert 'Directive' in markdown
    assert 'Too few exclusion constraints to cluster.' in markdown
