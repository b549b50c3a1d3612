import pytest
from hypothesis import given
from hypothesis import strategies as st
from jsonschema import Draft202012Validator

from conftest import FIXTURES, schema_validator
from lib.errors import CorpusFormatError, MissingMetadata
from lib.ingest import (
    DatasetRecord, FilterPolicy, MetadataClient, dedupe, filter_records, is_english, load_corpus, load_dataset,
    normalize_prompt, parse_timestamp, split_multiprompt, write_corpus,
)

DATASET = FIXTURES / 'ingest_dataset.jsonl'


def offline_client():
    return MetadataClient(offline_dir=FIXTURES / 'repos', cache_dir='')


def test_trace_on_fixture_dataset():
    templates, trace = filter_records(load_dataset(DATASET), metadata_client=offline_client())

    assert trace.outputs == (20, 14, 17, 15, 12, 7)
    assert trace.stages[0].input == 20
    assert [s.name for s in trace.stages] == [
        'non_empty_english', 'stars_recency', 'split', 'dedupe', 'min_tokens', 'is_template',
    ]
    assert trace.dropped_missing_metadata == 2
    assert [t.id for t in templates] == ['r01-0', 'r02-0', 'r03-0', 'r04-0', 'r09-0', 'r10-0', 'r12-0']
    assert templates[3].text == "Translate {text} into French for the user."


def test_trace_document_matches_schema():
    _, trace = filter_records(load_dataset(DATASET))
    document = trace.to_dict()
    trace_schema = schema_validator('ingest_trace.schema.json').schema['properties']['trace']
    Draft202012Validator(trace_schema).validate(document)
    assert document['reference_time'] == '2024-06-20T00:00:00+00:00'


def test_stage_counts_chain_and_shrink():
    _, trace = filter_records(load_dataset(DATASET))
    for previous, stage in zip(trace.stages, trace.stages[1:]):
        assert stage.input == previous.output
    for stage in trace.stages:
        if stage.name != 'split':
            assert stage.output <= stage.input


def test_reference_time_controls_recency():
    _, trace = filter_records(load_dataset(DATASET), reference_time='2025-06-20T00:00:00Z')
    assert trace.outputs == (20, 0, 0, 0, 0, 0)


def test_strict_mode_rejects_missing_metadata():
    with pytest.raises(MissingMetadata) as info:
        filter_records(load_dataset(DATASET), FilterPolicy(strict=True))
    assert info.value.record_id == 'r19'


def test_metadata_client_fills_missing_fields():
    records = [
        DatasetRecord('a', 'octo/prompt-kit', ("Summarize {document} for the team today.",)),
        DatasetRecord('b', 'acme/tiny-bot', ("Translate {text} into German for the team.",)),
    ]
    templates, trace = filter_records(records, metadata_client=offline_client())
    assert [t.id for t in templates] == ['a-0']
    assert templates[0].stars == 42
    assert templates[0].pushed_at == parse_timestamp('2024-05-01T00:00:00Z')
    assert trace.dropped_missing_metadata == 0


def test_policy_from_settings_overrides(settings):
    policy = FilterPolicy.from_settings(settings, min_stars=50, strict=None)
    assert policy.min_stars == 50
    assert policy.strict is False
    assert policy.min_tokens == 5


def test_split_multiprompt():
    record = DatasetRecord('r1', 'o/n', ("first {a}", "second {b}"), 10)
    parts = split_multiprompt(record)
    assert [p.id for p in parts] == ['r1-0', 'r1-1']
    assert [p.text for p in parts] == ["first {a}", "second {b}"]
    assert all(p.stars == 10 and p.repo == 'o/n' for p in parts)


def test_dedupe_normalizes_whitespace_only():
    assert dedupe(["a  b", "a b", " a b ", "A b"]) == ["a  b", "A b"]
    assert normalize_prompt("  Summarize\n\t{x}  ") == "Summarize {x}"


@given(st.lists(st.text(alphabet='ab \n', max_size=6), max_size=12))
def test_dedupe_is_idempotent(items):
    once = dedupe(items)
    assert dedupe(once) == once
    assert len({normalize_prompt(i) for i in items}) == len(once)


@pytest.mark.parametrize('text, expected', [
    ("Summarize {article} please.", True),
    ("请总结以下内容 {text}", False),
    ("Résumé du texte", False),
    ("1234 5678", False),
])
def test_is_english(text, expected):
    assert is_english(text) is expected


def test_load_dataset_accepts_text_field(tmp_path):
    path = tmp_path / 'data.jsonl'
    path.write_text('{"id": "x", "repo": "o/n", "text": "Hello {name}", "stars": 3}\n\n', encoding='utf-8')
    [record] = load_dataset(path)
    assert record.prompts == ("Hello {name}",)
    assert record.pushed_at is None


@pytest.mark.parametrize('second_line', [
    '{"id": "b", "prompts": [',
    '{"id": "a", "prompts": ["dup"]}',
    '{"id": "b", "prompts": ["x"], "stars": -1}',
    '{"id": "b", "prompts": "not a list"}',
    '["not", "an", "object"]',
])
def test_load_dataset_reports_line_number(tmp_path, second_line):
    path = tmp_path / 'data.jsonl'
    path.write_text('{"id": "a", "prompts": ["ok"]}\n' + second_line + '\n', encoding='utf-8')
    with pytest.raises(CorpusFormatError) as info:
        load_dataset(path)
    assert info.value.line_number == 2


def test_write_corpus_roundtrip(tmp_path):
    templates, _ = filter_records(load_dataset(DATASET))
    path = tmp_path / 'out' / 'corpus.jsonl'
    assert write_corpus(path, templates) == 7
    loaded = load_corpus(path)
    assert [p.id for p in loaded] == [t.id for t in templates]
    assert loaded[0].text == templates[0].text
