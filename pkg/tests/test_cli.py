import json
import shutil

import pytest

from conftest import FIXTURES, GOLDEN, schema_validator
from lib import __version__
from lib.cli import EXIT_ERROR, EXIT_LINT, EXIT_OK, main
from lib.config import default_settings

TIMESTAMP = '2024-06-20T00:00:00+00:00'
LINT_DIR = GOLDEN / 'lint'
EVAL = FIXTURES / 'eval'


def run(*argv):
    return main(['--timestamp', TIMESTAMP, *map(str, argv)])


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv('NO_COLOR', '1')


def test_version(capsys):
    assert main(['--version']) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_unknown_subcommand():
    assert main(['frobnicate']) == EXIT_ERROR


def test_lint_exit_codes(capsys):
    assert run('lint', LINT_DIR / 'l01_clean.txt') == EXIT_OK
    assert capsys.readouterr().out == ''

    assert run('lint', LINT_DIR / 'l04_no_exclusion.txt') == EXIT_LINT
    assert ' warning R3 ' in capsys.readouterr().out

    assert run('lint', '--fail-level', 'error', LINT_DIR / 'l04_no_exclusion.txt') == EXIT_OK
    assert run('lint', '--fail-level', 'info', LINT_DIR / 'l07_question.txt') == EXIT_LINT
    assert run('lint', LINT_DIR / 'l07_question.txt') == EXIT_OK


def test_lint_missing_path(capsys, tmp_path):
    assert run('lint', tmp_path / 'nope.txt') == EXIT_ERROR
    assert 'nope.txt' in capsys.readouterr().err


def test_lint_directory_json(capsys):
    paths = sorted(LINT_DIR.glob('l*.txt'))
    assert run('lint', '--format', 'json', *paths) == EXIT_LINT
    document = json.loads(capsys.readouterr().out)
    schema_validator('lint_diagnostics.schema.json').validate(document)

    assert len(document['files']) == 13
    assert document['manifest']['subcommand'] == 'lint'
    assert document['manifest']['generated_at'] == TIMESTAMP
    assert document['summary'] == {'error': 0, 'warning': 8, 'info': 8}


def test_lint_fix_writes_backup(tmp_path, capsys):
    target = tmp_path / 'prompt.txt'
    shutil.copyfile(LINT_DIR / 'l02_json_output.txt', target)
    original = target.read_text(encoding='utf-8')

    assert run('lint', '--fix', target) == EXIT_LINT
    out = capsys.readouterr().out
    assert ' R1 ' in out
    assert ' R3 ' not in out

    assert (tmp_path / 'prompt.txt.bak').read_text(encoding='utf-8') == original
    assert "Do not provide any other output text beyond the JSON string." in target.read_text(encoding='utf-8')


def test_analyze_matches_golden(tmp_path):
    assert run('analyze', FIXTURES / 'analyze_corpus.jsonl', '-o', tmp_path) == EXIT_OK

    expected = (GOLDEN / 'analyze' / 'report.json').read_text(encoding='utf-8')
    expected = expected.replace('@CONFIG_HASH@', default_settings().config_hash())
    actual = (tmp_path / 'report.json').read_text(encoding='utf-8')
    assert actual == expected

    schema_validator('corpus_report.schema.json').validate(json.loads(actual))
    assert (tmp_path / 'report.md').read_text(encoding='utf-8').startswith("# PromptLint corpus report")


def test_analyze_is_reproducible(tmp_path):
    assert run('analyze', FIXTURES / 'analyze_corpus.jsonl', '-o', tmp_path / 'a') == EXIT_OK
    assert run('analyze', FIXTURES / 'analyze_corpus.jsonl', '-o', tmp_path / 'b', '--workers', '3') == EXIT_OK
    first, second = (json.loads((tmp_path / d / 'report.json').read_text(encoding='utf-8')) for d in 'ab')
    first.pop('manifest')
    second.pop('manifest')
    assert first == second


def test_analyze_with_llm_segmenter(tmp_path):
    corpus = tmp_path / 'corpus.jsonl'
    corpus.write_text(json.dumps({'id': 'one', 'text': "You are a helpful assistant.\nSummarize {article}.\n"}) + '\n',
                      encoding='utf-8')
    responses = tmp_path / 'labels.json'
    reply = {'ProfileRole': "You are a helpful assistant.", 'Constraints': "Summarize {article}."}
    responses.write_text(json.dumps({'*': json.dumps(reply)}), encoding='utf-8')

    code = run('analyze', corpus, '--segmenter', 'llm', '--labeler-mock', responses, '-o', tmp_path / 'out')
    assert code == EXIT_OK
    document = json.loads((tmp_path / 'out' / 'report.json').read_text(encoding='utf-8'))
    assert document['component_frequency']['counts'] == [1, 0, 0, 0, 0, 0, 1]
    assert document['manifest']['live_provider'] is False


def test_lint_llm_segmenter_without_endpoint(capsys):
    assert run('lint', '--segmenter', 'llm', LINT_DIR / 'l01_clean.txt') == EXIT_ERROR
    assert 'endpoint' in capsys.readouterr().err


def test_analyze_clusters_option(tmp_path):
    assert run('analyze', FIXTURES / 'analyze_corpus.jsonl', '--clusters', '2', '-o', tmp_path) == EXIT_OK
    document = json.loads((tmp_path / 'report.json').read_text(encoding='utf-8'))
    schema_validator('corpus_report.schema.json').validate(document)
    clusters = document['exclusion_clusters']
    assert clusters['k'] == 2
    assert clusters['n_sentences'] == 2
    assert sum(c['size'] for c in clusters['clusters']) == 2
    assert '### Exclusion constraint clusters' in (tmp_path / 'report.md').read_text(encoding='utf-8')


def test_analyze_empty_corpus(tmp_path, capsys):
    corpus = tmp_path / 'empty.jsonl'
    corpus.write_text('\n', encoding='utf-8')
    assert run('analyze', corpus, '-o', tmp_path / 'out') == EXIT_ERROR
    assert 'no template' in capsys.readouterr().err


def test_ingest_writes_corpus_and_trace(tmp_path):
    output = tmp_path / 'corpus.jsonl'
    code = run('ingest', FIXTURES / 'ingest_dataset.jsonl', '-o', output, '--offline', FIXTURES / 'repos')
    assert code == EXIT_OK

    assert len(output.read_text(encoding='utf-8').splitlines()) == 7
    trace = json.loads((tmp_path / 'corpus.trace.json').read_text(encoding='utf-8'))
    schema_validator('ingest_trace.schema.json').validate(trace)
    assert [s['output'] for s in trace['trace']['stages']] == [20, 14, 17, 15, 12, 7]
    assert trace['manifest']['inputs'][0]['name'] == 'ingest_dataset.jsonl'


def test_ingest_strict_missing_metadata(tmp_path, capsys):
    code = run('ingest', FIXTURES / 'ingest_dataset.jsonl', '-o', tmp_path / 'c.jsonl',
               '--offline', FIXTURES / 'repos', '--strict')
    assert code == EXIT_ERROR
    assert 'r19' in capsys.readouterr().err


def test_ingest_threshold_options(tmp_path):
    output = tmp_path / 'corpus.jsonl'
    code = run('ingest', FIXTURES / 'ingest_dataset.jsonl', '-o', output,
               '--offline', FIXTURES / 'repos', '--min-stars', '100')
    assert code == EXIT_OK
    trace = json.loads((tmp_path / 'corpus.trace.json').read_text(encoding='utf-8'))
    assert trace['policy']['min_stars'] == 100
    assert trace['trace']['stages'][1]['output'] == 2


def test_eval_with_mock_provider(tmp_path, capsys):
    code = run('eval', EVAL / 'summary_p1.txt', EVAL / 'summary_p3.txt',
               '--bindings', EVAL / 'bindings.json', '--mock', EVAL / 'responses.json', '-o', tmp_path)
    assert code == EXIT_OK
    assert 'summary_p3' in capsys.readouterr().out

    document = json.loads((tmp_path / 'eval_report.json').read_text(encoding='utf-8'))
    schema_validator('eval_report.schema.json').validate(document)
    assert document['manifest']['live_provider'] is False
    assert [v['binary_rate'] for v in document['variants']] == [0.333333, 1.0]
    assert (tmp_path / 'eval_report.md').exists()


def test_eval_positioning(tmp_path):
    code = run('eval', EVAL / 'rag.txt', '--positioning', '--bindings', EVAL / 'rag_bindings.json',
               '--mock', EVAL / 'rag_responses.json', '-o', tmp_path)
    assert code == EXIT_OK
    document = json.loads((tmp_path / 'eval_report.json').read_text(encoding='utf-8'))
    assert [v['tag'] for v in document['variants']] == ['instruction-first', 'placeholder-first']


def test_eval_missing_binding(tmp_path, capsys):
    bindings = tmp_path / 'bindings.json'
    bindings.write_text('{"x": {"text": "hello"}}', encoding='utf-8')
    code = run('eval', EVAL / 'summary_p1.txt', '--bindings', bindings, '--mock', EVAL / 'responses.json',
               '-o', tmp_path / 'out')
    assert code == EXIT_ERROR
    assert "'article'" in capsys.readouterr().err


def test_eval_without_endpoint(tmp_path, capsys):
    code = run('eval', EVAL / 'summary_p1.txt', '--bindings', EVAL / 'bindings.json', '-o', tmp_path)
    assert code == EXIT_ERROR
    assert 'endpoint' in capsys.readouterr().err


def test_explain(capsys):
    assert main(['explain', 'R4']) == EXIT_OK
    assert capsys.readouterr().out.startswith("R4 (warning)")
    assert main(['explain', 'R99']) == EXIT_ERROR
