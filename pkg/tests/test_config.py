import pytest

from lib.config import Settings, deep_merge, default_settings, read_config_file
from lib.errors import ConfigError


def test_deep_merge_ignores_none():
    base = {'lint': {'fail_level': 'warning', 'rules': {'R1': {'enabled': True}}}, 'seed': 1}
    merged = deep_merge(base, {'lint': {'fail_level': None, 'rules': {'R1': {'enabled': False}}}, 'seed': None})
    assert merged == {'lint': {'fail_level': 'warning', 'rules': {'R1': {'enabled': False}}}, 'seed': 1}
    assert base['lint']['rules']['R1']['enabled'] is True


def test_defaults():
    settings = default_settings()
    assert settings.get('lint.fail_level') == 'warning'
    assert settings.get('ingest.min_stars') == 5
    assert settings.get('taxonomy.clustering.seed') == 42
    assert settings.get('no.such.key', 'x') == 'x'


def test_user_file_json_and_toml(tmp_path):
    json_file = tmp_path / 'user.json'
    json_file.write_text('{"ingest": {"min_stars": 50}}', encoding='utf-8')
    assert Settings.load(json_file).get('ingest.min_stars') == 50

    toml_file = tmp_path / 'user.toml'
    toml_file.write_text('[lint]\nfail_level = "error"\n', encoding='utf-8')
    settings = Settings.load(toml_file, {'lint': {'fail_level': 'info'}})
    assert settings.get('lint.fail_level') == 'info'
    assert Settings.load(toml_file).get('lint.fail_level') == 'error'


@pytest.mark.parametrize('name, content', [
    ('broken.json', '{"lint": '),
    ('broken.toml', '[lint\n'),
    ('list.json', '[1, 2]'),
])
def test_invalid_files(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content, encoding='utf-8')
    with pytest.raises(ConfigError):
        read_config_file(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        Settings.load(tmp_path / 'absent.json')


def test_config_hash():
    first = Settings.load()
    assert first.config_hash() == default_settings().config_hash()
    assert len(first.config_hash()) == 64
    assert first.with_overrides({'ingest': {'min_stars': 6}}).config_hash() != first.config_hash()
    assert first.with_overrides({'ingest': {'min_stars': None}}).config_hash() == first.config_hash()


def test_accessors_return_copies():
    settings = default_settings()
    section = settings.section('lint')
    section['fail_level'] = 'info'
    assert settings.get('lint.fail_level') == 'warning'
