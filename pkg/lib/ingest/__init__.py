"""
Module ingest : filtrage du dataset de prompts et métadonnées de dépôts
"""
from .records import (
    DatasetRecord, RepoMetadata, format_timestamp, load_corpus, load_dataset, parse_timestamp, write_corpus,
)
from .pipeline import (
    NORMALIZATION, FilterPolicy, FilterTrace, StageCount, dedupe, filter_records, is_english,
    normalize_prompt, split_multiprompt,
)
from .metadata import MetadataClient, cache_file_name, fetch_repo_metadata

__all__ = [
    'DatasetRecord', 'RepoMetadata', 'format_timestamp', 'load_corpus', 'load_dataset', 'parse_timestamp',
    'write_corpus',
    'NORMALIZATION', 'FilterPolicy', 'FilterTrace', 'StageCount', 'dedupe', 'filter_records', 'is_english',
    'normalize_prompt', 'split_multiprompt',
    'MetadataClient', 'cache_file_name', 'fetch_repo_metadata',
]
