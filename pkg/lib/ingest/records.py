"""
Enregistrements du dataset et lecture / écriture JSON Lines
"""
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from ..errors import CorpusFormatError
from ..template import RawPrompt

logger = logging.getLogger(__name__)


def parse_timestamp(value) -> Optional[datetime]:
    """Timestamp RFC 3339 -> datetime (UTC si aucun fuseau)"""
    if value in (None, ''):
        return None
    if isinstance(value, datetime):
        return value
    parsed = datetime.fromisoformat(str(value).replace('Z', '+00:00'))
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def format_timestamp(value: Optional[datetime]) -> Optional[str]:
    return value.isoformat() if value else None


@dataclass(frozen=True)
class RepoMetadata:
    repo: str
    stars: int
    pushed_at: Optional[datetime] = None

    def __post_init__(self):
        if self.stars < 0:
            raise ValueError(f"negative star count for {self.repo}")

    def to_dict(self):
        return {'repo': self.repo, 'stars': self.stars, 'pushed_at': format_timestamp(self.pushed_at)}


@dataclass(frozen=True)
class DatasetRecord:
    """Enregistrement brut : un dépôt, un ou plusieurs prompts"""
    id: str
    repo: str = ""
    prompts: Tuple[str, ...] = field(default=())
    stars: Optional[int] = None
    pushed_at: Optional[datetime] = None

    @property
    def text(self) -> str:
        """Texte d'un enregistrement mono-prompt"""
        return self.prompts[0] if self.prompts else ""

    def with_metadata(self, metadata: RepoMetadata) -> 'DatasetRecord':
        return replace(
            self,
            stars=self.stars if self.stars is not None else metadata.stars,
            pushed_at=self.pushed_at if self.pushed_at is not None else metadata.pushed_at,
        )

def _iter_jsonl(path: Path) -> Iterable[Tuple[int, dict]]:
    with open(path, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(path, line_number, f"invalid JSON: {e.msg}") from e
            if not isinstance(obj, dict):
                raise CorpusFormatError(path, line_number, "line is not a JSON object")
            yield line_number, obj


def load_dataset(path) -> List[DatasetRecord]:
    """
    Lit un dataset JSONL : {"id", "repo", "prompts" | "text", "stars"?, "pushed_at"?}

    Raises:
        CorpusFormatError: ligne invalide (numéro de ligne inclus)
    """
    path = Path(path)
    records = []
    seen = set()
    for line_number, obj in _iter_jsonl(path):
        try:
            record_id = str(obj['id'])
            prompts = obj['prompts'] if 'prompts' in obj else [obj['text']]
            if not isinstance(prompts, list) or not all(isinstance(p, str) for p in prompts):
                raise ValueError("prompts must be a list of strings")
            stars = obj.get('stars')
            if stars is not None and (not isinstance(stars, int) or stars < 0):
                raise ValueError("stars must be a non-negative integer")
            pushed_at = parse_timestamp(obj.get('pushed_at'))
        except (KeyError, ValueError, TypeError) as e:
            raise CorpusFormatError(path, line_number, str(e)) from e
        if record_id in seen:
            raise CorpusFormatError(path, line_number, f"duplicate id '{record_id}'")
        seen.add(record_id)
        records.append(DatasetRecord(record_id, obj.get('repo', ''), tuple(prompts), stars, pushed_at))

    logger.info(f"📂 {len(records)} enregistrements lus depuis {path.name}")
    return records


def load_corpus(path) -> List[RawPrompt]:
    """Lit un corpus JSONL de templates : {"id", "text", ...}"""
    path = Path(path)
    prompts = []
    seen = set()
    for line_number, obj in _iter_jsonl(path):
        text = obj.get('text')
        if 'id' not in obj or not isinstance(text, str) or not text.strip():
            raise CorpusFormatError(path, line_number, "expected non-empty 'id' and 'text' fields")
        if obj['id'] in seen:
            raise CorpusFormatError(path, line_number, f"duplicate id '{obj['id']}'")
        seen.add(obj['id'])
        prompts.append(RawPrompt(id=str(obj['id']), source=str(path), text=text))
    logger.info(f"📂 {len(prompts)} templates lus depuis {path.name}")
    return prompts


def write_corpus(path, records: Iterable[DatasetRecord]) -> int:
    """Écrit les enregistrements mono-prompt au format corpus ; retourne le nombre de lignes"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8') as f:
        for record in records:
            obj = {'id': record.id, 'text': record.text, 'repo': record.repo}
            if record.stars is not None:
                obj['stars'] = record.stars
            if record.pushed_at is not None:
                obj['pushed_at'] = format_timestamp(record.pushed_at)
            f.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + '\n')
            count += 1
    logger.info(f"💾 {count} templates écrits dans {path}")
    return count
