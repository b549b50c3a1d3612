"""
Pipeline de filtrage du dataset en six étapes

1. prompts non vides et en anglais   (compte : enregistrements)
2. étoiles et récence du dépôt       (compte : enregistrements)
3. éclatement multi-prompts          (compte : prompts)
4. dédoublonnage normalisé
5. nombre minimal de tokens
6. présence d'au moins un placeholder
"""
import logging
import unicodedata
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from ..config import Settings, default_settings
from ..errors import MissingMetadata, PromptLintError
from ..template import is_template, token_count
from .records import DatasetRecord, format_timestamp, parse_timestamp

logger = logging.getLogger(__name__)

NORMALIZATION = "NFC + trim + collapse whitespace (case-sensitive)"

_CJK_RANGES = (
    (0x3040, 0x30FF),   # kana
    (0x3400, 0x4DBF),   # CJK ext. A
    (0x4E00, 0x9FFF),   # CJK unifié
    (0xAC00, 0xD7AF),   # hangul
    (0xF900, 0xFAFF),   # compatibilité CJK
)


@dataclass(frozen=True)
class FilterPolicy:
    min_stars: int = 5
    max_age_days: int = 365
    min_tokens: int = 5
    english_ascii_ratio: float = 0.9
    strict: bool = False

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> 'FilterPolicy':
        config = (settings or default_settings()).section('ingest')
        values = {name: config[name] for name in cls.__dataclass_fields__ if name in config}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class StageCount:
    name: str
    input: int
    output: int


@dataclass
class FilterTrace:
    stages: List[StageCount] = field(default_factory=list)
    dropped_missing_metadata: int = 0
    reference_time: Optional[datetime] = None

    def add(self, name: str, count_in: int, count_out: int):
        self.stages.append(StageCount(name, count_in, count_out))
        logger.info(f"Étape {name}: {count_in} -> {count_out}")

    @property
    def outputs(self) -> Tuple[int, ...]:
        return tuple(s.output for s in self.stages)

    def to_dict(self) -> Dict:
        return {
            'normalization': NORMALIZATION,
            'reference_time': format_timestamp(self.reference_time),
            'dropped_missing_metadata': self.dropped_missing_metadata,
            'stages': [{'name': s.name, 'input': s.input, 'output': s.output} for s in self.stages],
        }

    def table(self) -> str:
        """Table texte pour la sortie CLI"""
        width = max([len(s.name) for s in self.stages] + [5])
        lines = [f"{'stage':<{width}}  {'in':>6}  {'out':>6}"]
        lines += [f"{s.name:<{width}}  {s.input:>6}  {s.output:>6}" for s in self.stages]
        if self.dropped_missing_metadata:
            lines.append(f"(missing metadata dropped: {self.dropped_missing_metadata})")
        return '\n'.join(lines)


def normalize_prompt(text: str) -> str:
    return unicodedata.normalize('NFC', ' '.join(text.split()))


def is_english(text: str, ascii_ratio: float = 0.9) -> bool:
    """Au moins ascii_ratio des lettres en ASCII et aucun caractère CJK"""
    if any(lo <= ord(ch) <= hi for ch in text for lo, hi in _CJK_RANGES):
        return False
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return False
    return sum(1 for ch in letters if ch.isascii()) / len(letters) >= ascii_ratio


def split_multiprompt(record: DatasetRecord) -> List[DatasetRecord]:
    """Un enregistrement par prompt, id suffixé par l'ordinal, métadonnées héritées"""
    return [replace(record, id=f"{record.id}-{i}", prompts=(prompt,)) for i, prompt in enumerate(record.prompts)]


def dedupe(items: Iterable, key: Optional[Callable] = None) -> List:
    """
    Garde la première occurrence de chaque texte normalisé, ordre conservé

    Args:
        items: Chaînes, ou objets si key est fourni
        key: Extraction du texte (ex: lambda r: r.text)
    """
    seen = set()
    unique = []
    for item in items:
        normalized = normalize_prompt(key(item) if key else item)
        if normalized not in seen:
            seen.add(normalized)
            unique.append(item)
    return unique


def _fill_metadata(records: List[DatasetRecord], metadata_client) -> List[DatasetRecord]:
    incomplete = [r.repo for r in records if (r.stars is None or r.pushed_at is None) and r.repo]
    if not incomplete or metadata_client is None:
        return records
    fetched = metadata_client.fetch_many(incomplete)
    filled = []
    for record in records:
        metadata = fetched.get(record.repo)
        if metadata is not None and not isinstance(metadata, PromptLintError):
            record = record.with_metadata(metadata)
        filled.append(record)
    return filled


def filter_records(records: List[DatasetRecord], policy: Optional[FilterPolicy] = None,
                   reference_time=None, metadata_client=None,
                   settings: Optional[Settings] = None) -> Tuple[List[DatasetRecord], FilterTrace]:
    """
    Applique les six étapes de filtrage

    Args:
        records: Enregistrements bruts
        policy: Seuils (défaut : section ingest)
        reference_time: Horloge figée (défaut : ingest.reference_time)
        metadata_client: MetadataClient pour compléter étoiles / date manquantes
        settings: Réglages

    Returns:
        (templates conservés, un prompt par enregistrement ; trace des étapes)

    Raises:
        MissingMetadata: métadonnées absentes en mode strict
    """
    settings = settings or default_settings()
    policy = policy or FilterPolicy.from_settings(settings)
    reference_time = parse_timestamp(reference_time or settings.get('ingest.reference_time'))
    trace = FilterTrace(reference_time=reference_time)

    # 1. non vide + anglais
    stage = []
    for record in records:
        prompts = tuple(p for p in record.prompts if p.strip() and is_english(p, policy.english_ascii_ratio))
        if prompts:
            stage.append(replace(record, prompts=prompts))
    trace.add('non_empty_english', len(records), len(stage))

    # 2. étoiles + récence
    count_in = len(stage)
    stage = _fill_metadata(stage, metadata_client)
    max_age = timedelta(days=policy.max_age_days)
    kept = []
    for record in stage:
        if record.stars is None or record.pushed_at is None:
            if policy.strict:
                raise MissingMetadata(record.id)
            trace.dropped_missing_metadata += 1
            continue
        if record.stars >= policy.min_stars and reference_time - record.pushed_at <= max_age:
            kept.append(record)
    if trace.dropped_missing_metadata:
        logger.warning(f"⚠️ {trace.dropped_missing_metadata} enregistrement(s) sans métadonnées ignorés")
    trace.add('stars_recency', count_in, len(kept))

    # 3. éclatement
    prompts = [single for record in kept for single in split_multiprompt(record)]
    trace.add('split', len(kept), len(prompts))

    # 4. doublons
    unique = dedupe(prompts, key=lambda r: r.text)
    trace.add('dedupe', len(prompts), len(unique))

    # 5. longueur
    long_enough = [r for r in unique if token_count(r.text) >= policy.min_tokens]
    trace.add('min_tokens', len(unique), len(long_enough))

    # 6. templates
    templates = [r for r in long_enough if is_template(r.text)]
    trace.add('is_template', len(long_enough), len(templates))

    logger.info(f"✅ Pipeline terminé : {len(templates)} templates sur {len(records)} enregistrements")
    return templates, trace
