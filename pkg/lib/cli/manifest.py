"""
Manifest embarqué dans chaque rapport émis par la CLI
"""
import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .. import __version__
from ..config import Settings
from ..ingest import format_timestamp, parse_timestamp

TIMESTAMP_ENV = 'PROMPTLINT_TIMESTAMP'


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def resolve_timestamp(value: Optional[str] = None) -> str:
    """--timestamp, puis PROMPTLINT_TIMESTAMP, puis l'horloge (UTC, à la seconde)"""
    value = value or os.getenv(TIMESTAMP_ENV)
    if value:
        return format_timestamp(parse_timestamp(value))
    return format_timestamp(datetime.now(timezone.utc).replace(microsecond=0))


@dataclass(frozen=True)
class RunManifest:
    tool_version: str
    config_hash: str
    subcommand: str
    generated_at: str
    inputs: List[Dict[str, str]] = field(default_factory=list)
    seeds: Dict[str, int] = field(default_factory=dict)
    live_provider: bool = False

    @classmethod
    def create(cls, subcommand: str, settings: Settings, inputs: Sequence = (),
               timestamp: Optional[str] = None, live_provider: bool = False) -> 'RunManifest':
        """
        Args:
            subcommand: lint | analyze | ingest | eval
            settings: Configuration effective (hachée)
            inputs: Fichiers lus ; seuls le nom et le SHA-256 sont gardés
            timestamp: Horodatage figé optionnel
            live_provider: Vrai si un fournisseur réel a été appelé (rapport non reproductible)
        """
        return cls(
            tool_version=__version__,
            config_hash=settings.config_hash(),
            subcommand=subcommand,
            generated_at=resolve_timestamp(timestamp),
            inputs=[{'name': Path(p).name, 'sha256': file_digest(p)} for p in inputs],
            seeds={'clustering': settings.get('taxonomy.clustering.seed', 42)},
            live_provider=live_provider,
        )

    def to_dict(self) -> Dict:
        return {
            'tool_version': self.tool_version,
            'config_hash': self.config_hash,
            'subcommand': self.subcommand,
            'generated_at': self.generated_at,
            'inputs': list(self.inputs),
            'seeds': dict(self.seeds),
            'live_provider': self.live_provider,
        }
