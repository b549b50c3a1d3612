"""
Configuration de PromptLint

Ordre de priorité : options CLI > fichier utilisateur (JSON ou TOML) > défauts
intégrés dans config/promptlint.json. Les secrets passent par l'environnement
(.env chargé via python-dotenv).
"""
import copy
import hashlib
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from .errors import ConfigError

logger = logging.getLogger(__name__)

# Chemin vers les défauts intégrés
DEFAULT_CONFIG_FILE = Path(__file__).parent.parent / 'config' / 'promptlint.json'


def deep_merge(base: Dict, override: Dict) -> Dict:
    """
    Fusionne récursivement override dans une copie de base

    Les valeurs None de override sont ignorées (option CLI non fournie).
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(path) -> Dict:
    """
    Lit un fichier de configuration JSON ou TOML

    Args:
        path: Chemin du fichier (.json ou .toml)

    Returns:
        Dict de configuration
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == '.toml':
            with open(path, 'rb') as f:
                data = tomllib.load(f)
        else:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level value must be an object")
    logger.debug(f"📂 Configuration chargée depuis {path}")
    return data


class Settings:
    """Configuration effective, en lecture seule"""

    def __init__(self, data: Dict):
        self._data = data
        self._hash: Optional[str] = None

    @classmethod
    def load(cls, path=None, overrides: Optional[Dict] = None) -> 'Settings':
        """
        Construit la configuration effective

        Args:
            path: Fichier utilisateur optionnel
            overrides: Valeurs issues des options CLI (les None sont ignorés)
        """
        load_dotenv()
        data = read_config_file(DEFAULT_CONFIG_FILE)
        if path:
            data = deep_merge(data, read_config_file(path))
        if overrides:
            data = deep_merge(data, overrides)
        return cls(data)

    def with_overrides(self, overrides: Dict) -> 'Settings':
        return Settings(deep_merge(self._data, overrides))

    def section(self, name: str) -> Dict:
        """Retourne une copie d'une section de premier niveau"""
        return copy.deepcopy(self._data.get(name, {}))

    def get(self, dotted: str, default: Any = None) -> Any:
        """Lecture pointée, ex: settings.get('lint.fail_level')"""
        node = self._data
        for part in dotted.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return copy.deepcopy(node)

    def to_dict(self) -> Dict:
        return copy.deepcopy(self._data)

    def config_hash(self) -> str:
        """SHA-256 de la configuration canonique (clés triées)"""
        if self._hash is None:
            canonical = json.dumps(self._data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)
            self._hash = hashlib.sha256(canonical.encode('utf-8')).hexdigest()
        return self._hash


@lru_cache(maxsize=1)
def default_settings() -> Settings:
    """Défauts intégrés seuls (sans .env ni fichier utilisateur)"""
    return Settings(read_config_file(DEFAULT_CONFIG_FILE))
