"""
Détection du motif de format JSON d'une consigne de sortie

NotJson  : aucune mention de JSON
P1       : JSON déclaré, sans noms d'attributs
P2       : JSON + noms d'attributs
P3       : JSON + noms + description d'au moins la moitié des attributs
"""
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..config import Settings, default_settings

_DECLARED = re.compile(r"\bjson\b|```\s*json", re.IGNORECASE)
_BRACE_KEY = re.compile(r"([\"'])([A-Za-z_][A-Za-z0-9_\- ]{0,40}?)\1\s*:")
_QUOTED_NAME = re.compile(r"([\"'`])([A-Za-z_][A-Za-z0-9_]*)\1")
_LIST_KEY = re.compile(
    r"^[ \t]*(?:[-*•]|\d+[.)])[ \t]*[\"'`]?([a-z_][a-z0-9_]*)[\"'`]?[ \t]*(?::|-|–)[ \t]+(.+)$",
    re.MULTILINE,
)
_TYPE_TOKEN = re.compile(
    r"^\s*(string|str|number|integer|int|float|boolean|bool|array|list|object|null|true|false|"
    r"-?\d+(\.\d+)?|\[\s*\]|\{\s*\})(?![A-Za-z])[\s,|]*",
    re.IGNORECASE,
)
_WORD = re.compile(r"[A-Za-z0-9@#']+")


class JsonFormatPattern(str, Enum):
    NOT_JSON = "NotJson"
    P1_JSON_OUTPUT = "P1_JsonOutput"
    P2_PLUS_ATTRIBUTE_NAMES = "P2_PlusAttributeNames"
    P3_PLUS_ATTRIBUTE_DESCRIPTIONS = "P3_PlusAttributeDescriptions"


@dataclass(frozen=True)
class ExpectedJsonSchema:
    """Clés attendues ; described contient la description des clés décrites"""
    required: FrozenSet[str] = frozenset()
    described: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not set(self.described) <= set(self.required):
            raise ValueError("described keys must be a subset of required keys")

    def to_dict(self) -> Dict:
        return {'required': sorted(self.required), 'described': dict(sorted(self.described.items()))}


def _words(text: str) -> List[str]:
    return _WORD.findall(text)


def _brace_depth_before(text: str, pos: int) -> int:
    depth = 0
    for ch in text[:pos]:
        if ch == '{':
            depth += 1
        elif ch == '}':
            depth = max(0, depth - 1)
    return depth


def _block_end(text: str, pos: int) -> int:
    """Position de l'accolade qui ferme le bloc contenant pos"""
    depth = 0
    for i in range(pos, len(text)):
        if text[i] == '{':
            depth += 1
        elif text[i] == '}':
            if depth == 0:
                return i
            depth -= 1
    return len(text)


def _value_description(value: str) -> Optional[str]:
    """Description portée par un emplacement de valeur, ou None"""
    value = value.strip().rstrip(',').strip()
    if not value:
        return None

    if value[0] in '"\'':
        quote = value[0]
        close = value.find(quote, 1)
        if close == -1:
            inner, rest = value[1:], ''
        else:
            inner, rest = value[1:close], value[close + 1:]
        rest = rest.strip().lstrip('/#-–,').strip()
        if len(_words(rest)) >= 2:
            return rest
        if len(_words(inner)) >= 4:
            return inner
        return None

    rest = _TYPE_TOKEN.sub('', value, count=1).strip().lstrip('/#-–,').strip()
    if len(_words(rest)) >= 2:
        return rest
    return None


def _brace_keys(text: str) -> List[Tuple[str, Optional[str]]]:
    matches = [m for m in _BRACE_KEY.finditer(text) if _brace_depth_before(text, m.start()) > 0]
    keys = []
    for i, match in enumerate(matches):
        value_start = match.end()
        value_end = _block_end(text, value_start)
        if i + 1 < len(matches):
            value_end = min(value_end, matches[i + 1].start())
        value = text[value_start:value_end]
        # une valeur objet imbriquée ne décrit pas la clé
        if value.lstrip().startswith('{'):
            keys.append((match.group(2).strip(), None))
        else:
            keys.append((match.group(2).strip(), _value_description(value)))
    return keys


def _collect_keys(text: str) -> List[Tuple[str, Optional[str]]]:
    keys = _brace_keys(text)
    keys += [(m.group(1), m.group(2).strip() if len(_words(m.group(2))) >= 2 else None)
             for m in _LIST_KEY.finditer(text)]
    if not keys:
        keys = [(m.group(2), None) for m in _QUOTED_NAME.finditer(text) if m.group(2).lower() != 'json']

    # première occurrence d'une clé ; une description ultérieure la complète
    merged: Dict[str, Optional[str]] = {}
    for name, description in keys:
        if name not in merged or (merged[name] is None and description):
            merged[name] = description
    return list(merged.items())


def is_json_declared(text: str) -> bool:
    return bool(_DECLARED.search(text))


def extract_schema(output_format_text: str) -> ExpectedJsonSchema:
    """Clés attendues et clés décrites d'une consigne de format"""
    if not is_json_declared(output_format_text):
        return ExpectedJsonSchema()
    keys = _collect_keys(output_format_text)
    return ExpectedJsonSchema(
        required=frozenset(name for name, _ in keys),
        described={name: description for name, description in keys if description},
    )


def detect_json_pattern(output_format_text: str, settings: Optional[Settings] = None) -> JsonFormatPattern:
    """
    Motif JSON d'un texte de format de sortie

    Args:
        output_format_text: Texte des spans OutputFormatStyle (ou du template entier)
        settings: Réglages (taxonomy.json.description_threshold)
    """
    settings = settings or default_settings()
    if not is_json_declared(output_format_text):
        return JsonFormatPattern.NOT_JSON

    schema = extract_schema(output_format_text)
    if not schema.required:
        return JsonFormatPattern.P1_JSON_OUTPUT

    threshold = settings.get('taxonomy.json.description_threshold', 0.5)
    if len(schema.described) >= threshold * len(schema.required):
        return JsonFormatPattern.P3_PLUS_ATTRIBUTE_DESCRIPTIONS
    return JsonFormatPattern.P2_PLUS_ATTRIBUTE_NAMES
