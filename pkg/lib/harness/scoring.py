"""
Mesure du respect du format JSON

Le score binaire vaut 1 quand la sortie n'est qu'un objet JSON (une paire de
fences ``` tolérée). Le score gradué (1 à 5) est un barème automatique qui
approxime une évaluation humaine de la cohérence des sorties ; il ne se
compare pas à des notes humaines.
"""
import json
import re
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from ..config import Settings, default_settings
from ..errors import NoOutputs
from ..taxonomy import ExpectedJsonSchema

_FENCE = re.compile(r"```[A-Za-z0-9_+-]*[ \t]*\n?(.*?)\n?[ \t]*```", re.DOTALL)


def _is_json(candidate: str) -> bool:
    try:
        json.loads(candidate)
    except (json.JSONDecodeError, RecursionError):
        return False
    return True


def extract_json(output: str) -> Tuple[str, bool]:
    """
    Isole le candidat JSON d'une sortie

    Une sortie déjà valide est prise telle quelle, même si une valeur contient
    des fences. Une paire de fences n'est retirée que si elle englobe toute la
    sortie ; sinon le premier bloc fencé qui se parse est retenu, entouré de texte.

    Returns:
        (candidat, vrai si du texte non blanc entoure le bloc fencé)
    """
    stripped = output.strip()
    if _is_json(stripped):
        return stripped, False
    whole = _FENCE.fullmatch(stripped)
    if whole:
        return whole.group(1).strip(), False
    for inner in _FENCE.finditer(stripped):
        if _is_json(inner.group(1).strip()):
            return inner.group(1).strip(), True
    return stripped, False


def _parse_object(candidate: str) -> Optional[Dict]:
    try:
        value = json.loads(candidate)
    except (json.JSONDecodeError, RecursionError):
        return None
    return value if isinstance(value, dict) else None


def binary_format_following(output: str, schema: Optional[ExpectedJsonSchema] = None) -> int:
    """1 si la sortie est uniquement un objet JSON ; les clés ne sont pas vérifiées"""
    candidate, surrounded = extract_json(output)
    return int(not surrounded and _parse_object(candidate) is not None)


@dataclass(frozen=True)
class OutputCheck:
    parsed: bool
    keys: Tuple[str, ...] = ()
    extra_keys: Tuple[str, ...] = ()
    missing_keys: Tuple[str, ...] = ()
    extraneous_text: bool = False
    binary: int = 0

    def to_dict(self) -> Dict:
        return {
            'parsed': self.parsed,
            'keys': list(self.keys),
            'extra_keys': list(self.extra_keys),
            'missing_keys': list(self.missing_keys),
            'extraneous_text': self.extraneous_text,
            'binary': self.binary,
        }


def check_output(output: str, schema: Optional[ExpectedJsonSchema] = None) -> OutputCheck:
    """Détail d'une sortie : clés, clés en trop ou manquantes, texte parasite"""
    schema = schema or ExpectedJsonSchema()
    candidate, surrounded = extract_json(output)
    obj = _parse_object(candidate)
    if obj is None:
        # Prose seule ou objet noyé dans du texte : aucune clé attendue n'est fournie
        extraneous = (surrounded or not candidate.lstrip().startswith(("{", "["))
                      or not candidate.rstrip().endswith(("}", "]")))
        return OutputCheck(parsed=False, missing_keys=tuple(sorted(schema.required)), extraneous_text=extraneous)

    keys = tuple(sorted(obj))
    required = schema.required
    return OutputCheck(
        parsed=True,
        keys=keys,
        extra_keys=tuple(sorted(set(keys) - required)) if required else (),
        missing_keys=tuple(sorted(required - set(keys))),
        extraneous_text=surrounded,
        binary=int(not surrounded),
    )


@dataclass(frozen=True)
class FormatFollowReport:
    binary_rate: float
    graded: float
    details: Tuple[OutputCheck, ...] = field(default_factory=tuple)

    @property
    def n_outputs(self) -> int:
        return len(self.details)

    def to_dict(self) -> Dict:
        return {
            'binary_rate': round(self.binary_rate, 6),
            'graded': round(self.graded, 6),
            'n_outputs': self.n_outputs,
            'details': [d.to_dict() for d in self.details],
        }


def graded_from_checks(checks: Sequence[OutputCheck], rubric: Dict) -> float:
    """Barème : 5, -2 si un échec de parsing, -1 si jeux de clés différents, -0.5 par défaut"""
    if not checks:
        raise NoOutputs("graded score needs at least one output")
    score = 5.0
    if any(not c.parsed for c in checks):
        score -= rubric['parse_failure']
    key_sets = {c.keys for c in checks if c.parsed}
    if len(key_sets) > 1:
        score -= rubric['key_mismatch']
    score -= rubric['missing_keys'] * sum(1 for c in checks if c.missing_keys)
    score -= rubric['extraneous_text'] * sum(1 for c in checks if c.extraneous_text)
    return min(5.0, max(1.0, score))


def graded_format_following(outputs: Sequence[str], schema: Optional[ExpectedJsonSchema] = None,
                            settings: Optional[Settings] = None) -> float:
    """
    Score gradué 1 à 5 des sorties d'un même template

    Raises:
        NoOutputs: liste vide
    """
    rubric = (settings or default_settings()).section('harness')['rubric']
    return graded_from_checks([check_output(o, schema) for o in outputs], rubric)


def format_follow_report(outputs: Sequence[str], schema: Optional[ExpectedJsonSchema] = None,
                         settings: Optional[Settings] = None) -> FormatFollowReport:
    if not outputs:
        raise NoOutputs("no outputs to score")
    rubric = (settings or default_settings()).section('harness')['rubric']
    checks = tuple(check_output(o, schema) for o in outputs)
    return FormatFollowReport(
        binary_rate=sum(c.binary for c in checks) / len(checks),
        graded=graded_from_checks(checks, rubric),
        details=checks,
    )
