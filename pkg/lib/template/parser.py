"""
Parsing des templates de prompts

Grammaire des placeholders : "{{" IDENT "}}" ou "{" IDENT "}" avec
IDENT = [A-Za-z_][A-Za-z0-9_]*. Tout le reste (JSON littéral, accolades
échappées, "[Title]") reste du texte statique. Les spans sont des offsets
en octets UTF-8, intervalle semi-ouvert.
"""
import logging
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Tuple, Union

from ..errors import EmptyText, ForeignPlaceholder, MalformedUtf8, MissingBinding, UnusedBindingWarning

logger = logging.getLogger(__name__)

# Double accolade testée avant la simple à la même position
PLACEHOLDER_PATTERN = re.compile(
    rb"\{\{([A-Za-z_][A-Za-z0-9_]*)\}\}|\{([A-Za-z_][A-Za-z0-9_]*)\}"
)


class PlaceholderSyntax(str, Enum):
    SINGLE_BRACE = "SingleBrace"
    DOUBLE_BRACE = "DoubleBrace"


class PositionThird(str, Enum):
    BEGINNING = "Beginning"
    MIDDLE = "Middle"
    END = "End"


@dataclass(frozen=True, order=True)
class Span:
    """Intervalle [start, end) en octets"""
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def __len__(self):
        return self.end - self.start

    def overlaps(self, other: 'Span') -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end


@dataclass(frozen=True)
class RawPrompt:
    """Prompt brut tel que lu dans un fichier ou un corpus"""
    id: str
    source: str
    text: str


@dataclass(frozen=True)
class Placeholder:
    name: str
    syntax: PlaceholderSyntax
    span: Span
    ordinal: int


@dataclass(frozen=True)
class PromptTemplate:
    """Template parsé : texte + placeholders triés par position"""
    id: str
    text: str
    placeholders: Tuple[Placeholder, ...] = field(default=())
    char_length: int = 0

    @cached_property
    def data(self) -> bytes:
        return self.text.encode('utf-8')

    @property
    def byte_length(self) -> int:
        return len(self.data)

    def slice(self, span: Span) -> str:
        """Décode le texte couvert par un span"""
        return self.data[span.start:span.end].decode('utf-8', errors='replace')

    def names(self) -> List[str]:
        """Noms distincts dans l'ordre de première apparition"""
        seen = []
        for p in self.placeholders:
            if p.name not in seen:
                seen.append(p.name)
        return seen

    def line_col(self, offset: int) -> Tuple[int, int]:
        """Ligne et colonne (base 1, colonne en caractères) d'un offset en octets"""
        prefix = self.data[:offset].decode('utf-8', errors='replace')
        line = prefix.count('\n') + 1
        col = len(prefix) - (prefix.rfind('\n') + 1) + 1
        return line, col


def parse_template(text: Union[str, bytes], id: str = "") -> PromptTemplate:
    """
    Parse un texte brut en PromptTemplate

    Args:
        text: Texte du template (str ou octets UTF-8)
        id: Identifiant du template

    Returns:
        PromptTemplate avec ses placeholders
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode('utf-8')
        except UnicodeDecodeError as e:
            raise MalformedUtf8(f"template '{id}': invalid UTF-8 at byte {e.start}") from e

    if not text.strip():
        raise EmptyText(f"template '{id}' is empty")

    data = text.encode('utf-8')
    placeholders = []
    for ordinal, match in enumerate(PLACEHOLDER_PATTERN.finditer(data)):
        if match.group(1) is not None:
            name, syntax = match.group(1), PlaceholderSyntax.DOUBLE_BRACE
        else:
            name, syntax = match.group(2), PlaceholderSyntax.SINGLE_BRACE
        placeholders.append(Placeholder(
            name=name.decode('ascii'),
            syntax=syntax,
            span=Span(match.start(), match.end()),
            ordinal=ordinal,
        ))

    return PromptTemplate(id=id, text=text, placeholders=tuple(placeholders), char_length=len(text))


def render(template: PromptTemplate, bindings: Dict[str, str]) -> str:
    """
    Remplace chaque placeholder par sa valeur

    Args:
        template: Template parsé
        bindings: nom -> valeur

    Returns:
        Texte rendu, texte statique inchangé
    """
    for name in template.names():
        if name not in bindings:
            raise MissingBinding(name)

    unused = sorted(set(bindings) - set(template.names()))
    if unused:
        logger.warning(f"⚠️ Bindings inutilisés pour '{template.id}': {', '.join(unused)}")
        warnings.warn(UnusedBindingWarning(f"unused bindings: {', '.join(unused)}"), stacklevel=2)

    data = template.data
    pieces = []
    cursor = 0
    for p in template.placeholders:
        pieces.append(data[cursor:p.span.start])
        pieces.append(str(bindings[p.name]).encode('utf-8'))
        cursor = p.span.end
    pieces.append(data[cursor:])
    return b''.join(pieces).decode('utf-8')


def placeholder_position(template: PromptTemplate, placeholder: Placeholder) -> PositionThird:
    """Tiers du template où commence le placeholder (ratio start / longueur en octets)"""
    if placeholder not in template.placeholders:
        raise ForeignPlaceholder(f"placeholder '{placeholder.name}' does not belong to '{template.id}'")

    start, length = placeholder.span.start, template.byte_length
    # Comparaison entière : r < 1/3 <=> 3*start < length
    if 3 * start < length:
        return PositionThird.BEGINNING
    if 3 * start < 2 * length:
        return PositionThird.MIDDLE
    return PositionThird.END


def is_template(text: Union[str, bytes]) -> bool:
    """Vrai si le texte contient au moins un placeholder"""
    try:
        return bool(parse_template(text).placeholders)
    except (EmptyText, MalformedUtf8):
        return False
