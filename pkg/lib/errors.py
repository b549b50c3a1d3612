"""
Hiérarchie d'exceptions de PromptLint

Toutes les erreurs métier dérivent de PromptLintError ; la CLI les convertit
en code de sortie 2. Les conditions non fatales sont des warnings Python.
"""


class PromptLintError(Exception):
    """Erreur de base du projet"""


class ConfigError(PromptLintError):
    """Fichier de configuration illisible ou invalide"""


# --- template-parser -------------------------------------------------------

class EmptyText(PromptLintError):
    """Texte vide après suppression des espaces"""


class MalformedUtf8(PromptLintError):
    """Octets qui ne forment pas de l'UTF-8 valide"""


class MissingBinding(PromptLintError):
    """Un placeholder n'a pas de valeur dans les bindings"""

    def __init__(self, name):
        super().__init__(f"missing binding for placeholder '{name}'")
        self.name = name


class ForeignPlaceholder(PromptLintError):
    """Le placeholder n'appartient pas au template"""


class UnusedBindingWarning(UserWarning):
    """Binding fourni mais jamais utilisé (non fatal)"""


# --- component-segmenter ---------------------------------------------------

class IdMismatch(PromptLintError):
    """Prédictions et gold ne couvrent pas les mêmes templates"""


class NoIdentified(PromptLintError):
    """Aucun composant identifié : précision indéfinie"""


# --- taxonomy-classifiers --------------------------------------------------

class TooFewSentences(PromptLintError):
    """Moins de phrases que de clusters demandés"""


class DegenerateClustersWarning(UserWarning):
    """Le k-means a produit moins de clusters distincts que k"""


# --- corpus-analytics ------------------------------------------------------

class EmptyCorpus(PromptLintError):
    """Corpus sans aucun template"""


class KindAbsent(PromptLintError):
    """Aucun template ne contient le type de composant demandé"""


class NoJsonTemplates(PromptLintError):
    """Aucun template ne déclare de sortie JSON"""


class CorpusFormatError(PromptLintError):
    """Ligne JSONL invalide (numéro de ligne conservé)"""

    def __init__(self, path, line_number, reason):
        super().__init__(f"{path}:{line_number}: {reason}")
        self.path = path
        self.line_number = line_number


# --- corpus-ingest ---------------------------------------------------------

class MissingMetadata(PromptLintError):
    """Étoiles ou date de push absentes en mode strict"""

    def __init__(self, record_id):
        super().__init__(f"record '{record_id}' has no stars/pushed_at metadata")
        self.record_id = record_id


class InvalidRepo(PromptLintError):
    """Nom de dépôt qui n'a pas la forme owner/name"""


class NotFound(PromptLintError):
    """Dépôt inconnu (404 ou fixture absente)"""


class RateLimited(PromptLintError):
    """Limite de requêtes atteinte côté plateforme"""

    def __init__(self, retry_after=0.0):
        super().__init__(f"rate limited, retry after {retry_after:.1f}s")
        self.retry_after = retry_after


class NetworkError(PromptLintError):
    """Erreur réseau ou 5xx persistante"""


# --- lint-engine -----------------------------------------------------------

class IncompleteBundle(PromptLintError):
    """Bundle d'analyse auquel il manque une facette"""


class UnknownRule(PromptLintError):
    """Identifiant de règle inconnu"""


class ConflictingFixesWarning(UserWarning):
    """Les corrections R3 et R4 visent des zones qui se recouvrent"""


# --- eval-harness ----------------------------------------------------------

class ProviderTimeout(PromptLintError):
    """Le fournisseur n'a pas répondu dans le délai"""


class HttpError(PromptLintError):
    """Réponse HTTP non récupérable"""

    def __init__(self, status, body=""):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status


class ExhaustedRetries(PromptLintError):
    """Toutes les tentatives ont échoué"""


class NoOutputs(PromptLintError):
    """Aucune sortie à évaluer"""


class VariantPlaceholderMismatch(PromptLintError):
    """Les variantes comparées n'ont pas les mêmes placeholders"""
