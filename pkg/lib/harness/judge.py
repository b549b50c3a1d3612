"""
Juge de contenu optionnel (désactivé par défaut)

Un appel au fournisseur avec un prompt de barème ; la note 1 à 5 est
automatique et rapportée à part, jamais mêlée aux mesures de format.
"""
import logging
import re
from typing import Optional

from ..config import Settings, default_settings

logger = logging.getLogger(__name__)

_SCORE = re.compile(r"[1-5]")


class ContentJudge:

    def __init__(self, provider, settings: Optional[Settings] = None, enabled: Optional[bool] = None):
        config = (settings or default_settings()).section('harness').get('judge', {})
        self.provider = provider
        self.enabled = config.get('enabled', False) if enabled is None else enabled
        self.rubric_prompt = config['rubric_prompt']

    def score(self, prompt: str, output: str) -> Optional[int]:
        """Note 1 à 5, None si le juge est désactivé ou ne répond pas de chiffre"""
        if not self.enabled:
            return None
        reply = self.provider.complete(self.rubric_prompt.replace('{prompt}', prompt).replace('{output}', output))
        match = _SCORE.search(reply)
        if match is None:
            logger.warning(f"⚠️ Réponse du juge sans note exploitable: {reply[:60]!r}")
            return None
        return int(match.group())
