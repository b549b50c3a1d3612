"""
Fournisseurs de chat-completion

HttpChatProvider poste {model, messages, temperature} vers un endpoint
compatible chat-completions ; MockProvider rejoue des réponses scriptées
indexées par (template, entrée).
"""
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Union

import requests
from tenacity import Retrying, retry_if_exception, stop_after_attempt, wait_exponential

from ..config import Settings, default_settings
from ..errors import ConfigError, ExhaustedRetries, HttpError, ProviderTimeout

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: Optional[str] = None
    model: str = "gpt-4o"
    token_env: str = "PROMPTLINT_API_KEY"
    max_in_flight: int = 4
    timeout: float = 30
    max_retries: int = 3
    temperature: float = 0.0
    response_pointer: str = "/choices/0/message/content"
    system_prompt: Optional[str] = None

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ConfigError(f"max_in_flight must be >= 1, got {self.max_in_flight}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> 'ProviderConfig':
        config = (settings or default_settings()).section('harness').get('provider', {})
        config.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in config.items() if k in known})


@dataclass(frozen=True)
class ProviderReply:
    text: str
    model: Optional[str] = None
    finish_reason: Optional[str] = None


def resolve_pointer(document, pointer: str):
    """Résout un JSON pointer (RFC 6901) ; KeyError/IndexError si absent"""
    node = document
    if not pointer:
        return node
    for token in pointer.lstrip('/').split('/'):
        token = token.replace('~1', '/').replace('~0', '~')
        if isinstance(node, list):
            node = node[int(token)]
        else:
            node = node[token]
    return node


def _retryable(error: HttpError) -> bool:
    return error.status == 429 or error.status >= 500


class HttpChatProvider:
    """Client HTTP avec retries (tenacity) et limite de requêtes simultanées"""

    def __init__(self, config: ProviderConfig, session: Optional[requests.Session] = None):
        if not config.endpoint:
            raise ConfigError("no provider endpoint configured (harness.provider.endpoint)")
        self.config = config
        self.session = session or requests.Session()
        self.token = os.getenv(config.token_env) if config.token_env else None
        self.retry_count = 0
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._lock = threading.Lock()

        self._retrying = Retrying(
            retry=retry_if_exception(lambda e: isinstance(e, HttpError) and _retryable(e)),
            stop=stop_after_attempt(config.max_retries + 1),
            wait=wait_exponential(multiplier=0.1, max=2),
            before_sleep=self._log_retry,
            reraise=True,
        )

    def _log_retry(self, retry_state):
        with self._lock:
            self.retry_count += 1
        error = retry_state.outcome.exception()
        logger.warning(f"🔄 Fournisseur : tentative {retry_state.attempt_number} échouée "
                       f"(HTTP {getattr(error, 'status', '?')}), nouvel essai dans {retry_state.next_action.sleep:.1f}s")

    def _body(self, prompt: str) -> Dict:
        messages = []
        if self.config.system_prompt:
            messages.append({'role': 'system', 'content': self.config.system_prompt})
        messages.append({'role': 'user', 'content': prompt})
        return {'model': self.config.model, 'messages': messages, 'temperature': self.config.temperature}

    def _post(self, prompt: str) -> ProviderReply:
        headers = {'Content-Type': 'application/json'}
        if self.token:
            headers['Authorization'] = f'Bearer {self.token}'

        with self._slots:
            try:
                response = self.session.post(
                    self.config.endpoint, json=self._body(prompt), headers=headers, timeout=self.config.timeout,
                )
            except requests.Timeout as e:
                raise ProviderTimeout(f"no response within {self.config.timeout}s") from e
            except requests.ConnectionError as e:
                raise HttpError(503, str(e)) from e

        if response.status_code != 200:
            raise HttpError(response.status_code, response.text)
        try:
            data = response.json()
            text = resolve_pointer(data, self.config.response_pointer)
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise HttpError(response.status_code, f"no text at {self.config.response_pointer}") from e

        choice = (data.get('choices') or [{}])[0] if isinstance(data, dict) else {}
        return ProviderReply(
            text=str(text),
            model=data.get('model') if isinstance(data, dict) else None,
            finish_reason=choice.get('finish_reason') if isinstance(choice, dict) else None,
        )

    def send(self, prompt: str, template_id: str = "", input_id: str = "", variant: str = "") -> ProviderReply:
        """
        Envoie un prompt (rôle user unique, system optionnel)

        Raises:
            ProviderTimeout, HttpError (non récupérable), ExhaustedRetries
        """
        try:
            return self._retrying.copy()(self._post, prompt)
        except HttpError as e:
            if _retryable(e):
                raise ExhaustedRetries(f"{self.config.max_retries + 1} attempts failed, last: {e}") from e
            raise

    def complete(self, prompt: str) -> str:
        return self.send(prompt).text


class MockProvider:
    """
    Fournisseur scripté

    Sources acceptées : dict, fichier responses.json, ou répertoire
    <template_id>/<input_id>.txt. Les clés sont essayées dans l'ordre
    "template/variant/input", "template/input", puis "*". Une valeur liste
    est rejouée élément par élément (le dernier se répète).
    """

    def __init__(self, source: Union[Dict, str, Path], delay: float = 0.0, model: str = "mock"):
        self.responses: Dict[str, Union[str, List[str]]] = self._load(source)
        self.delay = delay
        self.model = model
        self.calls: List[str] = []
        self.in_flight = 0
        self.peak_in_flight = 0
        self._cursor: Dict[str, int] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _load(source) -> Dict:
        if isinstance(source, dict):
            return dict(source)
        path = Path(source)
        if path.is_dir():
            responses = {}
            for file in sorted(path.glob('*/*.txt')):
                responses[f"{file.parent.name}/{file.stem}"] = file.read_text(encoding='utf-8')
            logger.info(f"📂 {len(responses)} réponse(s) scriptée(s) chargée(s) depuis {path}")
            return responses
        if not path.exists():
            raise ConfigError(f"mock responses not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object keyed by run id")
        return data

    def _lookup(self, template_id: str, input_id: str, variant: str) -> str:
        for key in (f"{template_id}/{variant}/{input_id}", f"{template_id}/{input_id}", "*"):
            if key in self.responses:
                value = self.responses[key]
                if isinstance(value, list):
                    with self._lock:
                        position = self._cursor.get(key, 0)
                        self._cursor[key] = position + 1
                    return value[min(position, len(value) - 1)]
                return value
        raise HttpError(404, f"no scripted response for {template_id}/{input_id}")

    def send(self, prompt: str, template_id: str = "", input_id: str = "", variant: str = "") -> ProviderReply:
        with self._lock:
            self.calls.append(f"{template_id}/{input_id}")
            self.in_flight += 1
            self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
        try:
            if self.delay:
                time.sleep(self.delay)
            return ProviderReply(self._lookup(template_id, input_id, variant), self.model, "stop")
        finally:
            with self._lock:
                self.in_flight -= 1

    def complete(self, prompt: str) -> str:
        return self.send(prompt).text


def build_provider(settings: Optional[Settings] = None, mock=None, **overrides):
    """Fournisseur scripté si mock est donné, HTTP sinon"""
    if mock is not None:
        return MockProvider(mock)
    return HttpChatProvider(ProviderConfig.from_settings(settings, **overrides))
