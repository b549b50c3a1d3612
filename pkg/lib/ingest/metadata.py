"""
Client des métadonnées de dépôt (étoiles, date du dernier push)

Sources : API REST GET {base_url}/repos/{owner}/{name}, ou répertoire de
fixtures en mode hors ligne. Les réponses sont mises en cache en mémoire et
sur disque ({owner}__{name}.json).
"""
import json
import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import requests
from tenacity import Retrying, retry_if_exception, stop_after_attempt

from ..config import Settings, default_settings
from ..errors import InvalidRepo, NetworkError, NotFound, PromptLintError, RateLimited
from .records import RepoMetadata, parse_timestamp

logger = logging.getLogger(__name__)

_REPO_PATTERN = re.compile(r"^[A-Za-z0-9_.-]+/[A-Za-z0-9_.-]+$")


def _is_retryable(error: BaseException) -> bool:
    if isinstance(error, RateLimited):
        return True
    return isinstance(error, NetworkError) and getattr(error, 'retryable', True)


def cache_file_name(repo: str) -> str:
    owner, name = repo.split('/', 1)
    return f"{owner}__{name}.json"


def _metadata_from_json(repo: str, data: Dict) -> RepoMetadata:
    stars = data.get('stargazers_count', data.get('stars'))
    if not isinstance(stars, int):
        raise NetworkError(f"{repo}: response has no integer star count")
    return RepoMetadata(repo=repo, stars=stars, pushed_at=parse_timestamp(data.get('pushed_at')))


class MetadataClient:
    """Client des métadonnées avec cache mémoire + disque partagé entre threads"""

    def __init__(self, settings: Optional[Settings] = None, base_url: Optional[str] = None,
                 offline_dir=None, cache_dir=None, session: Optional[requests.Session] = None):
        """
        Args:
            settings: Réglages (section metadata)
            base_url: URL de l'API (remplace metadata.base_url)
            offline_dir: Répertoire de fixtures ; active le mode hors ligne
            cache_dir: Répertoire du cache disque (None désactive le disque)
            session: Session requests à réutiliser
        """
        config = (settings or default_settings()).section('metadata')
        self.base_url = (base_url or config['base_url']).rstrip('/')
        offline_dir = offline_dir if offline_dir is not None else config.get('offline_dir')
        self.offline_dir = Path(offline_dir) if offline_dir else None
        cache_dir = cache_dir if cache_dir is not None else config.get('cache_dir')
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.timeout = config.get('timeout', 10)
        self.max_retries = config.get('max_retries', 3)
        self.max_concurrency = max(1, config.get('max_concurrency', 4))
        self.max_wait = config.get('max_wait', 60)
        self.token = os.getenv(config.get('token_env', 'GITHUB_TOKEN'))

        self.session = session or requests.Session()
        self.request_count = 0
        self._memory: Dict[str, RepoMetadata] = {}
        self.lock = threading.Lock()

        self._retrying = Retrying(
            retry=retry_if_exception(_is_retryable),
            stop=stop_after_attempt(self.max_retries + 1),
            wait=self._wait,
            before_sleep=self._log_retry,
            reraise=True,
        )

    def _wait(self, retry_state) -> float:
        """Retry-After / X-RateLimit-Reset pour les limites de débit, exponentiel sinon"""
        error = retry_state.outcome.exception()
        if isinstance(error, RateLimited):
            return min(error.retry_after, self.max_wait)
        return min(0.1 * 2 ** (retry_state.attempt_number - 1), 2.0)

    @staticmethod
    def _log_retry(retry_state):
        error = retry_state.outcome.exception()
        logger.warning(f"🔄 Nouvelle tentative {retry_state.attempt_number + 1} dans "
                       f"{retry_state.next_action.sleep:.1f}s ({type(error).__name__})")

    def _fetch_remote(self, repo: str) -> RepoMetadata:
        return self._retrying.copy()(self._request, repo)

    # ------------------------------------------------------------------
    # Cache
    # ------------------------------------------------------------------

    def _read_disk(self, repo: str) -> Optional[RepoMetadata]:
        if not self.cache_dir:
            return None
        path = self.cache_dir / cache_file_name(repo)
        if not path.exists():
            return None
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return _metadata_from_json(repo, json.load(f))
        except (OSError, json.JSONDecodeError, NetworkError) as e:
            logger.warning(f"⚠️ Cache illisible pour {repo}: {e}")
            return None

    def _write_disk(self, metadata: RepoMetadata):
        if not self.cache_dir:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.cache_dir / cache_file_name(metadata.repo)
        tmp = path.with_suffix('.tmp')
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(metadata.to_dict(), f, indent=2)
        os.replace(tmp, path)
        logger.debug(f"💾 Métadonnées de {metadata.repo} mises en cache")

    # ------------------------------------------------------------------
    # Sources
    # ------------------------------------------------------------------

    def _read_offline(self, repo: str) -> RepoMetadata:
        path = self.offline_dir / cache_file_name(repo)
        if not path.exists():
            raise NotFound(f"no offline fixture for {repo}")
        with open(path, 'r', encoding='utf-8') as f:
            return _metadata_from_json(repo, json.load(f))

    def _request(self, repo: str) -> RepoMetadata:
        """Une requête GET, sans retry"""
        url = f"{self.base_url}/repos/{repo}"
        headers = {'Accept': 'application/json'}
        if self.token:
            headers['Authorization'] = f'Bearer {self.token}'

        with self.lock:
            self.request_count += 1
        try:
            response = self.session.get(url, headers=headers, timeout=self.timeout)
        except (requests.ConnectionError, requests.Timeout) as e:
            raise NetworkError(f"{repo}: {e}") from e

        if response.status_code == 200:
            return _metadata_from_json(repo, response.json())
        if response.status_code == 404:
            raise NotFound(f"repository {repo} not found")
        if response.status_code in (403, 429) and self._is_rate_limited(response):
            raise RateLimited(self._retry_after(response))
        if response.status_code >= 500:
            raise NetworkError(f"{repo}: HTTP {response.status_code}")

        error = NetworkError(f"{repo}: HTTP {response.status_code}")
        error.retryable = False
        raise error

    @staticmethod
    def _is_rate_limited(response) -> bool:
        return (response.status_code == 429
                or 'Retry-After' in response.headers
                or response.headers.get('X-RateLimit-Remaining') == '0')

    @staticmethod
    def _retry_after(response) -> float:
        if 'Retry-After' in response.headers:
            try:
                return max(0.0, float(response.headers['Retry-After']))
            except ValueError:
                return 1.0
        reset = response.headers.get('X-RateLimit-Reset')
        if reset:
            try:
                return max(0.0, float(reset) - time.time())
            except ValueError:
                pass
        return 1.0

    # ------------------------------------------------------------------
    # API publique
    # ------------------------------------------------------------------

    def fetch(self, repo: str) -> RepoMetadata:
        """
        Métadonnées d'un dépôt "owner/name"

        Raises:
            InvalidRepo, NotFound, RateLimited, NetworkError
        """
        if not _REPO_PATTERN.match(repo or ''):
            raise InvalidRepo(f"repository must look like owner/name, got '{repo}'")

        with self.lock:
            if repo in self._memory:
                return self._memory[repo]

        if self.offline_dir:
            cached = self._read_offline(repo)
        else:
            cached = self._read_disk(repo)
            if cached is None:
                cached = self._fetch_remote(repo)
                logger.info(f"✅ Métadonnées reçues pour {repo} ({cached.stars} étoiles)")
                with self.lock:
                    self._write_disk(cached)

        with self.lock:
            self._memory[repo] = cached
        return cached

    def fetch_many(self, repos: Iterable[str]) -> Dict[str, Union[RepoMetadata, PromptLintError]]:
        """Récupère plusieurs dépôts avec au plus max_concurrency requêtes simultanées"""
        unique = list(dict.fromkeys(repos))

        def task(repo):
            try:
                return self.fetch(repo)
            except PromptLintError as e:
                logger.warning(f"⚠️ {repo}: {e}")
                return e

        with ThreadPoolExecutor(max_workers=self.max_concurrency) as executor:
            results = list(executor.map(task, unique))
        return dict(zip(unique, results))


def fetch_repo_metadata(repo: str, client: Optional[MetadataClient] = None,
                        settings: Optional[Settings] = None) -> RepoMetadata:
    """Raccourci fonctionnel : client construit depuis les réglages si absent"""
    client = client or MetadataClient(settings)
    return client.fetch(repo)
