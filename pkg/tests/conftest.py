import json
import threading
import time
from collections import defaultdict, deque
from pathlib import Path

import pytest
from flask import Flask, jsonify, request
from jsonschema import Draft202012Validator
from referencing import Registry, Resource
from werkzeug.serving import make_server

from lib.config import default_settings

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / 'data' / 'fixtures'
GOLDEN = Path(__file__).resolve().parent / 'golden'
SCHEMAS = ROOT / 'docs' / 'schemas'

CHAT_PATH = '/v1/chat/completions'


def chat_body(content, model='mock-model'):
    return {'model': model, 'choices': [{'message': {'role': 'assistant', 'content': content}, 'finish_reason': 'stop'}]}


class MockServer:
    """
    Serveur HTTP local (Flask + werkzeug) aux réponses scriptées

    Chaque réponse scriptée est un dict {status, json, headers, sleep} ;
    une route sans script restant répond avec sa réponse par défaut.
    """

    def __init__(self):
        self.app = Flask('promptlint-mock')
        self.scripts = defaultdict(deque)
        self.hits = defaultdict(int)
        self.bodies = []
        self.delay = 0.0
        self.in_flight = 0
        self.peak_in_flight = 0
        self.lock = threading.Lock()
        self._register_routes()
        self.server = make_server('127.0.0.1', 0, self.app, threaded=True)
        self.url = f"http://127.0.0.1:{self.server.server_port}"
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def script(self, key, *responses):
        self.scripts[key].extend(responses)

    def _next(self, key, default):
        with self.lock:
            self.hits[key] += 1
            queue = self.scripts[key]
            return queue.popleft() if queue else default

    @staticmethod
    def _respond(item):
        if item.get('sleep'):
            time.sleep(item['sleep'])
        return jsonify(item.get('json', {})), item.get('status', 200), item.get('headers', {})

    def _register_routes(self):
        @self.app.get('/repos/<owner>/<name>')
        def repo(owner, name):
            key = f"repos/{owner}/{name}"
            return self._respond(self._next(key, {'status': 404, 'json': {'message': 'Not Found'}}))

        @self.app.post(CHAT_PATH)
        def chat():
            with self.lock:
                self.in_flight += 1
                self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
                self.bodies.append(request.get_json())
            try:
                if self.delay:
                    time.sleep(self.delay)
                return self._respond(self._next('chat', {'json': chat_body('{"ok": true}')}))
            finally:
                with self.lock:
                    self.in_flight -= 1

    def start(self):
        self.thread.start()
        return self

    def stop(self):
        self.server.shutdown()
        self.thread.join(timeout=5)


@pytest.fixture
def mock_server():
    server = MockServer().start()
    yield server
    server.stop()


@pytest.fixture
def settings():
    return default_settings()


def schema_validator(name):
    """Validateur jsonschema pour docs/schemas/<name>, références croisées résolues"""
    resources = []
    for path in SCHEMAS.glob('*.schema.json'):
        contents = json.loads(path.read_text(encoding='utf-8'))
        resources.append((contents['$id'], Resource.from_contents(contents)))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMAS / name).read_text(encoding='utf-8'))
    return Draft202012Validator(schema, registry=registry)
