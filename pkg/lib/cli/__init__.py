"""
Interface en ligne de commande de PromptLint

Codes de sortie : 0 succès, 1 diagnostics au-dessus du seuil, 2 erreur
d'utilisation ou d'exécution. Aucune autre valeur n'est renvoyée.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from .. import __version__
from ..components import SEGMENTER_BACKENDS
from ..config import Settings
from ..errors import PromptLintError
from .commands import COMMANDS, overrides_for
from .manifest import RunManifest, file_digest, resolve_timestamp

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_LINT, EXIT_ERROR = 0, 1, 2


def _segmenter_options(p: argparse.ArgumentParser):
    p.add_argument('--segmenter', choices=SEGMENTER_BACKENDS, help="component segmenter (default: cue)")
    p.add_argument('--labeler-mock', help="scripted labeler replies for --segmenter llm (responses.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='promptlint',
        description="Static analysis of LLM prompt templates",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--config', help="user config file (JSON or TOML)")
    parser.add_argument('--log-level', help="DEBUG, INFO, WARNING, ERROR (default: $LOG_LEVEL or WARNING)")
    parser.add_argument('--timestamp', help="frozen RFC 3339 time for manifests (default: $PROMPTLINT_TIMESTAMP)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('lint', help="lint template files")
    p.add_argument('paths', nargs='+', help="files or directories (*.txt, *.md)")
    p.add_argument('--format', choices=('text', 'json'), default='text')
    p.add_argument('--fail-level', choices=('error', 'warning', 'info'))
    p.add_argument('--fix', action='store_true', help="apply R3/R4 fixes in place (.bak backup)")
    _segmenter_options(p)

    p = sub.add_parser('analyze', help="corpus statistics report")
    p.add_argument('corpus', help="JSONL corpus {id, text}")
    p.add_argument('--output', '-o', default='report', help="output directory (default: report)")
    p.add_argument('--workers', type=int)
    p.add_argument('--clusters', type=int, help="k for the exclusion constraint clusters (default: 5)")
    _segmenter_options(p)

    p = sub.add_parser('ingest', help="filter a raw prompt dataset")
    p.add_argument('dataset', help="JSONL dataset {id, repo, prompts, stars?, pushed_at?}")
    p.add_argument('--output', '-o', default='corpus.jsonl')
    p.add_argument('--min-stars', type=int)
    p.add_argument('--max-age-days', type=int)
    p.add_argument('--min-tokens', type=int)
    p.add_argument('--reference-time')
    p.add_argument('--strict', action='store_true', help="missing metadata is an error")
    p.add_argument('--offline', help="directory of repository metadata fixtures")

    p = sub.add_parser('eval', help="format-following experiment")
    p.add_argument('templates', nargs='+', help="template files (one per variant)")
    p.add_argument('--bindings', required=True, help="JSON binding sets")
    p.add_argument('--mock', help="scripted responses (responses.json or directory)")
    p.add_argument('--endpoint')
    p.add_argument('--model')
    p.add_argument('--max-in-flight', type=int)
    p.add_argument('--positioning', action='store_true', help="instruction-first vs placeholder-first")
    p.add_argument('--judge', action='store_true', help="enable the automated content judge")
    p.add_argument('--output', '-o', default='eval')

    p = sub.add_parser('explain', help="rationale of a lint rule")
    p.add_argument('rule', help="rule id, e.g. R3")
    return parser


def configure_logging(level: Optional[str] = None):
    """Logger racine sur stderr, format horodaté"""
    name = (level or os.getenv('LOG_LEVEL') or 'WARNING').upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(getattr(logging, name, logging.WARNING))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    configure_logging(args.log_level)
    try:
        settings = Settings.load(args.config, overrides_for(args))
        code = COMMANDS[args.command](args, settings)
    except (PromptLintError, OSError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"❌ Erreur inattendue: {e}")
        return EXIT_ERROR
    return code if code in (EXIT_OK, EXIT_LINT) else EXIT_ERROR


__all__ = [
    'EXIT_OK', 'EXIT_LINT', 'EXIT_ERROR', 'build_parser', 'configure_logging', 'main',
    'RunManifest', 'file_digest', 'resolve_timestamp',
]
