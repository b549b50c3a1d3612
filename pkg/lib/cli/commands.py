"""
Sous-commandes : lint, analyze, ingest, eval, explain

Chaque commande reçoit les arguments argparse et la configuration effective,
et renvoie un code de sortie (0 propre, 1 échec du lint).
"""
import json
import logging
import shutil
import sys
from pathlib import Path
from typing import Dict, List

from ..analytics import analyze_corpus, build_report, report_document, write_report
from ..bundle import analyze
from ..components import build_segmenter
from ..config import Settings
from ..errors import EmptyCorpus, PromptLintError
from ..harness import (
    ContentJudge, HttpChatProvider, MockProvider, ProviderConfig, compare_patterns, load_bindings,
    positioning_variants,
)
from ..ingest import FilterPolicy, MetadataClient, filter_records, load_corpus, load_dataset, write_corpus
from ..lint import (
    Severity, apply_fixes, diagnostics_document, exceeds, explain_rule, format_text, lint, use_color,
)
from ..template import parse_template
from .manifest import RunManifest

logger = logging.getLogger(__name__)

LINT_SUFFIXES = ('.txt', '.md')


def _dump(document: Dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


# ---------------------------------------------------------------------------
# Surcharges de configuration issues des options
# ---------------------------------------------------------------------------

def overrides_for(args) -> Dict:
    """Options CLI -> dict fusionné par-dessus la config (les None sont ignorés)"""
    command = args.command
    if command == 'lint':
        return {'lint': {'fail_level': args.fail_level}, 'segmenter': {'backend': args.segmenter}}
    if command == 'ingest':
        return {
            'ingest': {
                'min_stars': args.min_stars,
                'max_age_days': args.max_age_days,
                'min_tokens': args.min_tokens,
                'strict': True if args.strict else None,
                'reference_time': args.reference_time,
            },
            'metadata': {'offline_dir': args.offline},
        }
    if command == 'eval':
        return {'harness': {
            'provider': {'endpoint': args.endpoint, 'model': args.model, 'max_in_flight': args.max_in_flight},
            'judge': {'enabled': True if args.judge else None},
        }}
    if command == 'analyze':
        return {
            'analytics': {'workers': args.workers},
            'segmenter': {'backend': args.segmenter},
            'taxonomy': {'clustering': {'k': args.clusters}},
        }
    return {}


def segmenter_for(args, settings: Settings):
    """Segmenteur de la config ; le backend llm passe par --labeler-mock ou le fournisseur HTTP"""
    if settings.get('segmenter.backend', 'cue') != 'llm':
        return build_segmenter(settings)
    if args.labeler_mock:
        return build_segmenter(settings, MockProvider(args.labeler_mock))
    return build_segmenter(settings, HttpChatProvider(ProviderConfig.from_settings(settings)))


def _live_labeler(args, settings: Settings) -> bool:
    return settings.get('segmenter.backend', 'cue') == 'llm' and not args.labeler_mock


# ---------------------------------------------------------------------------
# lint
# ---------------------------------------------------------------------------

def collect_lint_files(paths: List[str]) -> List[Path]:
    """Fichiers donnés + *.txt / *.md des répertoires, triés"""
    files = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files += sorted(p for p in path.rglob('*') if p.is_file() and p.suffix in LINT_SUFFIXES)
        elif path.is_file():
            files.append(path)
        else:
            raise FileNotFoundError(f"no such file or directory: {raw}")
    return files


def _fix_file(path: Path, template, diagnostics, settings: Settings):
    fixed = apply_fixes(template, diagnostics, settings)
    if fixed == template.text:
        return template
    shutil.copyfile(path, path.with_name(path.name + '.bak'))
    path.write_text(fixed, encoding='utf-8')
    print(f"🔧 {path}: fixed (backup in {path.name}.bak)", file=sys.stderr)
    return parse_template(fixed, template.id)


def cmd_lint(args, settings: Settings) -> int:
    files = collect_lint_files(args.paths)
    fail_level = Severity.parse(settings.get('lint.fail_level', 'warning'))
    color = args.format == 'text' and use_color(sys.stdout)
    segmenter = segmenter_for(args, settings)

    results = []
    for path in files:
        template = parse_template(path.read_bytes(), path.stem)
        diagnostics = lint(analyze(template, settings, segmenter), settings)
        if args.fix and any(d.rule_id in ('R3', 'R4') for d in diagnostics):
            template = _fix_file(path, template, diagnostics, settings)
            diagnostics = lint(analyze(template, settings, segmenter), settings)
        results.append({'path': str(path), 'template': template, 'diagnostics': diagnostics})

    if args.format == 'json':
        document = diagnostics_document(results)
        document['schema_version'] = '1.0'
        document['manifest'] = RunManifest.create(
            'lint', settings, files, args.timestamp, live_provider=_live_labeler(args, settings),
        ).to_dict()
        sys.stdout.write(_dump(document))
    else:
        for result in results:
            sys.stdout.write(format_text(result['path'], result['template'], result['diagnostics'], color))

    failed = any(exceeds(r['diagnostics'], fail_level) for r in results)
    logger.info(f"{len(files)} fichier(s) analysé(s), seuil {fail_level.value}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def cmd_analyze(args, settings: Settings) -> int:
    raw = load_corpus(args.corpus)
    if not raw:
        raise EmptyCorpus(f"{args.corpus}: corpus contains no template")
    templates = [parse_template(p.text, p.id) for p in raw]
    bundles = analyze_corpus(templates, settings, segmenter=segmenter_for(args, settings))
    report = build_report(bundles, settings)

    manifest = RunManifest.create(
        'analyze', settings, [args.corpus], args.timestamp, live_provider=_live_labeler(args, settings),
    )
    paths = write_report(report_document(report, manifest.to_dict()), args.output)
    for path in paths:
        print(f"💾 {path}")
    return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def cmd_ingest(args, settings: Settings) -> int:
    records = load_dataset(args.dataset)
    client = MetadataClient(settings)
    policy = FilterPolicy.from_settings(settings)
    templates, trace = filter_records(records, policy, metadata_client=client, settings=settings)

    output = Path(args.output)
    write_corpus(output, templates)
    trace_path = output.with_name(output.stem + '.trace.json')
    document = {
        'schema_version': '1.0',
        'manifest': RunManifest.create('ingest', settings, [args.dataset], args.timestamp).to_dict(),
        'policy': {
            'min_stars': policy.min_stars,
            'max_age_days': policy.max_age_days,
            'min_tokens': policy.min_tokens,
            'english_ascii_ratio': policy.english_ascii_ratio,
            'strict': policy.strict,
        },
        'trace': trace.to_dict(),
    }
    trace_path.write_text(_dump(document), encoding='utf-8')

    print(trace.table())
    print(f"💾 {len(templates)} template(s) -> {output}")
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _build_provider(args, settings: Settings):
    if args.mock:
        return MockProvider(args.mock)
    return HttpChatProvider(ProviderConfig.from_settings(settings))


def cmd_eval(args, settings: Settings) -> int:
    templates = [parse_template(Path(p).read_bytes(), Path(p).stem) for p in args.templates]
    if args.positioning:
        if len(templates) != 1:
            raise PromptLintError("--positioning takes exactly one template")
        variants = positioning_variants(templates[0], settings)
    else:
        variants = [(t.id, t) for t in templates]

    inputs = load_bindings(args.bindings)
    provider = _build_provider(args, settings)
    judge = ContentJudge(provider, settings) if settings.get('harness.judge.enabled') else None
    report = compare_patterns(variants, inputs, provider, settings, judge=judge)

    manifest = RunManifest.create(
        'eval', settings, list(args.templates) + [args.bindings], args.timestamp, live_provider=not args.mock,
    )
    document = {'schema_version': '1.0', 'manifest': manifest.to_dict(), **report.to_dict()}
    output = Path(args.output)
    output.mkdir(parents=True, exist_ok=True)
    (output / 'eval_report.json').write_text(_dump(document), encoding='utf-8')
    (output / 'eval_report.md').write_text(report.render_markdown(), encoding='utf-8')

    print(report.table())
    return 0


# ---------------------------------------------------------------------------
# explain
# ---------------------------------------------------------------------------

def cmd_explain(args, settings: Settings) -> int:
    print(explain_rule(args.rule))
    return 0


COMMANDS = {
    'lint': cmd_lint,
    'analyze': cmd_analyze,
    'ingest': cmd_ingest,
    'eval': cmd_eval,
    'explain': cmd_explain,
}
