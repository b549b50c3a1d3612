"""
Expériences de génération : remplissage des templates, appels au fournisseur
et comparaison A/B de variantes
"""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..bundle import analyze
from ..config import Settings, default_settings
from ..errors import ConfigError, NoOutputs, VariantPlaceholderMismatch
from ..lint import rewrite_placeholder_first
from ..taxonomy import ExpectedJsonSchema, PlaceholderType
from ..template import PromptTemplate, parse_template, render, token_count
from .scoring import FormatFollowReport, format_follow_report

logger = logging.getLogger(__name__)

LENGTH_BUCKETS = ('short', 'medium', 'long')


@dataclass(frozen=True)
class InputSet:
    id: str
    values: Dict[str, str]


@dataclass(frozen=True)
class GenerationResult:
    template_id: str
    variant: str
    input_id: str
    output: str
    latency: float = 0.0
    model: Optional[str] = None
    finish_reason: Optional[str] = None

    def to_dict(self) -> Dict:
        # latence exclue : les rapports doivent rester reproductibles
        return {
            'template_id': self.template_id,
            'variant': self.variant,
            'input_id': self.input_id,
            'output': self.output,
            'model': self.model,
            'finish_reason': self.finish_reason,
        }


def load_bindings(path) -> List[InputSet]:
    """
    Charge les jeux de valeurs

    Formats acceptés : liste [{"id", "values"}] ou objet {id: {nom: valeur}}.
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e

    if isinstance(data, dict):
        items = [{'id': key, 'values': values} for key, values in data.items()]
    elif isinstance(data, list):
        items = data
    else:
        raise ConfigError(f"{path}: expected a list or an object of binding sets")

    inputs = []
    for position, item in enumerate(items, start=1):
        if not isinstance(item, dict) or not isinstance(item.get('values'), dict):
            raise ConfigError(f"{path}: binding set #{position} needs a 'values' object")
        inputs.append(InputSet(str(item.get('id', f"input{position}")), {k: str(v) for k, v in item['values'].items()}))
    logger.info(f"📂 {len(inputs)} jeu(x) de valeurs chargé(s) depuis {path}")
    return inputs


def populate(template: PromptTemplate, binding_sets: Sequence[Dict[str, str]]) -> List[str]:
    """
    Un prompt par jeu de valeurs

    Raises:
        MissingBinding: un jeu ne couvre pas tous les placeholders
    """
    return [render(template, bindings) for bindings in binding_sets]


def generate(prompt: str, provider, template_id: str = "", variant: str = "", input_id: str = "") -> GenerationResult:
    """Un appel au fournisseur ; la sortie est conservée telle quelle"""
    started = time.perf_counter()
    reply = provider.send(prompt, template_id=template_id, input_id=input_id, variant=variant)
    return GenerationResult(
        template_id=template_id,
        variant=variant,
        input_id=input_id,
        output=reply.text,
        latency=time.perf_counter() - started,
        model=reply.model,
        finish_reason=reply.finish_reason,
    )


def length_bucket(tokens: int, settings: Optional[Settings] = None) -> str:
    """short sous 1000 tokens, medium de 1000 à 4000 inclus, long au-delà (seuils en config)"""
    limits = (settings or default_settings()).section('harness')['length_buckets']
    if tokens < limits['short']:
        return 'short'
    if tokens <= limits['medium']:
        return 'medium'
    return 'long'


def knowledge_length(template: PromptTemplate, values: Dict[str, str], settings: Optional[Settings] = None) -> int:
    """Tokens des valeurs des placeholders KnowledgeInput (toutes les valeurs à défaut)"""
    bundle = analyze(template, settings)
    names = {i.placeholder.name for i in bundle.placeholders_of(PlaceholderType.KNOWLEDGE_INPUT)}
    chosen = [v for k, v in values.items() if k in names] if names else list(values.values())
    return sum(token_count(v) for v in chosen)


@dataclass
class VariantResult:
    tag: str
    template_id: str
    schema: ExpectedJsonSchema
    report: FormatFollowReport
    buckets: Dict[str, FormatFollowReport]
    results: List[GenerationResult]
    judge_scores: Optional[List[Optional[int]]] = None

    def to_dict(self) -> Dict:
        result = {
            'tag': self.tag,
            'template_id': self.template_id,
            'schema': self.schema.to_dict(),
            'binary_rate': round(self.report.binary_rate, 6),
            'graded': round(self.report.graded, 6),
            'details': [d.to_dict() for d in self.report.details],
            'buckets': {
                name: {'binary_rate': round(r.binary_rate, 6), 'graded': round(r.graded, 6), 'n_outputs': r.n_outputs}
                for name, r in self.buckets.items()
            },
            'generations': [r.to_dict() for r in self.results],
        }
        if self.judge_scores is not None:
            scored = [s for s in self.judge_scores if s is not None]
            result['content_judge'] = {
                'automated': True,
                'scores': self.judge_scores,
                'mean': round(sum(scored) / len(scored), 6) if scored else None,
            }
        return result


@dataclass
class ComparisonReport:
    variants: List[VariantResult]
    rubric: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'rubric': self.rubric,
            'graded_is_proxy': True,
            'variants': [v.to_dict() for v in self.variants],
        }

    def table(self) -> str:
        """Tableau comparatif texte pour la console"""
        lines = [f"{'variant':<24} {'binary':>8} {'graded':>8} {'outputs':>8}"]
        for v in self.variants:
            lines.append(f"{v.tag:<24} {v.report.binary_rate:>8.2f} {v.report.graded:>8.2f} {v.report.n_outputs:>8}")
        return '\n'.join(lines)

    def render_markdown(self) -> str:
        lines = [
            "# Format-following comparison", "",
            "The graded score is an automated rubric, not a human rating.", "",
            "| Variant | Template | Binary rate | Graded (1-5) | Outputs |",
            "|---|---|---|---|---|",
        ]
        for v in self.variants:
            lines.append(f"| {v.tag} | {v.template_id} | {v.report.binary_rate:.2f} | {v.report.graded:.2f} | {v.report.n_outputs} |")
        lines += ["", "## By knowledge-input length", "",
                  "| Variant | Bucket | Binary rate | Graded (1-5) | Outputs |", "|---|---|---|---|---|"]
        for v in self.variants:
            for name, r in v.buckets.items():
                lines.append(f"| {v.tag} | {name} | {r.binary_rate:.2f} | {r.graded:.2f} | {r.n_outputs} |")
        judged = [v for v in self.variants if v.judge_scores is not None]
        if judged:
            lines += ["", "## Content judge (automated)", "", "| Variant | Mean score |", "|---|---|"]
            for v in judged:
                mean = v.to_dict()['content_judge']['mean']
                lines.append(f"| {v.tag} | {'n/a' if mean is None else f'{mean:.2f}'} |")
        return '\n'.join(lines) + '\n'


def _run_variant(tag: str, template: PromptTemplate, inputs: Sequence[InputSet], provider,
                 settings: Settings, schema: Optional[ExpectedJsonSchema], judge, max_workers: int) -> VariantResult:
    template_id = template.id or tag
    prompts = populate(template, [i.values for i in inputs])
    schema = schema if schema is not None else analyze(template, settings).json_schema

    def task(pair):
        prompt, item = pair
        return generate(prompt, provider, template_id=template_id, variant=tag, input_id=item.id)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        results = list(executor.map(task, zip(prompts, inputs)))

    outputs = [r.output for r in results]
    report = format_follow_report(outputs, schema, settings)

    grouped: Dict[str, List[str]] = {}
    for item, output in zip(inputs, outputs):
        grouped.setdefault(length_bucket(knowledge_length(template, item.values, settings), settings), []).append(output)
    buckets = {name: format_follow_report(grouped[name], schema, settings) for name in LENGTH_BUCKETS if name in grouped}

    judge_scores = None
    if judge is not None and judge.enabled:
        judge_scores = [judge.score(p, o) for p, o in zip(prompts, outputs)]

    logger.info(f"✅ Variante '{tag}' : taux binaire {report.binary_rate:.2f}, score {report.graded:.2f}")
    return VariantResult(tag, template_id, schema, report, buckets, results, judge_scores)


def compare_patterns(variants: Sequence[Tuple[str, PromptTemplate]], inputs: Sequence[InputSet], provider,
                     settings: Optional[Settings] = None, schema: Optional[ExpectedJsonSchema] = None,
                     judge=None) -> ComparisonReport:
    """
    Compare des variantes de template sur les mêmes entrées

    Args:
        variants: [(étiquette, template)] partageant les mêmes noms de placeholders
        inputs: Jeux de valeurs
        provider: Objet exposant send(prompt, template_id=, input_id=, variant=)
        settings: Réglages (barème, tranches de longueur, in-flight)
        schema: Schéma attendu commun ; sinon extrait de chaque variante
        judge: ContentJudge optionnel

    Raises:
        VariantPlaceholderMismatch, MissingBinding, NoOutputs
    """
    settings = settings or default_settings()
    if not inputs:
        raise NoOutputs("no binding sets to run")
    names = [set(t.names()) for _, t in variants]
    if any(n != names[0] for n in names[1:]):
        detail = '; '.join(f"{tag}: {sorted(set(t.names()))}" for tag, t in variants)
        raise VariantPlaceholderMismatch(f"variants use different placeholders ({detail})")

    max_workers = settings.get('harness.provider.max_in_flight', 4)
    results = [
        _run_variant(tag, template, inputs, provider, settings, schema, judge, max_workers)
        for tag, template in variants
    ]
    return ComparisonReport(results, settings.section('harness')['rubric'])


def positioning_variants(template: PromptTemplate, settings: Optional[Settings] = None) -> List[Tuple[str, PromptTemplate]]:
    """Variantes instruction-first (texte d'origine) et placeholder-first (réécriture R4)"""
    bundle = analyze(template, settings)
    rewritten = rewrite_placeholder_first(bundle)
    if rewritten == template.text:
        logger.warning(f"⚠️ {template.id or '<template>'}: pas de directive avant le knowledge input, variantes identiques")
    return [
        ('instruction-first', template),
        ('placeholder-first', parse_template(rewritten, template.id)),
    ]
