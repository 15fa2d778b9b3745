"""Command-line interface.

Option values resolve in three layers: built-in defaults, then the
config file given with --config, then explicit flags. The config file
is flat ``key = value`` text with # comments; recognized keys are the
long option names of the subcommands (dataset, split, cache_dir, tasks,
qg_format, seed, backend, max_new_tokens, rules).

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .backend import GenerationClient, RetryPolicy
from .corpus import corpus_stats, parse_squad_json, validate_and_repair_spans
from .datasets import available_datasets, load_dataset
from .errors import TrqgError, UsageError
from .formatting import QgFormat, build_multitask_dataset, serialize_jsonl
from .metrics import corpus_qa_scores, qg_scores
from .mock_server import load_fixtures, serve_mock
from .pipeline import generate_qa_pairs
from .sentences import load_rules, split_sentences

CONFIG_KEYS = frozenset(
    {
        "dataset",
        "split",
        "cache_dir",
        "tasks",
        "qg_format",
        "seed",
        "backend",
        "max_new_tokens",
        "rules",
    }
)


def read_config(path: Path) -> dict[str, str]:
    """Parse a flat key = value config file."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"config line {line_no} is not 'key = value': {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            known = ", ".join(sorted(CONFIG_KEYS))
            raise UsageError(f"unknown config key {key!r} (line {line_no}); known: {known}")
        values[key] = value
    return values


def translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UsageError as err:
            raise click.UsageError(str(err)) from err
        except TrqgError as err:
            raise click.ClickException(str(err)) from err

    return wrapper


class Settings:
    def __init__(self, config: dict[str, str]):
        self.config = config

    def get(self, flag_value, key: str, default=None, cast=None):
        if flag_value is not None:
            return flag_value
        if key in self.config:
            raw = self.config[key]
            if cast is None:
                return raw
            try:
                return cast(raw)
            except ValueError as err:
                raise UsageError(f"config key {key!r}: {err}") from err
        return default


pass_settings = click.make_pass_decorator(Settings)


@click.group(name="trqg")
@click.version_option(__version__, prog_name="trqg")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Flat key = value config file supplying option defaults.",
)
@click.option("--verbose", is_flag=True, help="Log at INFO level.")
@click.pass_context
@translate_errors
def cli(ctx, config: Path | None, verbose: bool):
    """Dataset engineering and evaluation for Turkish QA and QG."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = Settings(read_config(config) if config else {})


def _rules_from(path: Path | None):
    return load_rules(path) if path else None


def _dataset_options(fn):
    fn = click.option("--dataset", default=None, help="Dataset name from the manifest.")(fn)
    fn = click.option("--split", default=None, help="Dataset split.")(fn)
    fn = click.option(
        "--cache-dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Dataset cache directory.",
    )(fn)
    return fn


def _resolve_dataset(settings: Settings, dataset, split, cache_dir):
    name = settings.get(dataset, "dataset")
    split = settings.get(split, "split")
    cache = settings.get(cache_dir, "cache_dir", cast=Path)
    if not name or not split:
        known = ", ".join(
            f"{n}:{s}" for n, splits in available_datasets().items() for s in splits
        )
        raise UsageError(f"--dataset and --split are required; available: {known}")
    return name, split, cache


@cli.command()
@_dataset_options
@click.option("--tasks", default=None, help="Comma-separated tasks (qa,qg,answer_extraction).")
@click.option("--qg-format", default=None, help="highlight, prepend, or both.")
@click.option("--seed", type=int, default=None, help="Shuffle seed; omit to keep document order.")
@click.option(
    "--rules",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Sentence rule file overriding the packaged table.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Output JSONL path.",
)
@pass_settings
@translate_errors
def prepare(settings, dataset, split, cache_dir, tasks, qg_format, seed, rules, out):
    """Fetch a dataset and write multitask training samples as JSONL."""
    name, split, cache = _resolve_dataset(settings, dataset, split, cache_dir)
    task_list = [
        t.strip()
        for t in settings.get(tasks, "tasks", default="qa,qg").split(",")
        if t.strip()
    ]
    fmt = settings.get(qg_format, "qg_format", default=QgFormat.HIGHLIGHT.value)
    seed = settings.get(seed, "seed", cast=int)
    corpus = load_dataset(name, split, cache)
    repaired, repair_log = validate_and_repair_spans(corpus)
    if repair_log.events:
        click.echo(
            f"repaired spans: {repair_log.shifted} shifted, "
            f"{repair_log.relocated} relocated, {repair_log.dropped} dropped",
            err=True,
        )
    samples = build_multitask_dataset(
        repaired, task_list, fmt, seed=seed, rules=_rules_from(rules)
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(serialize_jsonl(samples), encoding="utf-8")
    click.echo(f"wrote {len(samples)} samples to {out}")


@cli.command()
@_dataset_options
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
@pass_settings
@translate_errors
def stats(settings, dataset, split, cache_dir, as_json):
    """Print corpus statistics for a dataset split."""
    name, split, cache = _resolve_dataset(settings, dataset, split, cache_dir)
    corpus = load_dataset(name, split, cache)
    report = corpus_stats(corpus)
    if as_json:
        from dataclasses import asdict

        click.echo(json.dumps(asdict(report), ensure_ascii=False, indent=2))
        return
    click.echo(f"dataset        {name}:{split}")
    click.echo(f"articles       {report.articles}")
    click.echo(f"paragraphs     {report.paragraphs}")
    click.echo(f"questions      {report.questions}")
    click.echo(f"answers        {report.answers}")
    for label, summary in (
        ("context len", report.context_length),
        ("question len", report.question_length),
        ("answer len", report.answer_length),
    ):
        click.echo(
            f"{label:<14} min {summary.min} max {summary.max} "
            f"mean {summary.mean:.1f} median {summary.median:.1f}"
        )


@cli.command(name="split")
@click.option(
    "--rules",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Sentence rule file overriding the packaged table.",
)
@click.option(
    "--in",
    "in_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Read text from a file instead of stdin.",
)
@translate_errors
def split_command(rules, in_path):
    """Split text into sentences; one JSON object per sentence."""
    text = (
        in_path.read_text(encoding="utf-8")
        if in_path
        else sys.stdin.read()
    )
    for span in split_sentences(text, _rules_from(rules)):
        click.echo(
            json.dumps(
                {"start": span.start, "end": span.end, "text": text[span.start : span.end]},
                ensure_ascii=False,
            )
        )


@cli.group()
def evaluate():
    """Score predictions against references."""


def _write_report(out: Path | None, report: dict):
    rendered = json.dumps(report, ensure_ascii=False, indent=2)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


@evaluate.command(name="qa")
@_dataset_options
@click.option(
    "--gold-file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Score against a local SQuAD-format file instead of a named dataset.",
)
@click.option(
    "--predictions",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="JSON object mapping record id to predicted answer text.",
)
@click.option("--label", default=None, help="Setting name recorded in the report.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@pass_settings
@translate_errors
def evaluate_qa(settings, dataset, split, cache_dir, gold_file, predictions, label, out):
    """Exact match and token F1 for answer predictions."""
    if gold_file is not None:
        gold = parse_squad_json(gold_file.read_bytes())
        default_label = gold_file.stem
    else:
        name, split, cache = _resolve_dataset(settings, dataset, split, cache_dir)
        gold = load_dataset(name, split, cache)
        default_label = f"{name}:{split}"
    predicted = json.loads(predictions.read_text(encoding="utf-8"))
    if not isinstance(predicted, dict) or not all(
        isinstance(v, str) for v in predicted.values()
    ):
        raise UsageError("predictions must be a JSON object of id to string")
    scores = corpus_qa_scores(gold, predicted)
    _write_report(
        out,
        {
            "kind": "qa",
            "setting": label or default_label,
            "count": scores.count,
            "metrics": {"exact_match": scores.exact_match, "f1": scores.f1},
        },
    )


@evaluate.command(name="qg")
@click.option(
    "--candidates",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Generated questions, one per line.",
)
@click.option(
    "--references",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Reference questions, one per line, aligned with candidates.",
)
@click.option("--label", default=None, help="Setting name recorded in the report.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@translate_errors
def evaluate_qg(candidates, references, label, out):
    """BLEU-1, BLEU-2 and ROUGE-L for generated questions."""
    cand_lines = candidates.read_text(encoding="utf-8").splitlines()
    ref_lines = references.read_text(encoding="utf-8").splitlines()
    if len(cand_lines) != len(ref_lines):
        raise UsageError(
            f"{len(cand_lines)} candidates vs {len(ref_lines)} references"
        )
    _write_report(
        out,
        {
            "kind": "qg",
            "setting": label or candidates.stem,
            "count": len(cand_lines),
            "metrics": qg_scores(cand_lines, ref_lines),
        },
    )


@cli.command()
@click.option(
    "--in",
    "in_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help='JSONL of {"key", "context", "answers"?} objects.',
)
@click.option("--backend", default=None, help="Backend endpoint URL.")
@click.option("--qg-format", default=None, help="highlight, prepend, or both.")
@click.option("--max-new-tokens", type=int, default=None)
@click.option(
    "--rules",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Sentence rule file overriding the packaged table.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Output JSONL of generated pairs.",
)
@pass_settings
@translate_errors
def generate(settings, in_path, backend, qg_format, max_new_tokens, rules, out):
    """Generate question-answer pairs for raw contexts via a backend."""
    endpoint = settings.get(backend, "backend")
    if not endpoint:
        raise UsageError("--backend is required (or set backend in the config file)")
    fmt = settings.get(qg_format, "qg_format", default=QgFormat.HIGHLIGHT.value)
    budget = settings.get(max_new_tokens, "max_new_tokens", default=64, cast=int)
    rule_set = _rules_from(rules)

    pairs_written = 0
    failures = 0
    contexts = 0
    out.parent.mkdir(parents=True, exist_ok=True)
    with GenerationClient(endpoint, RetryPolicy()) as client, open(
        out, "w", encoding="utf-8"
    ) as sink:
        for line_no, line in enumerate(
            in_path.read_text(encoding="utf-8").splitlines(), 1
        ):
            if not line.strip():
                continue
            contexts += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise UsageError(f"{in_path}:{line_no}: invalid JSON: {err}") from err
            if not isinstance(record, dict) or not isinstance(record.get("context"), str):
                raise UsageError(f"{in_path}:{line_no}: need a 'context' string")
            key = str(record.get("key", line_no))
            answers = _explicit_answers(record, in_path, line_no)
            pairs, pair_failures = generate_qa_pairs(
                record["context"],
                client,
                key=key,
                qg_format=fmt,
                rules=rule_set,
                answers=answers,
                max_new_tokens=budget,
            )
            for failure in pair_failures:
                failures += 1
                click.echo(
                    f"{key}: {failure.stage} failed: {failure.detail}", err=True
                )
            for pair in pairs:
                sink.write(
                    json.dumps(
                        {
                            "key": pair.key,
                            "answer": pair.answer,
                            "answer_start": pair.answer_start,
                            "question": pair.question,
                            "provenance": pair.provenance,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                pairs_written += 1
    click.echo(f"wrote {pairs_written} pairs to {out}")
    if failures and not pairs_written:
        raise click.ClickException(f"all {contexts} contexts failed")


def _explicit_answers(record: dict, path: Path, line_no: int):
    from .corpus import AnswerSpan

    raw = record.get("answers")
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise UsageError(f"{path}:{line_no}: 'answers' must be a list")
    spans = []
    context = record["context"]
    for item in raw:
        if isinstance(item, str):
            start = context.find(item)
            if start < 0:
                raise UsageError(
                    f"{path}:{line_no}: answer {item!r} not found in context"
                )
            spans.append(AnswerSpan(text=item, answer_start=start))
        elif isinstance(item, dict) and isinstance(item.get("text"), str):
            spans.append(
                AnswerSpan(
                    text=item["text"], answer_start=int(item.get("answer_start", -1))
                )
            )
        else:
            raise UsageError(f"{path}:{line_no}: malformed answer entry {item!r}")
    return spans


@cli.command(name="serve-mock")
@click.option(
    "--fixtures",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="JSON fixture file; omitted means echo fallback only.",
)
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--model-id", default="mock-backend", show_default=True)
@translate_errors
def serve_mock_command(fixtures, port, model_id):
    """Serve the deterministic mock backend in the foreground."""
    fixture_list = load_fixtures(fixtures) if fixtures else []
    serve_mock(fixture_list, port=port, model_id=model_id)


@cli.command()
@click.argument(
    "reports",
    nargs=-1,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@translate_errors
def report(reports, csv_out):
    """Merge evaluation reports into one comparison table."""
    if not reports:
        raise UsageError("at least one report file is required")
    rows = []
    for path in reports:
        doc = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(doc, dict) or "metrics" not in doc or "kind" not in doc:
            raise UsageError(f"{path} is not an evaluation report")
        rows.append(doc)
    kinds = {row["kind"] for row in rows}
    if len(kinds) > 1:
        raise UsageError(f"cannot mix report kinds: {', '.join(sorted(kinds))}")
    metric_names = sorted({name for row in rows for name in row["metrics"]})

    header = ["setting", "count", *metric_names]
    table = [
        [
            str(row.get("setting", "?")),
            str(row.get("count", "?")),
            *(
                f"{row['metrics'][name]:.4f}" if name in row["metrics"] else "-"
                for name in metric_names
            ),
        ]
        for row in rows
    ]
    widths = [
        max(len(header[i]), *(len(line[i]) for line in table))
        for i in range(len(header))
    ]
    click.echo("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)))
    for line in table:
        click.echo("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)))

    if csv_out is not None:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(header)
        writer.writerows(table)
        csv_out.parent.mkdir(parents=True, exist_ok=True)
        csv_out.write_text(buffer.getvalue(), encoding="utf-8")
        click.echo(f"wrote {csv_out}")


@cli.command()
@click.option("--dataset", default=None, help="Restrict to one dataset name.")
@translate_errors
def datasets(dataset):
    """List the datasets the manifest knows how to fetch."""
    known = available_datasets()
    if dataset is not None:
        if dataset not in known:
            raise UsageError(f"unknown dataset {dataset!r}")
        known = {dataset: known[dataset]}
    for name, splits in sorted(known.items()):
        click.echo(f"{name}: {', '.join(splits)}")


def main():
    cli()


if __name__ == "__main__":
    main()
