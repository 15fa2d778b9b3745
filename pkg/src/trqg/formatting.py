"""Turn a corpus into text-to-text training samples.

Three tasks share one sample shape: answering (question plus context to
answer text), question generation (answer-marked context to question
text) and answer extraction (sentence-marked context to the answers in
that sentence). The exact templates and marker tokens live here and
nowhere else; the mock backend and the generation pipeline import them.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .corpus import AnswerSpan, Corpus, Paragraph, QaRecord
from .errors import ContractViolation, UsageError
from .sentences import RuleSet, SentenceSpan, find_covering_sentence, split_sentences

HIGHLIGHT_TOKEN = "<hl>"
SEPARATOR_TOKEN = "<sep>"

QA_PREFIX = "question: "
QG_PREFIX = "generate question: "
ANSWER_PREFIX = "answer: "
CONTEXT_INFIX = " context: "
AE_PREFIX = "extract answer: "


class Task(str, Enum):
    QA = "qa"
    QG = "qg"
    ANSWER_EXTRACTION = "answer_extraction"


class QgFormat(str, Enum):
    HIGHLIGHT = "highlight"
    PREPEND = "prepend"
    BOTH = "both"


def _as_qg_format(value: QgFormat | str) -> QgFormat:
    try:
        return QgFormat(value)
    except ValueError:
        known = ", ".join(f.value for f in QgFormat)
        raise UsageError(f"unknown qg format {value!r}; known formats: {known}") from None


@dataclass
class FormattedSample:
    id: str
    task: str
    input_text: str
    target_text: str


def _check_span(context: str, answer: AnswerSpan) -> None:
    start = answer.answer_start
    if context[start : start + len(answer.text)] != answer.text:
        raise ContractViolation(
            f"answer {answer.text!r} does not sit at offset {start}; "
            "repair spans before formatting"
        )


def highlight_range(context: str, start: int, end: int) -> str:
    """Wrap context[start:end] in highlight tokens, keeping the rest."""
    if not (0 <= start <= end <= len(context)):
        raise ContractViolation(f"range [{start}, {end}) outside context")
    return (
        context[:start]
        + HIGHLIGHT_TOKEN
        + " "
        + context[start:end]
        + " "
        + HIGHLIGHT_TOKEN
        + context[end:]
    )


def format_qa(record: QaRecord, context: str) -> FormattedSample:
    """Question-answering sample: question plus context in, first answer out."""
    if not record.answers:
        raise ContractViolation(f"record {record.id} has no answers")
    return FormattedSample(
        id=record.id,
        task=Task.QA.value,
        input_text=f"{QA_PREFIX}{record.question}{CONTEXT_INFIX}{context}",
        target_text=record.answers[0].text,
    )


def format_qg(
    record: QaRecord, context: str, qg_format: QgFormat | str = QgFormat.HIGHLIGHT
) -> FormattedSample:
    """Question-generation sample in one of the three input formats.

    highlight marks the answer span in the context and prefixes the
    task; prepend states the answer before an unmarked context; both
    states the answer and marks the span, with no task prefix. The
    first answer is used and its span must be exact.
    """
    qg_format = _as_qg_format(qg_format)
    if not record.answers:
        raise ContractViolation(f"record {record.id} has no answers")
    answer = record.answers[0]
    _check_span(context, answer)
    if qg_format is QgFormat.PREPEND:
        input_text = f"{ANSWER_PREFIX}{answer.text}{CONTEXT_INFIX}{context}"
    else:
        marked = highlight_range(
            context, answer.answer_start, answer.answer_start + len(answer.text)
        )
        if qg_format is QgFormat.HIGHLIGHT:
            input_text = f"{QG_PREFIX}{marked}"
        else:
            input_text = f"{ANSWER_PREFIX}{answer.text}{CONTEXT_INFIX}{marked}"
    return FormattedSample(
        id=record.id,
        task=Task.QG.value,
        input_text=input_text,
        target_text=record.question,
    )


def format_answer_extraction(
    context: str,
    sentence: SentenceSpan,
    answers: Sequence[AnswerSpan],
    sample_id: str = "",
) -> FormattedSample:
    """Answer-extraction sample: sentence-marked context in, answers out.

    The sentence may be any covering range produced by
    find_covering_sentence. The target joins the given answers with the
    separator token, ordered by start offset and deduplicated by exact
    text.
    """
    if not answers:
        raise ContractViolation("answer extraction needs at least one answer")
    for answer in answers:
        _check_span(context, answer)
    ordered = sorted(answers, key=lambda a: (a.answer_start, a.text))
    texts = []
    for answer in ordered:
        if answer.text not in texts:
            texts.append(answer.text)
    return FormattedSample(
        id=sample_id or f"ae-{sentence.start}-{sentence.end}",
        task=Task.ANSWER_EXTRACTION.value,
        input_text=f"{AE_PREFIX}{highlight_range(context, sentence.start, sentence.end)}",
        target_text=f" {SEPARATOR_TOKEN} ".join(texts),
    )


def _ae_samples(
    paragraph: Paragraph, rules: RuleSet | None, id_prefix: str
) -> list[FormattedSample]:
    spans = split_sentences(paragraph.context, rules)
    if not spans:
        return []
    buckets: dict[SentenceSpan, list[AnswerSpan]] = {}
    for record in paragraph.qas:
        for answer in record.answers:
            if not answer.text:
                continue
            _check_span(paragraph.context, answer)
            covering = find_covering_sentence(spans, answer)
            buckets.setdefault(covering, []).append(answer)
    samples = []
    for covering in sorted(buckets, key=lambda s: (s.start, s.end)):
        samples.append(
            format_answer_extraction(
                paragraph.context,
                covering,
                buckets[covering],
                sample_id=f"{id_prefix}-s{covering.start}",
            )
        )
    return samples


def build_multitask_dataset(
    corpus: Corpus,
    tasks: Sequence[Task | str],
    qg_format: QgFormat | str = QgFormat.HIGHLIGHT,
    seed: int | None = None,
    rules: RuleSet | None = None,
) -> list[FormattedSample]:
    """Build one sample list covering the requested tasks.

    qa and qg contribute one sample per record with answers; answer
    extraction contributes one sample per (paragraph, sentence that
    contains at least one answer). Samples are generated in document
    order, tasks concatenated in the requested order; a non-None seed
    shuffles the result reproducibly. qg and answer extraction require
    repaired spans.
    """
    if not tasks:
        raise UsageError("no tasks requested")
    resolved = []
    for task in tasks:
        try:
            resolved.append(Task(task))
        except ValueError:
            known = ", ".join(t.value for t in Task)
            raise UsageError(f"unknown task {task!r}; known tasks: {known}") from None
    if len(set(resolved)) != len(resolved):
        raise UsageError("duplicate task in request")
    qg_format = _as_qg_format(qg_format)

    samples: list[FormattedSample] = []
    for task in resolved:
        if task is Task.ANSWER_EXTRACTION:
            for pi, paragraph in enumerate(corpus.paragraphs()):
                samples.extend(_ae_samples(paragraph, rules, id_prefix=f"ae-p{pi}"))
        else:
            for paragraph, record in corpus.records():
                if not record.answers:
                    continue
                if task is Task.QA:
                    samples.append(format_qa(record, paragraph.context))
                else:
                    samples.append(format_qg(record, paragraph.context, qg_format))
    if seed is not None:
        random.Random(seed).shuffle(samples)
    return samples


def serialize_jsonl(samples: Iterable[FormattedSample]) -> str:
    """Render samples as JSONL, one object per line, key order fixed.

    The output is byte-stable for a given sample list.
    """
    lines = []
    for sample in samples:
        lines.append(
            json.dumps(
                {
                    "id": sample.id,
                    "task": sample.task,
                    "input": sample.input_text,
                    "target": sample.target_text,
                },
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)
