"""SQuAD-format corpus model: parsing, span repair, descriptive stats.

All offsets in this package are codepoint offsets into the decoded
context string, never byte offsets. Files that store ``answer_start`` as
a digit string (the v1 data does) are coerced on parse.
"""

from __future__ import annotations

import json
import logging
import statistics
from dataclasses import dataclass, field

from .errors import ParseError, SchemaError

logger = logging.getLogger(__name__)

# How far an answer_start may be shifted (either direction) before we
# fall back to a whole-context search.
REPAIR_WINDOW = 16


@dataclass
class AnswerSpan:
    text: str
    answer_start: int


@dataclass
class QaRecord:
    id: str
    question: str
    answers: list[AnswerSpan]


@dataclass
class Paragraph:
    context: str
    qas: list[QaRecord]


@dataclass
class Article:
    title: str
    paragraphs: list[Paragraph]


@dataclass
class Corpus:
    articles: list[Article]
    version: str | None = None

    def paragraphs(self):
        for article in self.articles:
            yield from article.paragraphs

    def records(self):
        """Yield (paragraph, record) pairs in document order."""
        for paragraph in self.paragraphs():
            for record in paragraph.qas:
                yield paragraph, record


@dataclass
class RepairEvent:
    """One change made by validate_and_repair_spans."""

    record_id: str
    answer_index: int
    action: str  # "shifted" | "relocated" | "dropped"
    old_start: int
    new_start: int | None
    reason: str


@dataclass
class RepairLog:
    events: list[RepairEvent] = field(default_factory=list)
    checked: int = 0
    exact: int = 0

    @property
    def shifted(self) -> int:
        return sum(1 for e in self.events if e.action == "shifted")

    @property
    def relocated(self) -> int:
        return sum(1 for e in self.events if e.action == "relocated")

    @property
    def dropped(self) -> int:
        return sum(1 for e in self.events if e.action == "dropped")


def _require(mapping, key, path, kind=None):
    if not isinstance(mapping, dict):
        raise SchemaError(f"expected an object, got {type(mapping).__name__}", path)
    if key not in mapping:
        raise SchemaError(f"missing required field {key!r}", path)
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(
            f"field {key!r} has type {type(value).__name__}", f"{path}.{key}"
        )
    return value


def _coerce_start(value, path) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool):
        raise SchemaError("answer_start must be an integer", path)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        stripped = value.strip()
        if stripped.lstrip("-").isdigit():
            return int(stripped)
    raise SchemaError(f"answer_start is not an integer: {value!r}", path)


def parse_squad_json(raw: str | bytes) -> Corpus:
    """Parse SQuAD-format JSON into a Corpus.

    Malformed JSON raises ParseError with the byte position; well-formed
    JSON with a missing or mistyped field raises SchemaError naming the
    path. Records are never dropped: a qas id that collides with an
    earlier one is renamed with a ``#n`` suffix and the rename is logged,
    so ids are unique after parse.
    """
    if isinstance(raw, bytes):
        text = raw.decode("utf-8", errors="replace")
    else:
        text = raw
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        byte_pos = len(text[: err.pos].encode("utf-8"))
        raise ParseError(f"invalid JSON: {err.msg}", byte_pos) from err

    data = _require(doc, "data", "$", list)
    version = doc.get("version")
    if version is not None:
        version = str(version)

    seen_ids: set[str] = set()
    articles = []
    for ai, raw_article in enumerate(data):
        apath = f"data[{ai}]"
        title = _require(raw_article, "title", apath)
        raw_paragraphs = _require(raw_article, "paragraphs", apath, list)
        paragraphs = []
        for pi, raw_paragraph in enumerate(raw_paragraphs):
            ppath = f"{apath}.paragraphs[{pi}]"
            context = _require(raw_paragraph, "context", ppath, str)
            raw_qas = _require(raw_paragraph, "qas", ppath, list)
            qas = []
            for qi, raw_qa in enumerate(raw_qas):
                qpath = f"{ppath}.qas[{qi}]"
                qa_id = str(_require(raw_qa, "id", qpath))
                question = _require(raw_qa, "question", qpath, str)
                raw_answers = _require(raw_qa, "answers", qpath, list)
                answers = []
                for ni, raw_answer in enumerate(raw_answers):
                    npath = f"{qpath}.answers[{ni}]"
                    atext = _require(raw_answer, "text", npath, str)
                    start = _coerce_start(
                        _require(raw_answer, "answer_start", npath),
                        f"{npath}.answer_start",
                    )
                    answers.append(AnswerSpan(text=atext, answer_start=start))
                if qa_id in seen_ids:
                    qa_id = _disambiguate(qa_id, seen_ids, qpath)
                seen_ids.add(qa_id)
                qas.append(QaRecord(id=qa_id, question=question, answers=answers))
            paragraphs.append(Paragraph(context=context, qas=qas))
        articles.append(Article(title=str(title), paragraphs=paragraphs))
    return Corpus(articles=articles, version=version)


def _disambiguate(qa_id: str, seen_ids: set[str], path: str) -> str:
    n = 2
    while f"{qa_id}#{n}" in seen_ids:
        n += 1
    new_id = f"{qa_id}#{n}"
    logger.warning("duplicate qas id %r at %s renamed to %r", qa_id, path, new_id)
    return new_id


def _find_start(context: str, text: str, claimed: int) -> tuple[int | None, str]:
    """Locate text in context, preferring positions near the claimed start.

    Returns (start, action). Tries the claimed offset first, then grows a
    window one codepoint at a time up to REPAIR_WINDOW on both sides
    (left candidate before right at equal distance), then falls back to
    the first occurrence anywhere in the context.
    """
    n = len(text)
    if 0 <= claimed and context[claimed : claimed + n] == text:
        return claimed, "exact"
    for delta in range(1, REPAIR_WINDOW + 1):
        for candidate in (claimed - delta, claimed + delta):
            if 0 <= candidate and context[candidate : candidate + n] == text:
                return candidate, "shifted"
    found = context.find(text)
    if found >= 0:
        return found, "relocated"
    return None, "dropped"


def validate_and_repair_spans(corpus: Corpus) -> tuple[Corpus, RepairLog]:
    """Check every answer span against its context and repair misaligned ones.

    Strategy per answer: accept an exact match at the claimed offset;
    otherwise search within +/-16 codepoints; otherwise take the first
    occurrence of the answer text in the whole context; otherwise drop
    the answer. Every change is recorded in the RepairLog. The input
    corpus is not mutated.
    """
    log = RepairLog()
    articles = []
    for article in corpus.articles:
        paragraphs = []
        for paragraph in article.paragraphs:
            qas = []
            for record in paragraph.qas:
                answers = []
                for idx, answer in enumerate(record.answers):
                    log.checked += 1
                    if answer.text == "":
                        log.events.append(
                            RepairEvent(
                                record_id=record.id,
                                answer_index=idx,
                                action="dropped",
                                old_start=answer.answer_start,
                                new_start=None,
                                reason="empty answer text",
                            )
                        )
                        continue
                    start, action = _find_start(
                        paragraph.context, answer.text, answer.answer_start
                    )
                    if action == "exact":
                        log.exact += 1
                        answers.append(AnswerSpan(answer.text, answer.answer_start))
                        continue
                    if start is None:
                        log.events.append(
                            RepairEvent(
                                record_id=record.id,
                                answer_index=idx,
                                action="dropped",
                                old_start=answer.answer_start,
                                new_start=None,
                                reason="answer text not found in context",
                            )
                        )
                        continue
                    log.events.append(
                        RepairEvent(
                            record_id=record.id,
                            answer_index=idx,
                            action=action,
                            old_start=answer.answer_start,
                            new_start=start,
                            reason="span text mismatch at claimed offset",
                        )
                    )
                    answers.append(AnswerSpan(answer.text, start))
                qas.append(
                    QaRecord(id=record.id, question=record.question, answers=answers)
                )
            paragraphs.append(Paragraph(context=paragraph.context, qas=qas))
        articles.append(Article(title=article.title, paragraphs=paragraphs))
    return Corpus(articles=articles, version=corpus.version), log


@dataclass
class LengthSummary:
    count: int
    min: int
    max: int
    mean: float
    median: float

    @classmethod
    def of(cls, values: list[int]) -> "LengthSummary":
        if not values:
            return cls(count=0, min=0, max=0, mean=0.0, median=0.0)
        return cls(
            count=len(values),
            min=min(values),
            max=max(values),
            mean=statistics.fmean(values),
            median=float(statistics.median(values)),
        )


@dataclass
class CorpusStats:
    articles: int
    paragraphs: int
    questions: int
    answers: int
    context_length: LengthSummary
    question_length: LengthSummary
    answer_length: LengthSummary


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Count articles/paragraphs/questions/answers and summarize lengths.

    Lengths are codepoint counts. Question and answer counts are raw
    entry counts, not distinct texts.
    """
    context_lengths = []
    question_lengths = []
    answer_lengths = []
    paragraph_count = 0
    question_count = 0
    for article in corpus.articles:
        for paragraph in article.paragraphs:
            paragraph_count += 1
            context_lengths.append(len(paragraph.context))
            for record in paragraph.qas:
                question_count += 1
                question_lengths.append(len(record.question))
                for answer in record.answers:
                    answer_lengths.append(len(answer.text))
    return CorpusStats(
        articles=len(corpus.articles),
        paragraphs=paragraph_count,
        questions=question_count,
        answers=len(answer_lengths),
        context_length=LengthSummary.of(context_lengths),
        question_length=LengthSummary.of(question_lengths),
        answer_length=LengthSummary.of(answer_lengths),
    )


def corpus_to_json(corpus: Corpus) -> str:
    """Serialize a Corpus back to SQuAD-format JSON.

    parse_squad_json(corpus_to_json(c)) reproduces c exactly provided
    c's ids are already unique.
    """
    doc: dict = {}
    if corpus.version is not None:
        doc["version"] = corpus.version
    doc["data"] = [
        {
            "title": article.title,
            "paragraphs": [
                {
                    "context": paragraph.context,
                    "qas": [
                        {
                            "id": record.id,
                            "question": record.question,
                            "answers": [
                                {
                                    "text": answer.text,
                                    "answer_start": answer.answer_start,
                                }
                                for answer in record.answers
                            ],
                        }
                        for record in paragraph.qas
                    ],
                }
                for paragraph in article.paragraphs
            ],
        }
        for article in corpus.articles
    ]
    return json.dumps(doc, ensure_ascii=False, indent=1)
