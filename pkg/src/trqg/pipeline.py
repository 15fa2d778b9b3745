"""Two-stage question-answer generation over raw contexts.

Stage one proposes answer candidates per sentence (answer extraction);
stage two writes a question for each candidate (question generation).
Both stages go through the wire protocol, so any conforming backend
works, the mock included. Factored as P(q, a | c) = P(a | c') P(q | a, c)
with c' the sentence-marked context.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backend import GenerationClient, GenerationRequest, RetryPolicy
from .corpus import AnswerSpan, QaRecord
from .errors import ContractViolation, TrqgError
from .formatting import (
    AE_PREFIX,
    SEPARATOR_TOKEN,
    QgFormat,
    format_qg,
    highlight_range,
)
from .sentences import RuleSet, split_sentences

DEFAULT_EXTRACTION_TOKENS = 48
DEFAULT_QUESTION_TOKENS = 64


@dataclass
class GeneratedPair:
    key: str
    answer: str
    answer_start: int | None
    question: str
    provenance: str


@dataclass
class PipelineFailure:
    key: str
    stage: str  # "answer_extraction" | "question_generation"
    detail: str


def _as_client(backend: GenerationClient | str) -> tuple[GenerationClient, bool]:
    if isinstance(backend, GenerationClient):
        return backend, False
    return GenerationClient(backend, RetryPolicy()), True


def extract_answers(
    context: str,
    backend: GenerationClient | str,
    *,
    rules: RuleSet | None = None,
    max_new_tokens: int = DEFAULT_EXTRACTION_TOKENS,
) -> list[AnswerSpan]:
    """Ask the backend for answer candidates, one input per sentence.

    Model outputs are split on the separator token; candidates that do
    not occur verbatim in the context are discarded (there is no span
    to report for them), and duplicates by text are kept once. Results
    are ordered by sentence, then by output order.
    """
    client, owned = _as_client(backend)
    try:
        spans = split_sentences(context, rules)
        if not spans:
            return []
        inputs = [
            f"{AE_PREFIX}{highlight_range(context, span.start, span.end)}"
            for span in spans
        ]
        response = client.generate(
            GenerationRequest(inputs=inputs, max_new_tokens=max_new_tokens)
        )
        answers: list[AnswerSpan] = []
        seen: set[str] = set()
        for span, output in zip(spans, response.outputs):
            for piece in output.split(SEPARATOR_TOKEN):
                text = piece.strip()
                if not text or text in seen:
                    continue
                # Prefer an occurrence inside the sentence it was
                # proposed for; fall back to the whole context.
                start = context.find(text, span.start, span.end)
                if start < 0:
                    start = context.find(text)
                if start < 0:
                    continue
                seen.add(text)
                answers.append(AnswerSpan(text=text, answer_start=start))
        return answers
    finally:
        if owned:
            client.close()


def generate_question(
    context: str,
    answer: AnswerSpan | str,
    backend: GenerationClient | str,
    *,
    qg_format: QgFormat | str = QgFormat.HIGHLIGHT,
    max_new_tokens: int = DEFAULT_QUESTION_TOKENS,
) -> str:
    """Ask the backend for one question about an answer in a context.

    A plain-string answer is located at its first occurrence in the
    context; an AnswerSpan is used as given and must be exact.
    """
    if isinstance(answer, str):
        start = context.find(answer)
        if start < 0:
            raise ContractViolation(f"answer {answer!r} does not occur in context")
        answer = AnswerSpan(text=answer, answer_start=start)
    record = QaRecord(id="", question="", answers=[answer])
    sample = format_qg(record, context, qg_format)
    client, owned = _as_client(backend)
    try:
        response = client.generate(
            GenerationRequest(inputs=[sample.input_text], max_new_tokens=max_new_tokens)
        )
        return response.outputs[0].strip()
    finally:
        if owned:
            client.close()


def generate_qa_pairs(
    context: str,
    backend: GenerationClient | str,
    *,
    key: str = "",
    qg_format: QgFormat | str = QgFormat.HIGHLIGHT,
    rules: RuleSet | None = None,
    answers: list[AnswerSpan] | None = None,
    max_new_tokens: int = DEFAULT_QUESTION_TOKENS,
) -> tuple[list[GeneratedPair], list[PipelineFailure]]:
    """Run both stages over one context.

    When answers is given, stage one is skipped and questions are
    generated for exactly those spans. Returns the generated pairs in
    deterministic order plus a failure entry for any stage that errored;
    a context with no extractable answers yields ([], []).
    """
    client, owned = _as_client(backend)
    try:
        if answers is None:
            try:
                answers = extract_answers(
                    context, client, rules=rules, max_new_tokens=max_new_tokens
                )
            except TrqgError as err:
                return [], [
                    PipelineFailure(key=key, stage="answer_extraction", detail=str(err))
                ]
        if not answers:
            return [], []

        inputs = []
        for answer in answers:
            record = QaRecord(id="", question="", answers=[answer])
            inputs.append(format_qg(record, context, qg_format).input_text)
        try:
            response = client.generate(
                GenerationRequest(inputs=inputs, max_new_tokens=max_new_tokens)
            )
        except TrqgError as err:
            return [], [
                PipelineFailure(key=key, stage="question_generation", detail=str(err))
            ]
        pairs = [
            GeneratedPair(
                key=key,
                answer=answer.text,
                answer_start=answer.answer_start,
                question=question.strip(),
                provenance=response.model_id,
            )
            for answer, question in zip(answers, response.outputs)
        ]
        return pairs, []
    finally:
        if owned:
            client.close()
