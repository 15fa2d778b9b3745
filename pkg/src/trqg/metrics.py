"""Evaluation metrics: Turkish-aware EM/F1, corpus BLEU, sentence ROUGE-L.

Every score in this module is a fraction in [0, 1]. Texts are compared
after normalize(): Turkish case folding, punctuation removal, whitespace
tokenization. There is no article stripping; Turkish has no articles to
strip and the English rule would corrupt real tokens.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import ContractViolation, EvaluationError, UsageError

# Dotted and dotless I do not survive str.lower(); map them first.
_TURKISH_CASE = str.maketrans({"İ": "i", "I": "ı"})


def normalize(text: str) -> list[str]:
    """Normalize text to a token list for scoring.

    Turkish-aware lowercasing first (İ to i, I to ı, then lower()),
    then removal of every Unicode punctuation codepoint (category P*,
    apostrophes included), then whitespace splitting.
    """
    folded = text.translate(_TURKISH_CASE).lower()
    cleaned = "".join(
        ch for ch in folded if not unicodedata.category(ch).startswith("P")
    )
    return cleaned.split()


def exact_match(prediction: str, references: Sequence[str]) -> float:
    """1.0 if the normalized prediction equals any normalized reference."""
    pred = normalize(prediction)
    return max(
        (1.0 if pred == normalize(ref) else 0.0 for ref in references),
        default=0.0,
    )


def _pair_f1(pred: list[str], gold: list[str]) -> float:
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    overlap = sum((Counter(pred) & Counter(gold)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred)
    recall = overlap / len(gold)
    return 2 * precision * recall / (precision + recall)


def token_f1(prediction: str, references: Sequence[str]) -> float:
    """Token-multiset F1 against the best-matching reference."""
    pred = normalize(prediction)
    return max((_pair_f1(pred, normalize(ref)) for ref in references), default=0.0)


@dataclass
class QaScores:
    exact_match: float
    f1: float
    count: int


def corpus_qa_scores(gold: Corpus, predictions: Mapping[str, str]) -> QaScores:
    """Score predictions keyed by record id against a gold corpus.

    Multi-reference records take the best-matching reference per metric.
    Records with no answers are skipped. Every scorable gold id must be
    present in predictions (missing ids raise EvaluationError; extra
    prediction ids are ignored). An empty scorable set yields zeros.
    """
    missing = []
    em_total = 0.0
    f1_total = 0.0
    count = 0
    for _, record in gold.records():
        if not record.answers:
            continue
        if record.id not in predictions:
            missing.append(record.id)
            continue
        references = [answer.text for answer in record.answers]
        prediction = predictions[record.id]
        em_total += exact_match(prediction, references)
        f1_total += token_f1(prediction, references)
        count += 1
    if missing:
        shown = ", ".join(missing[:10])
        suffix = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        raise EvaluationError(f"no prediction for {len(missing)} ids: {shown}{suffix}")
    if count == 0:
        return QaScores(exact_match=0.0, f1=0.0, count=0)
    return QaScores(exact_match=em_total / count, f1=f1_total / count, count=count)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(candidates: Sequence[str], references: Sequence[str], n: int = 4) -> float:
    """Corpus-level BLEU with uniform weights over orders 1..n.

    Clipped n-gram counts are pooled over the whole corpus before the
    geometric mean; the brevity penalty uses pooled lengths
    (min(1, exp(1 - r/c))). No smoothing: if any pooled precision is
    zero, the score is 0.0. Candidates and references align one to one.
    """
    if n < 1:
        raise UsageError(f"bleu order must be >= 1, got {n}")
    if len(candidates) != len(references):
        raise ContractViolation(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    if not candidates:
        return 0.0

    matched = [0] * n
    total = [0] * n
    candidate_length = 0
    reference_length = 0
    for candidate, reference in zip(candidates, references):
        cand_tokens = normalize(candidate)
        ref_tokens = normalize(reference)
        candidate_length += len(cand_tokens)
        reference_length += len(ref_tokens)
        for order in range(1, n + 1):
            cand_counts = _ngrams(cand_tokens, order)
            ref_counts = _ngrams(ref_tokens, order)
            matched[order - 1] += sum((cand_counts & ref_counts).values())
            total[order - 1] += sum(cand_counts.values())

    if candidate_length == 0:
        return 0.0
    precisions = []
    for order in range(n):
        if total[order] == 0 or matched[order] == 0:
            return 0.0
        precisions.append(matched[order] / total[order])
    geometric = math.exp(sum(math.log(p) for p in precisions) / n)
    if candidate_length >= reference_length:
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - reference_length / candidate_length)
    return brevity * geometric


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(candidates: Sequence[str], references: Sequence[str]) -> float:
    """Sentence-level ROUGE-L F1 (beta = 1) averaged over aligned pairs.

    A pair where both sides normalize to nothing scores 1.0; a pair
    where exactly one side is empty, or the LCS is empty, scores 0.0.
    An empty corpus scores 0.0.
    """
    if len(candidates) != len(references):
        raise ContractViolation(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    if not candidates:
        return 0.0
    total = 0.0
    for candidate, reference in zip(candidates, references):
        cand_tokens = normalize(candidate)
        ref_tokens = normalize(reference)
        if not cand_tokens and not ref_tokens:
            total += 1.0
            continue
        lcs = _lcs_length(cand_tokens, ref_tokens)
        if lcs == 0:
            continue
        precision = lcs / len(cand_tokens)
        recall = lcs / len(ref_tokens)
        total += 2 * precision * recall / (precision + recall)
    return total / len(candidates)


def qg_scores(candidates: Sequence[str], references: Sequence[str]) -> dict[str, float]:
    """The generation-quality summary used by the CLI: BLEU-1/2, ROUGE-L."""
    return {
        "bleu_1": bleu_n(candidates, references, 1),
        "bleu_2": bleu_n(candidates, references, 2),
        "rouge_l": rouge_l(candidates, references),
    }
