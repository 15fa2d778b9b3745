"""Dataset engineering and evaluation for Turkish question answering
and question generation.

The package covers the full loop around a text-to-text model: fetching
and validating the published corpora, splitting Turkish text into
sentences, rendering multitask training samples, scoring predictions,
and driving a generation backend over a small wire protocol (with a
deterministic mock for offline work).
"""

from .backend import (
    GenerationClient,
    GenerationRequest,
    GenerationResponse,
    RetryPolicy,
    check_health,
    generate_batch,
)
from .corpus import (
    AnswerSpan,
    Article,
    Corpus,
    CorpusStats,
    Paragraph,
    QaRecord,
    RepairLog,
    corpus_stats,
    corpus_to_json,
    parse_squad_json,
    validate_and_repair_spans,
)
from .datasets import available_datasets, fetch_dataset, load_dataset
from .errors import (
    BackendError,
    ContractViolation,
    EvaluationError,
    IntegrityError,
    ParseError,
    ProtocolError,
    RuleError,
    SchemaError,
    TransportError,
    TrqgError,
    UsageError,
)
from .formatting import (
    FormattedSample,
    QgFormat,
    Task,
    build_multitask_dataset,
    format_answer_extraction,
    format_qa,
    format_qg,
    serialize_jsonl,
)
from .metrics import (
    QaScores,
    bleu_n,
    corpus_qa_scores,
    exact_match,
    normalize,
    rouge_l,
    token_f1,
)
from .mock_server import MockBackendServer, MockFixture, load_fixtures, serve_mock
from .pipeline import (
    GeneratedPair,
    PipelineFailure,
    extract_answers,
    generate_qa_pairs,
    generate_question,
)
from .sentences import (
    ProtectionRule,
    RuleSet,
    SentenceSpan,
    default_rules,
    find_covering_sentence,
    load_rules,
    split_sentences,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerSpan",
    "Article",
    "BackendError",
    "ContractViolation",
    "Corpus",
    "CorpusStats",
    "EvaluationError",
    "FormattedSample",
    "GeneratedPair",
    "GenerationClient",
    "GenerationRequest",
    "GenerationResponse",
    "IntegrityError",
    "MockBackendServer",
    "MockFixture",
    "Paragraph",
    "ParseError",
    "PipelineFailure",
    "ProtectionRule",
    "ProtocolError",
    "QaRecord",
    "QaScores",
    "QgFormat",
    "RepairLog",
    "RetryPolicy",
    "RuleError",
    "RuleSet",
    "SchemaError",
    "SentenceSpan",
    "Task",
    "TransportError",
    "TrqgError",
    "UsageError",
    "available_datasets",
    "bleu_n",
    "build_multitask_dataset",
    "check_health",
    "corpus_qa_scores",
    "corpus_stats",
    "corpus_to_json",
    "default_rules",
    "exact_match",
    "extract_answers",
    "fetch_dataset",
    "find_covering_sentence",
    "format_answer_extraction",
    "format_qa",
    "format_qg",
    "generate_batch",
    "generate_qa_pairs",
    "generate_question",
    "load_dataset",
    "load_fixtures",
    "load_rules",
    "normalize",
    "parse_squad_json",
    "rouge_l",
    "serialize_jsonl",
    "serve_mock",
    "split_sentences",
    "token_f1",
    "validate_and_repair_spans",
]
