"""Rule-protected sentence splitting over codepoint offsets.

The splitter works in two passes: protection rules mark terminator
characters that must not split (abbreviations, ordinals, initials and so
on), then a single scan cuts the text at every unprotected terminator
run and at newline runs. Spans are half-open codepoint ranges that start
and end on non-whitespace, so slicing the original text by a span yields
the sentence with no surrounding whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import AnswerSpan
from .errors import ContractViolation, RuleError

TERMINATORS = ".!?…"
RULE_KINDS = frozenset(
    {"abbreviation", "date-range", "patronymic", "initial", "ordinal", "custom"}
)

_NEWLINES = "\n\r\x85  "
# Closing quotes and brackets that attach to the sentence they follow.
_TRAILERS = "\"'”’»)]}"
_ABBREV_ANCHOR = r"(?<![\w.])"


@dataclass(frozen=True)
class SentenceSpan:
    start: int
    end: int


@dataclass(frozen=True)
class ProtectionRule:
    kind: str
    rule_id: str
    pattern: str
    regex: re.Pattern


class RuleSet:
    """An ordered collection of protection rules."""

    def __init__(self, rules: Iterable[ProtectionRule]):
        self.rules = tuple(rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[ProtectionRule]:
        return iter(self.rules)

    def protected_positions(self, text: str) -> set[int]:
        """Indices of terminator characters no rule allows splitting at."""
        protected: set[int] = set()
        for rule in self.rules:
            for match in rule.regex.finditer(text):
                for i in range(match.start(), match.end()):
                    if text[i] in TERMINATORS:
                        protected.add(i)
        return protected


def _compile_rule(kind: str, rule_id: str, pattern: str, line_no: int) -> ProtectionRule:
    if kind not in RULE_KINDS:
        known = ", ".join(sorted(RULE_KINDS))
        raise RuleError(f"unknown kind {kind!r} on line {line_no}; known: {known}", rule_id)
    if not pattern:
        raise RuleError(f"empty pattern on line {line_no}", rule_id)
    if kind == "abbreviation":
        if not pattern.endswith("."):
            raise RuleError(
                f"abbreviation on line {line_no} must end with a period", rule_id
            )
        source = _ABBREV_ANCHOR + re.escape(pattern)
    else:
        source = pattern
    try:
        regex = re.compile(source)
    except re.error as err:
        raise RuleError(f"bad pattern on line {line_no}: {err}", rule_id) from err
    return ProtectionRule(kind=kind, rule_id=rule_id, pattern=pattern, regex=regex)


def load_rules(source: Path | str | Iterable[str]) -> RuleSet:
    """Load protection rules from a file, rule text, or lines.

    A Path is read as a file; a str is treated as rule text (one rule
    per line); any other iterable is treated as lines. Lines are
    tab-separated ``kind<TAB>id<TAB>pattern``; blank lines and lines
    starting with ``#`` are skipped. Unknown kinds, malformed lines,
    uncompilable patterns and duplicate ids raise RuleError.
    """
    if isinstance(source, Path):
        lines = source.read_text(encoding="utf-8").splitlines()
    elif isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]

    rules = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise RuleError(
                f"line {line_no} needs 3 tab-separated fields, got {len(parts)}"
            )
        kind, rule_id, pattern = parts[0].strip(), parts[1].strip(), parts[2]
        if not rule_id:
            raise RuleError(f"empty rule id on line {line_no}")
        if rule_id in seen_ids:
            raise RuleError(f"duplicate id on line {line_no}", rule_id)
        seen_ids.add(rule_id)
        rules.append(_compile_rule(kind, rule_id, pattern, line_no))
    return RuleSet(rules)


@lru_cache(maxsize=1)
def default_rules() -> RuleSet:
    """The packaged Turkish rule table."""
    text = resources.files("trqg.data").joinpath("sentence_rules.txt").read_text(
        encoding="utf-8"
    )
    return load_rules(text)


def split_sentences(text: str, rules: RuleSet | None = None) -> list[SentenceSpan]:
    """Split text into sentence spans.

    Boundaries occur after every run of terminator characters
    (``. ! ? …``) not protected by a rule, with trailing closing quotes
    and brackets attached to the finished sentence, and at newline runs.
    Every non-whitespace codepoint of the input is covered by exactly
    one span; spans are disjoint and strictly increasing.
    """
    if rules is None:
        rules = default_rules()
    protected = rules.protected_positions(text)

    spans = []
    start: int | None = None
    last_solid = -1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in TERMINATORS and i not in protected:
            j = i + 1
            while j < n and text[j] in TERMINATORS:
                j += 1
            while j < n and text[j] in _TRAILERS:
                j += 1
            spans.append(SentenceSpan(start if start is not None else i, j))
            start = None
            i = j
            continue
        if ch in _NEWLINES:
            if start is not None:
                spans.append(SentenceSpan(start, last_solid + 1))
                start = None
            i += 1
            continue
        if not ch.isspace():
            if start is None:
                start = i
            last_solid = i
        i += 1
    if start is not None:
        spans.append(SentenceSpan(start, last_solid + 1))
    return spans


def find_covering_sentence(
    spans: list[SentenceSpan], answer: AnswerSpan
) -> SentenceSpan:
    """Return the sentence span covering an answer.

    An answer that crosses sentence boundaries yields the merged range
    from the first to the last intersected sentence (such a range is not
    itself a member of spans). An answer intersecting no sentence raises
    ContractViolation.
    """
    a_start = answer.answer_start
    a_end = a_start + len(answer.text)
    hits = [s for s in spans if s.start < a_end and a_start < s.end]
    if not hits:
        raise ContractViolation(
            f"answer range [{a_start}, {a_end}) lies inside no sentence"
        )
    if len(hits) == 1:
        return hits[0]
    return SentenceSpan(hits[0].start, hits[-1].end)
