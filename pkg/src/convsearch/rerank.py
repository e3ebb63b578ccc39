"""Answer-type cue reranking.

A Who question wants passages naming people; a When question wants
dates. Each category has surface cue matchers (word sets, phrases,
numeric/date patterns, capitalization patterns); retrieved passages get
a soft additive bonus lambda * ln(1 + cue_count) and are re-sorted. A
bonus, not a filter: relevant passages without cues are never dropped,
and lambda=0 recovers the plain retrieval ranking for ablation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .classify import QuestionCategory
from .errors import ParameterError, RulesParseError
from .retrieval import ScoredDoc

MATCHER_KINDS = ("words", "phrase", "year", "digits", "currency", "capseq")

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'\-]*")
_DIGIT_TOKEN_RE = re.compile(r"(?<![\w.,])\d+(?:[.,]\d+)*(?!\w)")
_YEAR_RE = re.compile(r"(?<!\d)\d{4}(?!\d)")
_SENTENCE_END = re.compile(r"[.!?]")


def _tokens_with_spans(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


class CueMatcher:
    """One cue rule; count(text) is the number of hits in raw text."""

    def __init__(self, kind: str, pattern: str):
        if kind not in MATCHER_KINDS:
            raise ValueError(f"unknown matcher kind {kind!r}")
        self.kind = kind
        self.pattern = pattern
        if kind == "words":
            self._words = {w.strip().lower() for w in pattern.split(",") if w.strip()}
            if not self._words:
                raise ValueError("words matcher needs at least one word")
        elif kind == "phrase":
            tokens = pattern.lower().split()
            if not tokens:
                raise ValueError("phrase matcher needs a phrase")
            self._phrase_re = re.compile(
                r"(?<![\w'])" + r"\s+".join(map(re.escape, tokens)) + r"(?![\w'])",
                re.IGNORECASE,
            )
        elif kind == "currency":
            self._symbols = [s.strip() for s in pattern.split(",") if s.strip()]
            if not self._symbols:
                raise ValueError("currency matcher needs at least one symbol")
        elif kind == "capseq":
            # Empty pattern: capitalized bigrams not at sentence start.
            # Otherwise: capitalized word preceded by a listed token.
            self._preps = {w.strip().lower() for w in pattern.split(",") if w.strip()}

    def count(self, text: str) -> int:
        if self.kind == "words":
            return sum(
                1 for tok, _, _ in _tokens_with_spans(text)
                if tok.lower() in self._words
            )
        if self.kind == "phrase":
            return len(self._phrase_re.findall(text))
        if self.kind == "year":
            return sum(
                1 for m in _YEAR_RE.finditer(text) if 1000 <= int(m.group()) <= 2099
            )
        if self.kind == "digits":
            return len(_DIGIT_TOKEN_RE.findall(text))
        if self.kind == "currency":
            return sum(text.count(sym) for sym in self._symbols)
        return self._count_capseq(text)

    def _count_capseq(self, text: str) -> int:
        tokens = _tokens_with_spans(text)
        if self._preps:
            return sum(
                1
                for i in range(1, len(tokens))
                if tokens[i][0][0].isupper() and tokens[i - 1][0].lower() in self._preps
            )
        count = 0
        for i in range(len(tokens) - 1):
            tok, start, _ = tokens[i]
            nxt = tokens[i + 1][0]
            if not (tok[0].isupper() and nxt[0].isupper()):
                continue
            sentence_start = i == 0 or _SENTENCE_END.search(
                text, tokens[i - 1][2], start
            )
            if not sentence_start:
                count += 1
        return count


@dataclass
class CueLexicon:
    matchers: dict[QuestionCategory, list[CueMatcher]] = field(default_factory=dict)

    def for_category(self, category: QuestionCategory) -> list[CueMatcher]:
        if category in self.matchers:
            return self.matchers[category]
        # Other carries no cues of its own and borrows Describe's.
        return self.matchers.get(QuestionCategory.DESCRIBE, [])


@dataclass
class RerankParams:
    lambda_: float = 0.5
    depth: int | None = None  # None: reassess the whole ranked list

    def validate(self) -> None:
        if self.lambda_ < 0:
            raise ParameterError(f"lambda must be >= 0, got {self.lambda_}")
        if self.depth is not None and self.depth < 1:
            raise ParameterError(f"depth must be >= 1, got {self.depth}")


def _parse_lexicon(text: str) -> CueLexicon:
    by_name = {c.value: c for c in QuestionCategory}
    matchers: dict[QuestionCategory, list[CueMatcher]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 3:
            raise RulesParseError("expected 'Category|kind|pattern'", line=lineno)
        category_name, kind, pattern = parts[0].strip(), parts[1].strip(), parts[2]
        if category_name not in by_name:
            raise RulesParseError(f"unknown category {category_name!r}", line=lineno)
        try:
            matcher = CueMatcher(kind, pattern.strip())
        except ValueError as exc:
            raise RulesParseError(str(exc), line=lineno) from exc
        matchers.setdefault(by_name[category_name], []).append(matcher)
    missing = [
        c.value
        for c in QuestionCategory
        if c is not QuestionCategory.OTHER and c not in matchers
    ]
    if missing:
        raise RulesParseError(f"no cue matchers for: {', '.join(missing)}")
    return CueLexicon(matchers=matchers)


def load_lexicon(path) -> CueLexicon:
    with open(path, encoding="utf-8") as fh:
        return _parse_lexicon(fh.read())


def default_lexicon() -> CueLexicon:
    text = resources.files("convsearch.data").joinpath("cue_lexicon.txt").read_text("utf-8")
    return _parse_lexicon(text)


def cue_count(category: QuestionCategory, passage_text: str, lexicon: CueLexicon) -> int:
    return sum(m.count(passage_text) for m in lexicon.for_category(category))


def rerank(
    ranked: list[ScoredDoc],
    category: QuestionCategory,
    lexicon: CueLexicon,
    params: RerankParams,
    text_of,
) -> list[ScoredDoc]:
    """Re-sort a retrieval ranking by score + lambda*ln(1 + cue_count).

    text_of maps doc_id to the stored raw passage text (the index's
    text_of method). Only the top params.depth docs are reassessed;
    deeper docs keep their retrieval score.
    """
    params.validate()
    if params.lambda_ == 0 or not ranked:
        return [ScoredDoc(d.doc_id, d.score, i) for i, d in enumerate(ranked, 1)]
    depth = len(ranked) if params.depth is None else min(params.depth, len(ranked))
    rescored = []
    for i, doc in enumerate(ranked):
        score = doc.score
        if i < depth:
            count = cue_count(category, text_of(doc.doc_id), lexicon)
            score += params.lambda_ * math.log(1 + count)
        rescored.append((score, doc.doc_id))
    rescored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [ScoredDoc(doc_id, score, i) for i, (score, doc_id) in enumerate(rescored, 1)]
