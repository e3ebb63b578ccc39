"""Conversational question completion.

Turns in a session rarely stand alone ("What does it cost?"). Completion
happens in two stages: pronouns are resolved against the topic phrase of
the session's first question, then the current, first, and previous
questions are fused into a single weighted term bag, with the first
question weighted 3.25x the previous one by default.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field

from .errors import CorpusFormatError, EmptyQueryError, ParameterError
from .retrieval import WeightedQuery
from .textproc import TextprocConfig

# Leading interrogative scaffolding stripped when extracting the topic
# phrase from a session's first question. Matched longest-first on token
# boundaries; one leading sequence is removed.
DEFAULT_SCAFFOLDING: tuple[str, ...] = (
    "what is a",
    "what is an",
    "what is the",
    "what is",
    "what was the",
    "what was",
    "what are the",
    "what are",
    "what were",
    "tell me about",
    "tell me",
    "how do you",
    "how do i",
    "how does",
    "how do",
    "describe",
    "define",
)

# Standalone pronouns replaced by the topic phrase. "one" is handled
# separately: it only counts as a pronoun after become/becoming/be.
PRONOUNS = ("it", "its", "they", "them", "their", "this", "that",
            "these", "those", "he", "she", "him", "her")

_PRONOUN_RE = re.compile(
    r"(?<![\w'])(" + "|".join(PRONOUNS) + r")(?![\w'])", re.IGNORECASE
)
_BECOME_ONE_RE = re.compile(
    r"(?<![\w'])(become|becoming|be)(\s+)one(?![\w'])", re.IGNORECASE
)


@dataclass
class Turn:
    topic_id: str
    turn_number: int
    raw_utterance: str


@dataclass
class Topic:
    topic_id: str
    title: str
    description: str
    turns: list[Turn] = field(default_factory=list)


@dataclass
class FusionWeights:
    """Per-source query weights: current turn, first turn, previous turn.

    w_first/w_previous defaults to exactly 3.25. w_current has no
    published value; 5.0 keeps the current question the most influential
    and is a config knob. Zero weights are allowed (they drop that
    source entirely, e.g. (1, 0, 0) is the no-context baseline), but
    negative weights and a zero current weight are errors.
    """

    w_current: float = 5.0
    w_first: float = 3.25
    w_previous: float = 1.0

    def validate(self) -> None:
        if self.w_current <= 0:
            raise ParameterError(f"w_current must be > 0, got {self.w_current}")
        if self.w_first < 0 or self.w_previous < 0:
            raise ParameterError("fusion weights must be >= 0")
        if not (self.w_current >= self.w_first >= self.w_previous):
            warnings.warn(
                "fusion weights are not ordered w_current >= w_first >= w_previous"
                f": ({self.w_current}, {self.w_first}, {self.w_previous})",
                stacklevel=2,
            )

    @classmethod
    def parse(cls, text: str) -> "FusionWeights":
        """Parse 'w_current,w_first,w_previous', e.g. '5.0,3.25,1.0'."""
        parts = text.split(",")
        if len(parts) != 3:
            raise ParameterError(f"expected three comma-separated weights, got {text!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ParameterError(f"non-numeric fusion weight in {text!r}") from None
        weights = cls(*values)
        weights.validate()
        return weights


def load_topics(path) -> list[Topic]:
    """Load a topics JSON file: a list of {number, title, description, turn}."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"topics file is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise CorpusFormatError("topics file must be a JSON array of topics")
    topics = []
    for pos, entry in enumerate(data, 1):
        if not isinstance(entry, dict) or "number" not in entry:
            raise CorpusFormatError(f"topic #{pos} missing 'number'")
        topic_id = str(entry["number"])
        raw_turns = entry.get("turn", [])
        if not raw_turns:
            raise CorpusFormatError(f"topic {topic_id} has no turns")
        turns = []
        for t in raw_turns:
            if "number" not in t or "raw_utterance" not in t:
                raise CorpusFormatError(
                    f"topic {topic_id}: turns need 'number' and 'raw_utterance'"
                )
            turns.append(Turn(topic_id, int(t["number"]), str(t["raw_utterance"])))
        turns.sort(key=lambda t: t.turn_number)
        if [t.turn_number for t in turns] != list(range(1, len(turns) + 1)):
            raise CorpusFormatError(
                f"topic {topic_id}: turn numbers must be contiguous from 1"
            )
        topics.append(
            Topic(
                topic_id=topic_id,
                title=str(entry.get("title", "")),
                description=str(entry.get("description", "")),
                turns=turns,
            )
        )
    return topics


def extract_topic_phrase(
    first_utterance: str, scaffolding: tuple[str, ...] = DEFAULT_SCAFFOLDING
) -> str:
    """Topic phrase of a session: the first question minus its scaffolding.

    "What is a physician's assistant?" -> "physician's assistant". If
    stripping scaffolding leaves nothing, the whole (lowercased, sans
    "?") utterance is kept.
    """
    text = first_utterance.strip().rstrip("?").strip().lower()
    for prefix in sorted(scaffolding, key=len, reverse=True):
        if text == prefix:
            # Degenerate question like "What is?": nothing left to keep.
            return text
        if text.startswith(prefix + " "):
            remainder = text[len(prefix):].strip()
            return remainder if remainder else text
    return text


def resolve_references(
    utterance: str, session_history: list[Turn], topic_phrase: str
) -> str:
    """Replace pronouns with the topic phrase; identity on turn 1."""
    if not session_history:
        return utterance
    resolved = _BECOME_ONE_RE.sub(
        lambda m: m.group(1) + m.group(2) + topic_phrase, utterance
    )
    return _PRONOUN_RE.sub(topic_phrase, resolved)


def compose_weighted_query(
    current: str,
    first: str | None,
    previous: str | None,
    weights: FusionWeights,
    config: TextprocConfig,
) -> WeightedQuery:
    """Fuse the (resolved) current, first, and previous questions.

    Every term occurrence contributes its source weight; contributions
    for the same term are summed. At turn 2 the previous turn IS the
    first turn: callers pass it as `first` only (previous=None) so it is
    counted once, at the higher w_first.
    """
    weights.validate()
    if not config.terms(current):
        raise EmptyQueryError(f"no query terms survive tokenization: {current!r}")
    sources = [
        (current, weights.w_current),
        (first, weights.w_first),
        (previous, weights.w_previous),
    ]
    pairs: list[tuple[str, float]] = []
    for text, weight in sources:
        if text is None or weight == 0:
            continue
        pairs.extend((term, weight) for term in config.terms(text))
    merged = WeightedQuery(terms=pairs).merged()
    return WeightedQuery(terms=list(merged.items()))
