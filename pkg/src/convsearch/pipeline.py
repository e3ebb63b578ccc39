"""End-to-end orchestration.

Two front doors over the same per-turn sequence (resolve references,
classify, compose the weighted query, retrieve, rerank):

* run_pipeline: batch mode over a topics file, producing a TREC run
  file plus sidecars (per-query categories for evaluation, and a JSON
  record of every parameter needed to reproduce the run).
* SessionEngine: stateful interactive sessions for the HTTP service,
  one conversation per session, with snippet extraction.
"""

from __future__ import annotations

import dataclasses
import json
import re
import threading
import time
import uuid
import warnings
from dataclasses import dataclass, field

from .classify import ClassifierRules, QuestionCategory, classify, default_rules
from .errors import (ConfigMismatchError, ConvSearchError, EmptyQueryError,
                     UnknownSessionError)
from .evalkit import RunEntry, RunList, write_categories, write_run
from .index import InvertedIndex
from .rerank import CueLexicon, RerankParams, cue_count, default_lexicon, rerank
from .retrieval import RetrievalParams, search
from .rewrite import (FusionWeights, Topic, Turn, compose_weighted_query,
                      extract_topic_phrase, resolve_references)
from .textproc import TextprocConfig, fnv1a64

SNIPPET_WIDTH = 300
_WORD_START = re.compile(r"\S+")


@dataclass
class PipelineParams:
    weights: FusionWeights = field(default_factory=FusionWeights)
    retrieval: RetrievalParams = field(default_factory=RetrievalParams)
    rerank: RerankParams = field(default_factory=RerankParams)
    resolve: bool = True  # turn off to feed raw utterances through (ablation)
    use_title: bool = False  # fold topic title terms in at w_previous
    run_tag: str = "convsearch"
    # When set, must match the config the index was built with; guards
    # against silently querying in a different term space.
    textproc: TextprocConfig | None = None


def rules_hash(rules: ClassifierRules) -> str:
    dump = "\n".join(f"{r.kind}|{r.pattern}|{r.category.value}" for r in rules.rules)
    return f"{fnv1a64(dump.encode('utf-8')):016x}"


def lexicon_hash(lexicon: CueLexicon) -> str:
    dump = "\n".join(
        f"{cat.value}|{m.kind}|{m.pattern}"
        for cat, matchers in sorted(lexicon.matchers.items(), key=lambda kv: kv[0].value)
        for m in matchers
    )
    return f"{fnv1a64(dump.encode('utf-8')):016x}"


def _turn_query(
    turn: Turn,
    history: list[Turn],
    topic_phrase: str,
    first_resolved: str | None,
    prev_resolved: str | None,
    params: PipelineParams,
    index: InvertedIndex,
    rules: ClassifierRules,
):
    """Resolve + classify + compose for one turn; shared by batch and service."""
    if params.resolve:
        resolved = resolve_references(turn.raw_utterance, history, topic_phrase)
    else:
        resolved = turn.raw_utterance
    category = classify(resolved, rules)
    first_arg = first_resolved if turn.turn_number > 1 else None
    # At turn 2 the previous turn is the first turn; it rides in as
    # `first` only, so its terms are counted once at w_first.
    prev_arg = prev_resolved if turn.turn_number > 2 else None
    query = compose_weighted_query(resolved, first_arg, prev_arg, params.weights, index.config)
    return resolved, category, query


def _fold_title(query, title: str, weight: float, index: InvertedIndex):
    """Add topic-title terms at the given weight (the --use-title flag)."""
    if weight <= 0:
        return query
    from .retrieval import WeightedQuery

    pairs = list(query.terms)
    pairs.extend((term, weight) for term in index.config.terms(title))
    merged = WeightedQuery(terms=pairs).merged()
    return WeightedQuery(terms=list(merged.items()))


def run_pipeline(
    topics: list[Topic],
    index: InvertedIndex,
    params: PipelineParams,
    run_path,
    rules: ClassifierRules | None = None,
    lexicon: CueLexicon | None = None,
) -> RunList:
    """Batch: one ranked list per turn, query ids "topicid_turnnumber".

    Writes the run file plus two sidecars: <run>.categories.tsv mapping
    query ids to predicted categories, and <run>.meta.json recording
    parameters and rule/lexicon hashes sufficient to reproduce the run.
    """
    if not topics:
        raise ConvSearchError("no topics to run")
    if (
        params.textproc is not None
        and params.textproc.fingerprint() != index.config.fingerprint()
    ):
        raise ConfigMismatchError(
            "requested text processing differs from the index's; rebuild the "
            "index or drop the override"
        )
    params.weights.validate()
    params.retrieval.validate()
    params.rerank.validate()
    rules = rules or default_rules()
    lexicon = lexicon or default_lexicon()

    run = RunList(run_tag=params.run_tag, by_query={})
    categories: dict[str, str] = {}
    for topic in topics:
        topic_phrase = extract_topic_phrase(topic.turns[0].raw_utterance)
        history: list[Turn] = []
        first_resolved: str | None = None
        prev_resolved: str | None = None
        for turn in topic.turns:
            query_id = f"{topic.topic_id}_{turn.turn_number}"
            try:
                resolved, category, query = _turn_query(
                    turn, history, topic_phrase, first_resolved,
                    prev_resolved, params, index, rules,
                )
            except EmptyQueryError:
                warnings.warn(f"query {query_id}: no terms survive; skipped")
                history.append(turn)
                continue
            if params.use_title and topic.title:
                query = _fold_title(query, topic.title, params.weights.w_previous, index)
            ranked = search(index, query, params.retrieval)
            ranked = rerank(ranked, category, lexicon, params.rerank, index.text_of)
            categories[query_id] = category.value
            if ranked:
                run.by_query[query_id] = [
                    RunEntry(doc_id=d.doc_id, score=d.score, rank=d.rank) for d in ranked
                ]
            history.append(turn)
            if turn.turn_number == 1:
                first_resolved = resolved
            prev_resolved = resolved
    write_run(run, run_path)
    write_categories(categories, f"{run_path}.categories.tsv")
    _write_meta(f"{run_path}.meta.json", params, index, rules, lexicon)
    return run


def _write_meta(path, params: PipelineParams, index: InvertedIndex,
                rules: ClassifierRules, lexicon: CueLexicon) -> None:
    meta = {
        "run_tag": params.run_tag,
        "weights": dataclasses.asdict(params.weights),
        "retrieval": dataclasses.asdict(params.retrieval),
        "rerank": {"lambda": params.rerank.lambda_, "depth": params.rerank.depth},
        "resolve": params.resolve,
        "use_title": params.use_title,
        "rules_hash": rules_hash(rules),
        "lexicon_hash": lexicon_hash(lexicon),
        "textproc_fingerprint": f"{index.config.fingerprint():016x}",
        "doc_count": index.doc_count,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def make_snippet(
    text: str,
    category: QuestionCategory,
    lexicon: CueLexicon,
    width: int = SNIPPET_WIDTH,
) -> str:
    """The width-char window with the most answer-type cues (ties: earliest)."""
    if len(text) <= width:
        return text
    starts = [m.start() for m in _WORD_START.finditer(text) if m.start() <= len(text) - width]
    if not starts or starts[0] != 0:
        starts.insert(0, 0)
    last = len(text) - width
    if starts[-1] != last:
        starts.append(last)
    best_start, best_count = 0, -1
    for start in starts:
        count = cue_count(category, text[start : start + width], lexicon)
        if count > best_count:
            best_start, best_count = start, count
    return text[best_start : best_start + width]


@dataclass
class AskResult:
    doc_id: str
    score: float
    snippet: str


@dataclass
class AskResponse:
    resolved_query: str
    category: QuestionCategory
    weighted_terms: list[tuple[str, float]]
    results: list[AskResult]


@dataclass
class TurnRecord:
    raw_utterance: str
    resolved_utterance: str
    category: QuestionCategory
    results: list[AskResult]


@dataclass
class SessionState:
    session_id: str
    created_at: float
    topic_phrase: str = ""
    turns: list[TurnRecord] = field(default_factory=list)
    first_resolved: str | None = None
    prev_resolved: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)


class SessionEngine:
    """In-memory conversational sessions over a shared read-only index."""

    def __init__(
        self,
        index: InvertedIndex,
        weights: FusionWeights | None = None,
        retrieval: RetrievalParams | None = None,
        rerank_params: RerankParams | None = None,
        rules: ClassifierRules | None = None,
        lexicon: CueLexicon | None = None,
    ):
        self.index = index
        self.weights = weights or FusionWeights()
        self.retrieval = retrieval or RetrievalParams()
        self.rerank_params = rerank_params or RerankParams()
        self.rules = rules or default_rules()
        self.lexicon = lexicon or default_lexicon()
        self._sessions: dict[str, SessionState] = {}
        self._registry_lock = threading.Lock()

    def create_session(self) -> str:
        session_id = uuid.uuid4().hex
        with self._registry_lock:
            self._sessions[session_id] = SessionState(
                session_id=session_id, created_at=time.time()
            )
        return session_id

    def _get(self, session_id: str) -> SessionState:
        with self._registry_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def get_history(self, session_id: str) -> SessionState:
        return self._get(session_id)

    def delete_session(self, session_id: str) -> None:
        with self._registry_lock:
            if session_id not in self._sessions:
                raise UnknownSessionError(f"unknown session {session_id!r}")
            del self._sessions[session_id]

    def ask(
        self,
        session_id: str,
        utterance: str,
        k: int = 10,
        rerank_lambda: float | None = None,
    ) -> AskResponse:
        session = self._get(session_id)
        if not utterance or not utterance.strip():
            raise EmptyQueryError("empty utterance")
        with session.lock:
            turn_number = len(session.turns) + 1
            if turn_number == 1:
                session.topic_phrase = extract_topic_phrase(utterance)
            turn = Turn("session", turn_number, utterance)
            history = [
                Turn("session", i, t.raw_utterance)
                for i, t in enumerate(session.turns, 1)
            ]
            params = PipelineParams(
                weights=self.weights,
                retrieval=dataclasses.replace(self.retrieval, k=k),
                rerank=self.rerank_params
                if rerank_lambda is None
                else dataclasses.replace(self.rerank_params, lambda_=rerank_lambda),
            )
            resolved, category, query = _turn_query(
                turn, history, session.topic_phrase,
                session.first_resolved, session.prev_resolved,
                params, self.index, self.rules,
            )
            ranked = search(self.index, query, params.retrieval)
            ranked = rerank(ranked, category, self.lexicon, params.rerank, self.index.text_of)
            results = [
                AskResult(
                    doc_id=d.doc_id,
                    score=d.score,
                    snippet=make_snippet(self.index.text_of(d.doc_id), category, self.lexicon),
                )
                for d in ranked
            ]
            record = TurnRecord(
                raw_utterance=utterance,
                resolved_utterance=resolved,
                category=category,
                results=results,
            )
            session.turns.append(record)
            if turn_number == 1:
                session.first_resolved = resolved
            session.prev_resolved = resolved
            return AskResponse(
                resolved_query=resolved,
                category=category,
                weighted_terms=list(query.terms),
                results=results,
            )
