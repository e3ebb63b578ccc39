"""Weighted-query scoring over the inverted index.

The primary scorer is Dirichlet-smoothed query likelihood; BM25 is kept
as a comparison baseline. Query terms unseen in the collection are
skipped (contribute 0) so scores stay finite. Only documents containing
at least one query term are scored; ties break by ascending doc_id for
full determinism.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import EmptyQueryError, ParameterError
from .index import InvertedIndex


@dataclass
class WeightedQuery:
    """Bag of (term, weight) pairs; terms must already be processed
    with the same textproc config as the index."""

    terms: list[tuple[str, float]]

    def merged(self) -> dict[str, float]:
        """Sum duplicate-term weights, preserving first-occurrence order."""
        merged: dict[str, float] = {}
        for term, weight in self.terms:
            if weight <= 0:
                raise ParameterError(f"query weight for {term!r} must be positive")
            merged[term] = merged.get(term, 0.0) + weight
        return merged


@dataclass
class ScoredDoc:
    doc_id: str
    score: float
    rank: int


@dataclass
class RetrievalParams:
    mu: float = 2500.0
    k: int = 1000
    scorer: str = "ql"  # "ql" or "bm25"
    bm25_k1: float = 0.9
    bm25_b: float = 0.4

    def validate(self) -> None:
        if self.mu <= 0:
            raise ParameterError(f"mu must be positive, got {self.mu}")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.scorer not in ("ql", "bm25"):
            raise ParameterError(f"unknown scorer {self.scorer!r}")


def _ql_term_stats(index: InvertedIndex, merged: dict[str, float], mu: float):
    """Per-term (weight, mu*p(t|C), tf-by-ordinal) for terms seen in the collection."""
    stats = []
    clen = index.collection_length
    for term, weight in merged.items():
        ctf = index.collection_tf.get(term, 0)
        if ctf == 0:
            continue
        p_collection = ctf / clen
        tf_map = dict(index.dictionary[term])
        stats.append((weight, mu * p_collection, tf_map))
    return stats


def ql_score(index: InvertedIndex, query: WeightedQuery, doc_ordinal: int, mu: float = 2500.0) -> float:
    """Dirichlet-smoothed log query likelihood of one document.

    score = sum_t w(t) * ln((tf(t,d) + mu*p(t|C)) / (|d| + mu)),
    with p(t|C) = collection_tf(t) / collection_length; terms with
    p(t|C) = 0 contribute nothing.
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    stats = _ql_term_stats(index, query.merged(), mu)
    denom = index.doc_lengths[doc_ordinal] + mu
    score = 0.0
    for weight, mu_p, tf_map in stats:
        tf = tf_map.get(doc_ordinal, 0)
        score += weight * math.log((tf + mu_p) / denom)
    return score


def bm25_score(
    index: InvertedIndex,
    query: WeightedQuery,
    doc_ordinal: int,
    k1: float = 0.9,
    b: float = 0.4,
) -> float:
    """Weight-scaled Robertson BM25 with idf = ln((N-df+0.5)/(df+0.5)+1)."""
    n_docs = index.doc_count
    avgdl = index.mean_doc_length
    dl = index.doc_lengths[doc_ordinal]
    score = 0.0
    for term, weight in query.merged().items():
        postings = index.dictionary.get(term)
        if not postings:
            continue
        tf = dict(postings).get(doc_ordinal, 0)
        if tf == 0:
            continue
        df = len(postings)
        idf = math.log((n_docs - df + 0.5) / (df + 0.5) + 1.0)
        tf_part = tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl))
        score += weight * idf * tf_part
    return score


def search(index: InvertedIndex, query: WeightedQuery, params: RetrievalParams | None = None) -> list[ScoredDoc]:
    """Top-k documents by the configured scorer, score-descending.

    Documents sharing no term with the query are never materialized, so
    the result may be shorter than k. Ties break by ascending doc_id.
    """
    params = params or RetrievalParams()
    params.validate()
    merged = query.merged()
    if not merged:
        raise EmptyQueryError("empty query after processing")

    if params.scorer == "ql":
        scored = _search_ql(index, merged, params.mu)
    else:
        scored = _search_bm25(index, merged, params.bm25_k1, params.bm25_b)

    top = heapq.nsmallest(params.k, scored)
    return [
        ScoredDoc(doc_id=doc_id, score=-neg_score, rank=rank)
        for rank, (neg_score, doc_id) in enumerate(top, 1)
    ]


def _search_ql(index: InvertedIndex, merged: dict[str, float], mu: float) -> list[tuple[float, str]]:
    stats = _ql_term_stats(index, merged, mu)
    candidates: set[int] = set()
    for _, _, tf_map in stats:
        candidates.update(tf_map)
    doc_ids = index.doc_ids
    doc_lengths = index.doc_lengths
    log = math.log
    scored = []
    for ordinal in candidates:
        denom = doc_lengths[ordinal] + mu
        score = 0.0
        for weight, mu_p, tf_map in stats:
            tf = tf_map.get(ordinal, 0)
            score += weight * log((tf + mu_p) / denom)
        scored.append((-score, doc_ids[ordinal]))
    return scored


def _search_bm25(index: InvertedIndex, merged: dict[str, float], k1: float, b: float) -> list[tuple[float, str]]:
    n_docs = index.doc_count
    avgdl = index.mean_doc_length
    doc_ids = index.doc_ids
    doc_lengths = index.doc_lengths
    scores: dict[int, float] = {}
    for term, weight in merged.items():
        postings = index.dictionary.get(term)
        if not postings:
            continue
        df = len(postings)
        idf = math.log((n_docs - df + 0.5) / (df + 0.5) + 1.0)
        w_idf = weight * idf
        for ordinal, tf in postings:
            norm = tf + k1 * (1.0 - b + b * doc_lengths[ordinal] / avgdl)
            scores[ordinal] = scores.get(ordinal, 0.0) + w_idf * tf * (k1 + 1.0) / norm
    return [(-score, doc_ids[ordinal]) for ordinal, score in scores.items()]
