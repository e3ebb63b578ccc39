"""Brute-force reference implementations the fast code must match.

These deliberately avoid the package's index structures: statistics are
recounted from the raw document term lists and every document is scored
by a full scan, so agreement with the optimized paths is meaningful.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter


def ql_rank_oracle(
    docs: dict[str, list[str]],
    query: list[tuple[str, float]],
    mu: float,
    k: int,
) -> list[tuple[str, float]]:
    """Dirichlet query likelihood over every doc, full scan.

    Scores each document as sum over query terms of
    weight * ln((tf + mu * ctf/|C|) / (|d| + mu)), skipping terms absent
    from the whole collection; documents matching no query term are not
    returned. Ranking: score descending, doc_id ascending, truncated to k.
    """
    collection_length = sum(len(terms) for terms in docs.values())
    collection_tf: Counter = Counter()
    for terms in docs.values():
        collection_tf.update(terms)

    merged: dict[str, float] = {}
    for term, weight in query:
        merged[term] = merged.get(term, 0.0) + weight

    scored = []
    for doc_id in docs:
        terms = docs[doc_id]
        tf = Counter(terms)
        score = 0.0
        matched = False
        for term, weight in merged.items():
            ctf = collection_tf[term]
            if ctf == 0:
                continue
            mu_p = mu * (ctf / collection_length)
            term_tf = tf.get(term, 0)
            if term_tf:
                matched = True
            score += weight * math.log((term_tf + mu_p) / (len(terms) + mu))
        if matched:
            scored.append((doc_id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def ndcg_oracle(ranking: list[str], grades: dict[str, int], k: int) -> float | None:
    """NDCG@k with the ideal DCG found by enumerating permutations.

    Only usable for small judgment sets; the caller keeps len(grades)
    small enough for the factorial enumeration.
    """
    if not any(g > 0 for g in grades.values()):
        return None
    dcg = 0.0
    for i, doc_id in enumerate(ranking[:k], 1):
        dcg += grades.get(doc_id, 0) / math.log2(i + 1)
    best = 0.0
    grade_values = list(grades.values())
    for perm in set(itertools.permutations(grade_values)):
        value = sum(g / math.log2(i + 1) for i, g in enumerate(perm[:k], 1))
        best = max(best, value)
    return dcg / best


def recall_oracle(
    ranking: list[str], grades: dict[str, int], k: int, rel_threshold: int = 1
) -> float | None:
    relevant = {doc_id for doc_id, g in grades.items() if g >= rel_threshold}
    if not relevant:
        return None
    return len(set(ranking[:k]) & relevant) / len(relevant)
