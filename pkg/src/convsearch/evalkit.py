"""TREC-format run/qrels I/O and graded evaluation.

Metrics are Recall@k and NDCG@k (linear gain, log2(rank+1) discount —
the trec_eval ndcg_cut convention). Queries with no relevant document
are reported n/a and excluded from means, also following trec_eval.
Reports aggregate per question category and overall, and two reports
can be diffed into a baseline-vs-method delta table.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .classify import QuestionCategory
from .errors import ConvSearchError, ParameterError, QrelsParseError, RunParseError

logger = logging.getLogger(__name__)

METRICS = ("recall", "ndcg")
GRADES = (0, 1, 2)


@dataclass
class Qrels:
    """Graded judgments, grouped by query: query_id -> doc_id -> grade."""

    by_query: dict[str, dict[str, int]] = field(default_factory=dict)

    def grades(self, query_id: str) -> dict[str, int]:
        return self.by_query.get(query_id, {})


@dataclass
class RunEntry:
    doc_id: str
    score: float
    rank: int


@dataclass
class RunList:
    run_tag: str
    by_query: dict[str, list[RunEntry]] = field(default_factory=dict)


def parse_qrels(path) -> Qrels:
    """Parse 'query_id 0 doc_id grade' lines; grades must be 0, 1, or 2."""
    by_query: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise QrelsParseError("expected 4 fields", line=lineno)
            query_id, _, doc_id, grade_text = parts
            try:
                grade = int(grade_text)
            except ValueError:
                raise QrelsParseError(f"bad grade {grade_text!r}", line=lineno) from None
            if grade not in GRADES:
                raise QrelsParseError(f"grade {grade} outside {{0,1,2}}", line=lineno)
            docs = by_query.setdefault(query_id, {})
            if doc_id in docs:
                raise QrelsParseError(
                    f"duplicate judgment for ({query_id}, {doc_id})", line=lineno
                )
            docs[doc_id] = grade
    return Qrels(by_query=by_query)


def parse_run(path) -> RunList:
    """Parse 'query_id Q0 doc_id rank score run_tag' lines.

    Ranks must be contiguous from 1 per query, scores non-increasing,
    doc_ids unique per query, and the run tag consistent file-wide.
    """
    run_tag: str | None = None
    by_query: dict[str, list[RunEntry]] = {}
    seen: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 6:
                raise RunParseError("expected 6 fields", line=lineno)
            query_id, _, doc_id, rank_text, score_text, tag = parts
            try:
                rank = int(rank_text)
                score = float(score_text)
            except ValueError:
                raise RunParseError("bad rank or score", line=lineno) from None
            if run_tag is None:
                run_tag = tag
            elif tag != run_tag:
                raise RunParseError(
                    f"run tag changed from {run_tag!r} to {tag!r}", line=lineno
                )
            entries = by_query.setdefault(query_id, [])
            if rank != len(entries) + 1:
                raise RunParseError(
                    f"rank {rank} for query {query_id}, expected {len(entries) + 1}",
                    line=lineno,
                )
            if entries and score > entries[-1].score:
                raise RunParseError(
                    f"score increases at rank {rank} of query {query_id}", line=lineno
                )
            docs = seen.setdefault(query_id, set())
            if doc_id in docs:
                raise RunParseError(
                    f"duplicate doc {doc_id} for query {query_id}", line=lineno
                )
            docs.add(doc_id)
            entries.append(RunEntry(doc_id=doc_id, score=score, rank=rank))
    return RunList(run_tag=run_tag or "run", by_query=by_query)


def write_run(run: RunList, path) -> None:
    """Write TREC run lines with 6-decimal scores; inverse of parse_run."""
    with open(path, "w", encoding="utf-8") as fh:
        for query_id, entries in run.by_query.items():
            for e in entries:
                fh.write(
                    f"{query_id} Q0 {e.doc_id} {e.rank} {e.score:.6f} {run.run_tag}\n"
                )


def recall_at_k(
    ranking: Sequence[str],
    grades: Mapping[str, int],
    k: int,
    rel_threshold: int = 1,
) -> float | None:
    """Fraction of relevant docs in the top k; None when none are relevant."""
    if rel_threshold not in (1, 2):
        raise ParameterError(f"rel_threshold must be 1 or 2, got {rel_threshold}")
    relevant = {d for d, g in grades.items() if g >= rel_threshold}
    if not relevant:
        return None
    hits = sum(1 for d in ranking[:k] if d in relevant)
    return hits / len(relevant)


def ndcg_at_k(ranking: Sequence[str], grades: Mapping[str, int], k: int) -> float | None:
    """NDCG@k with linear gain; None when the query has no positive grade."""
    ideal = sorted((g for g in grades.values() if g > 0), reverse=True)
    if not ideal:
        return None
    dcg = sum(
        grades.get(d, 0) / math.log2(i + 1) for i, d in enumerate(ranking[:k], 1)
    )
    idcg = sum(g / math.log2(i + 1) for i, g in enumerate(ideal[:k], 1))
    return dcg / idcg


@dataclass
class MetricReport:
    run_tag: str
    ks: list[int]
    rel_threshold: int
    # query_id -> metric -> k -> value (None = n/a for that query)
    per_query: dict[str, dict[str, dict[int, float | None]]]
    category_of: dict[str, str]

    @property
    def n(self) -> int:
        return len(self.per_query)

    def categories(self) -> list[str]:
        present = set(self.category_of.values())
        ordered = [c.value for c in QuestionCategory if c.value in present]
        ordered += sorted(present - set(ordered))
        return ordered

    def mean(self, metric: str, k: int, category: str | None = None) -> float | None:
        """Mean over evaluated queries; None when every query is n/a."""
        values = [
            by_metric[metric][k]
            for query_id, by_metric in self.per_query.items()
            if category is None or self.category_of[query_id] == category
        ]
        values = [v for v in values if v is not None]
        if not values:
            return None
        return sum(values) / len(values)

    def rows(self) -> list[tuple[str, str, int, float | None]]:
        out = []
        for metric in METRICS:
            for k in self.ks:
                for category in self.categories():
                    out.append((category, metric, k, self.mean(metric, k, category)))
                out.append(("Overall", metric, k, self.mean(metric, k)))
        return out

    def to_tsv(self) -> str:
        lines = ["category\tmetric\tk\tmean"]
        for category, metric, k, value in self.rows():
            lines.append(f"{category}\t{metric}\t{k}\t{_fmt(value)}")
        return "\n".join(lines) + "\n"

    def pretty(self) -> str:
        lines = [f"run: {self.run_tag}   queries: {self.n}"]
        width = max((len(c) for c in self.categories()), default=7)
        width = max(width, len("Overall"))
        for category, metric, k, value in self.rows():
            lines.append(f"  {category:<{width}}  {metric}@{k:<5} {_fmt(value)}")
        return "\n".join(lines) + "\n"


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6f}"


def evaluate(
    run: RunList,
    qrels: Qrels,
    categories: Mapping[str, str | QuestionCategory] | None = None,
    ks: Sequence[int] = (10, 1000),
    rel_threshold: int = 1,
) -> MetricReport:
    """Score a run against qrels; uncategorized queries aggregate as Other."""
    if rel_threshold not in (1, 2):
        raise ParameterError(f"rel_threshold must be 1 or 2, got {rel_threshold}")
    categories = categories or {}
    per_query: dict[str, dict[str, dict[int, float | None]]] = {}
    category_of: dict[str, str] = {}
    for query_id, entries in run.by_query.items():
        if query_id not in qrels.by_query:
            logger.warning("query %s has no judgments; excluded", query_id)
            continue
        grades = qrels.by_query[query_id]
        ranking = [e.doc_id for e in entries]
        per_query[query_id] = {
            "recall": {
                k: recall_at_k(ranking, grades, k, rel_threshold) for k in ks
            },
            "ndcg": {k: ndcg_at_k(ranking, grades, k) for k in ks},
        }
        category = categories.get(query_id, QuestionCategory.OTHER)
        if isinstance(category, QuestionCategory):
            category = category.value
        category_of[query_id] = str(category)
    if not per_query:
        logger.warning("no overlap between run and qrels queries; empty report")
    return MetricReport(
        run_tag=run.run_tag,
        ks=list(ks),
        rel_threshold=rel_threshold,
        per_query=per_query,
        category_of=category_of,
    )


@dataclass
class CompareReport:
    tag_a: str
    tag_b: str
    # (category, metric, k, mean_a, mean_b, delta) with None for n/a
    rows: list[tuple[str, str, int, float | None, float | None, float | None]]

    def to_tsv(self) -> str:
        lines = ["category\tmetric\tk\t" + f"{self.tag_a}\t{self.tag_b}\tdelta"]
        for category, metric, k, a, b, delta in self.rows:
            lines.append(
                f"{category}\t{metric}\t{k}\t{_fmt(a)}\t{_fmt(b)}\t{_fmt(delta)}"
            )
        return "\n".join(lines) + "\n"

    def pretty(self) -> str:
        width = max((len(r[0]) for r in self.rows), default=7)
        lines = [f"{self.tag_a} vs {self.tag_b}"]
        for category, metric, k, a, b, delta in self.rows:
            lines.append(
                f"  {category:<{width}}  {metric}@{k:<5} "
                f"{_fmt(a):>9}  {_fmt(b):>9}  {_fmt(delta):>9}"
            )
        return "\n".join(lines) + "\n"


def compare(report_a: MetricReport, report_b: MetricReport) -> CompareReport:
    """Per-category and overall deltas (b - a) between two reports."""
    if report_a.ks != report_b.ks:
        raise ConvSearchError(
            f"reports have different k values: {report_a.ks} vs {report_b.ks}"
        )
    present = set(report_a.categories()) | set(report_b.categories())
    ordered = [c.value for c in QuestionCategory if c.value in present]
    ordered += sorted(present - set(ordered))
    rows = []
    for metric in METRICS:
        for k in report_a.ks:
            for category in [*ordered, None]:
                a = report_a.mean(metric, k, category)
                b = report_b.mean(metric, k, category)
                delta = None if a is None or b is None else b - a
                rows.append((category or "Overall", metric, k, a, b, delta))
    return CompareReport(tag_a=report_a.run_tag, tag_b=report_b.run_tag, rows=rows)


def parse_categories(path) -> dict[str, str]:
    """Read the 'query_id<TAB>category' sidecar the pipeline writes."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            query_id, _, category = line.partition("\t")
            out[query_id] = category.strip()
    return out


def write_categories(categories: Mapping[str, str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for query_id, category in categories.items():
            fh.write(f"{query_id}\t{category}\n")
