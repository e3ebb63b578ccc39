import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from convsearch.errors import ConvSearchError, ParameterError, QrelsParseError, RunParseError
from convsearch.evalkit import (
    MetricReport,
    Qrels,
    RunEntry,
    RunList,
    compare,
    evaluate,
    ndcg_at_k,
    parse_categories,
    parse_qrels,
    parse_run,
    recall_at_k,
    write_categories,
    write_run,
)
from oracles import ndcg_oracle, recall_oracle


class TestMetrics:
    def test_ndcg_worked_example(self):
        got = ndcg_at_k(["B", "A"], {"A": 2, "B": 1}, k=2)
        assert got == pytest.approx(0.859719, abs=1e-6)

    def test_ndcg_perfect_ranking_is_one(self):
        assert ndcg_at_k(["A", "B"], {"A": 2, "B": 1}, k=2) == pytest.approx(1.0)

    def test_ndcg_none_without_positive_grades(self):
        assert ndcg_at_k(["A"], {"A": 0}, k=10) is None
        assert ndcg_at_k(["A"], {}, k=10) is None

    def test_recall_counts_relevant_in_top_k(self):
        grades = {"A": 2, "B": 1, "C": 0}
        assert recall_at_k(["A", "C"], grades, k=2) == 0.5
        assert recall_at_k(["A", "B"], grades, k=2) == 1.0
        assert recall_at_k(["C", "A"], grades, k=1) == 0.0

    def test_recall_threshold_two_narrows_the_relevant_set(self):
        grades = {"A": 2, "B": 1}
        assert recall_at_k(["A"], grades, k=1, rel_threshold=2) == 1.0
        assert recall_at_k(["B"], grades, k=1, rel_threshold=2) == 0.0

    def test_recall_none_without_relevant_docs(self):
        assert recall_at_k(["A"], {"A": 0}, k=10) is None

    def test_recall_rejects_other_thresholds(self):
        with pytest.raises(ParameterError):
            recall_at_k(["A"], {"A": 1}, k=1, rel_threshold=3)

    def test_metrics_against_exhaustive_oracles(self):
        rng = random.Random(1009)
        doc_pool = [f"d{i}" for i in range(8)]
        for _ in range(150):
            judged = rng.sample(doc_pool, rng.randint(1, 6))
            grades = {d: rng.choice([0, 1, 2]) for d in judged}
            ranking = rng.sample(doc_pool, rng.randint(0, len(doc_pool)))
            k = rng.randint(1, 10)
            got_ndcg = ndcg_at_k(ranking, grades, k)
            want_ndcg = ndcg_oracle(list(ranking), grades, k)
            if want_ndcg is None:
                assert got_ndcg is None
            else:
                assert got_ndcg == pytest.approx(want_ndcg, abs=1e-12)
            threshold = rng.choice([1, 2])
            assert recall_at_k(ranking, grades, k, threshold) == recall_oracle(
                list(ranking), grades, k, threshold
            )

    @given(
        st.lists(st.sampled_from("abcdef"), unique=True),
        st.dictionaries(st.sampled_from("abcdef"), st.integers(0, 2), max_size=6),
        st.integers(1, 8),
    )
    @settings(max_examples=80, deadline=None)
    def test_metric_bounds(self, ranking, grades, k):
        ndcg = ndcg_at_k(ranking, grades, k)
        assert ndcg is None or 0.0 <= ndcg <= 1.0 + 1e-12
        rec = recall_at_k(ranking, grades, k)
        assert rec is None or 0.0 <= rec <= 1.0


QRELS_TEXT = """\
q1 0 d1 2
q1 0 d2 1
q2 0 d1 0
q2 0 d9 2
"""


class TestQrelsIO:
    def test_parse(self, tmp_path):
        path = tmp_path / "qrels.txt"
        path.write_text(QRELS_TEXT)
        qrels = parse_qrels(path)
        assert qrels.by_query == {
            "q1": {"d1": 2, "d2": 1},
            "q2": {"d1": 0, "d9": 2},
        }
        assert qrels.grades("q1")["d1"] == 2
        assert qrels.grades("missing") == {}

    @pytest.mark.parametrize(
        "line",
        [
            "q1 0 d1",  # short row
            "q1 0 d1 3",  # grade out of range
            "q1 0 d1 high",  # non-numeric grade
        ],
    )
    def test_malformed_lines(self, tmp_path, line):
        path = tmp_path / "qrels.txt"
        path.write_text(line + "\n")
        with pytest.raises(QrelsParseError):
            parse_qrels(path)

    def test_duplicate_judgment_rejected(self, tmp_path):
        path = tmp_path / "qrels.txt"
        path.write_text("q1 0 d1 2\nq1 0 d1 1\n")
        with pytest.raises(QrelsParseError) as exc:
            parse_qrels(path)
        assert "line 2" in str(exc.value)


def sample_run():
    return RunList(
        run_tag="trial",
        by_query={
            "q1": [
                RunEntry("d1", 1.5, 1),
                RunEntry("d2", 0.25, 2),
            ],
            "q2": [RunEntry("d9", -2.125, 1)],
        },
    )


class TestRunIO:
    def test_write_then_parse_round_trip(self, tmp_path):
        path = tmp_path / "run.txt"
        run = sample_run()
        write_run(run, path)
        again = parse_run(path)
        assert again == run

    def test_write_format(self, tmp_path):
        path = tmp_path / "run.txt"
        write_run(sample_run(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "q1 Q0 d1 1 1.500000 trial"
        assert lines[2] == "q2 Q0 d9 1 -2.125000 trial"

    @pytest.mark.parametrize(
        "text,complaint",
        [
            ("q1 Q0 d1 2 1.0 t\n", "rank"),  # ranks must start at 1
            ("q1 Q0 d1 1 1.0 t\nq1 Q0 d2 3 0.5 t\n", "rank"),  # gap
            ("q1 Q0 d1 1 1.0 t\nq1 Q0 d2 2 2.0 t\n", "score"),  # increasing score
            ("q1 Q0 d1 1 1.0 t\nq1 Q0 d1 2 0.5 t\n", "duplicate"),  # dup doc
            ("q1 Q0 d1 1 1.0 t\nq2 Q0 d1 1 1.0 other\n", "tag"),  # tag flips
            ("q1 Q0 d1 1 t\n", "field"),  # five fields
        ],
    )
    def test_inconsistent_runs_rejected(self, tmp_path, text, complaint):
        path = tmp_path / "run.txt"
        path.write_text(text)
        with pytest.raises(RunParseError) as exc:
            parse_run(path)
        assert complaint in str(exc.value)

    def test_equal_scores_are_legal(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("q1 Q0 d1 1 1.0 t\nq1 Q0 d2 2 1.0 t\n")
        assert len(parse_run(path).by_query["q1"]) == 2


class TestEvaluate:
    def qrels(self):
        return Qrels(
            by_query={
                "q1": {"d1": 2, "d2": 1},
                "q2": {"d9": 2},
                "q3": {"d1": 0},
            }
        )

    def test_per_query_values_and_means(self):
        run = RunList(
            run_tag="t",
            by_query={
                "q1": [RunEntry("d2", 2.0, 1), RunEntry("d1", 1.0, 2)],
                "q2": [RunEntry("d9", 1.0, 1)],
            },
        )
        report = evaluate(run, self.qrels(), ks=[2])
        assert report.per_query["q1"]["ndcg"][2] == pytest.approx(0.859719, abs=1e-6)
        assert report.per_query["q1"]["recall"][2] == 1.0
        assert report.per_query["q2"]["ndcg"][2] == pytest.approx(1.0)
        assert report.mean("recall", 2) == pytest.approx(1.0)
        assert report.mean("ndcg", 2) == pytest.approx((0.8597186998521972 + 1.0) / 2)

    def test_queries_without_positive_judgments_are_excluded_from_means(self):
        run = RunList(
            run_tag="t",
            by_query={
                "q2": [RunEntry("d9", 1.0, 1)],
                "q3": [RunEntry("d1", 1.0, 1)],  # only a grade-0 judgment
            },
        )
        report = evaluate(run, self.qrels(), ks=[10])
        assert report.per_query["q3"]["ndcg"][10] is None
        assert report.per_query["q3"]["recall"][10] is None
        assert report.mean("ndcg", 10) == pytest.approx(1.0)

    def test_unjudged_queries_are_dropped_with_warning(self, caplog):
        run = RunList(run_tag="t", by_query={"q9": [RunEntry("d1", 1.0, 1)]})
        with caplog.at_level("WARNING"):
            report = evaluate(run, self.qrels(), ks=[10])
        assert report.n == 0
        assert "q9" in caplog.text

    def test_category_breakdown(self):
        run = RunList(
            run_tag="t",
            by_query={
                "q1": [RunEntry("d1", 2.0, 1)],
                "q2": [RunEntry("d9", 1.0, 1)],
            },
        )
        report = evaluate(
            run, self.qrels(), categories={"q1": "When"}, ks=[1]
        )
        assert report.category_of == {"q1": "When", "q2": "Other"}
        assert report.mean("recall", 1, "When") == 0.5
        assert report.mean("recall", 1, "Other") == 1.0
        rows = report.rows()
        assert ("Overall", "recall", 1, 0.75) in [
            (c, m, k, round(v, 6)) for c, m, k, v in rows if v is not None
        ]

    def test_tsv_shape(self):
        run = RunList(run_tag="t", by_query={"q1": [RunEntry("d1", 2.0, 1)]})
        report = evaluate(run, self.qrels(), ks=[1, 10])
        tsv = report.to_tsv()
        header, *body = tsv.strip().split("\n")
        assert header == "category\tmetric\tk\tmean"
        # 2 metrics x 2 ks x (1 category + overall)
        assert len(body) == 8
        assert report.pretty().startswith("run: t")


class TestCompare:
    def reports(self):
        qrels = Qrels(by_query={"q1": {"d1": 1, "d2": 1}})
        run_a = RunList(run_tag="base", by_query={"q1": [RunEntry("d9", 1.0, 1)]})
        run_b = RunList(run_tag="full", by_query={"q1": [RunEntry("d1", 1.0, 1)]})
        return (
            evaluate(run_a, qrels, ks=[1]),
            evaluate(run_b, qrels, ks=[1]),
        )

    def test_delta_is_b_minus_a(self):
        report_a, report_b = self.reports()
        diff = compare(report_a, report_b)
        assert diff.tag_a == "base" and diff.tag_b == "full"
        overall = [r for r in diff.rows if r[0] == "Overall" and r[1] == "recall"]
        category, metric, k, a, b, delta = overall[0]
        assert (a, b) == (0.0, 0.5)
        assert delta == pytest.approx(0.5)
        assert "delta" in diff.to_tsv().splitlines()[0]

    def test_mismatched_ks_rejected(self):
        report_a, report_b = self.reports()
        report_b.ks = [5]
        with pytest.raises(ConvSearchError):
            compare(report_a, report_b)


def test_categories_sidecar_round_trip(tmp_path):
    path = tmp_path / "run.categories.tsv"
    mapping = {"31_1": "Describe", "31_2": "HowMuch"}
    write_categories(mapping, path)
    assert parse_categories(path) == mapping
