from collections import defaultdict

import pytest
from hypothesis import given
from hypothesis import strategies as st

import annotated
from saltnet.core import ComplexityMetrics, Hypothesis, Scenario
from saltnet.evaluation import (
    EvalInputError,
    EvaluationReport,
    JudgeMatcher,
    LexicalMatcher,
    UndefinedMetricError,
    comparison_csv,
    comparison_rows,
    evaluate_run,
    hypothesis_quality,
    retrieval_performance,
    stratified_csv,
    stratify_by_complexity,
    uncertainty_tercile,
)
from saltnet.records import BatchRecord


def scenario(relevant=(), events=("x happens",), lateral=1, u=0.5, sid="s", qid="q"):
    return Scenario(sid, qid, "d", tuple(events), frozenset(relevant), ComplexityMetrics(lateral, 0, u))


def hyp(text="t", refs=(), qid="q"):
    return Hypothesis(qid, text, tuple(refs), 0)


class TestRetrieval:
    def test_half_recalled(self):
        s = scenario([f"r{i}" for i in range(10)])
        assert retrieval_performance([hyp(refs=[f"r{i}" for i in range(5)])], s) == 50.0

    def test_extras_do_not_hurt(self):
        s = scenario(["r1", "r2"])
        assert retrieval_performance([hyp(refs=["r1", "x"]), hyp(refs=["r2", "y", "z"])], s) == 100.0

    def test_empty_relevant_set(self):
        with pytest.raises(UndefinedMetricError):
            retrieval_performance([hyp(refs=["a"])], scenario())

    @given(st.permutations([f"r{i}" for i in range(6)]), st.integers(0, 6))
    def test_order_invariant(self, order, k):
        s = scenario([f"r{i}" for i in range(6)])
        cited = order[:k]
        forward = [hyp(refs=[r]) for r in cited]
        assert retrieval_performance(forward, s) == retrieval_performance(forward[::-1], s)
        assert retrieval_performance(forward, s) == pytest.approx(100 * k / 6)


class TestQuality:
    EVENTS = ("drought hits brazil coffee farms", "coffee harvest falls sharply",
              "exporters delay coffee shipments", "coffee futures reach record highs")

    def test_two_of_four(self):
        s = scenario(events=self.EVENTS, lateral=3)
        hs = [hyp("drought damages brazil coffee farms"), hyp("harvest falls sharply")]
        assert hypothesis_quality(hs, s) == 50.0

    def test_verbatim(self):
        s = scenario(events=self.EVENTS, lateral=3)
        assert hypothesis_quality([hyp(e) for e in self.EVENTS], s) == 100.0

    def test_words_must_sit_in_one_hypothesis(self):
        s = scenario(events=("port strike halts cargo",))
        assert hypothesis_quality([hyp("port strike"), hyp("halts cargo")], s) == 0.0

    def test_no_sub_events(self):
        s = Scenario.__new__(Scenario)
        object.__setattr__(s, "id", "s")
        object.__setattr__(s, "sub_events", ())
        with pytest.raises(UndefinedMetricError):
            hypothesis_quality([hyp()], s)

    @given(st.lists(st.sampled_from(["drought", "brazil", "coffee", "farms", "hits", "rain", "prices"]),
                    max_size=8), st.sampled_from(["rain", "drought", "coffee"]))
    def test_adding_words_never_loses_a_match(self, words, extra):
        event = "drought hits brazil coffee farms"
        m = LexicalMatcher()
        if m.matches(event, [" ".join(words)]):
            assert m.matches(event, [" ".join(words + [extra])])

    def test_judge_matcher(self):
        seen = []

        class Judge:
            def generate(self, request):
                seen.append(request.user_prompt)
                return "YES" if "strike" in request.user_prompt else "NO"

        m = JudgeMatcher(Judge())
        assert m.matches("port strike", ["strike spreads"])
        assert not m.matches("freight rates", ["rates climb"])
        assert not m.matches("anything", [])
        assert len(seen) == 2


class TestAnnotatedFixture:
    def test_hand_counted_scores(self):
        report = evaluate_run(annotated.run_record(), annotated.SCENARIOS)
        for q in ("coffee", "ports"):
            assert report.per_query[q] == annotated.EXPECTED[q]
        assert report.aggregate == annotated.EXPECTED["aggregate"]

    def test_pure(self):
        a = evaluate_run(annotated.run_record(), annotated.SCENARIOS).to_dict()
        b = evaluate_run(annotated.run_record(), annotated.SCENARIOS).to_dict()
        assert a == b

    def test_round_trip(self):
        report = evaluate_run(annotated.run_record(), annotated.SCENARIOS)
        assert EvaluationReport.from_dict(report.to_dict()) == report
        assert report.to_csv().splitlines()[0].startswith("system,query_id,scenario_id,rp,hq")

    def test_query_mismatch(self):
        run = annotated.run_record()
        run.batches = [BatchRecord(0, [h for h in annotated.HYPOTHESES if h.query_id == "coffee"])]
        with pytest.raises(EvalInputError):
            evaluate_run(run, annotated.SCENARIOS)

    def test_mean_over_scenarios_of_a_query(self):
        extra = scenario(["c01"], ("drought hits brazil coffee farms",), sid="coffee-s2", qid="coffee")
        report = evaluate_run(annotated.run_record(), [*annotated.SCENARIOS, extra])
        assert report.per_query["coffee"] == {"rp": (50.0 + 100.0) / 2, "hq": (50.0 + 100.0) / 2}


def report_from(system, rows):
    """rows: (scenario id, lateral, uncertainty, hq)"""
    pairs = [{"query_id": "q", "scenario_id": sid, "rp": 0.0, "hq": hq,
              "metrics": ComplexityMetrics(l, 0, u).to_dict()} for sid, l, u, hq in rows]
    return EvaluationReport(system, "lexical", 0, None, pairs, {}, {})


def groupby_oracle(rows):
    groups = defaultdict(list)
    for _, l, _, hq in rows:
        groups[l].append(hq)
    return [(l, sum(v) / len(v), len(v)) for l, v in sorted(groups.items())]


class TestStratification:
    def test_single_bucket(self):
        table = stratify_by_complexity([report_from("salt", [("a", 2, 0.1, 60.0), ("b", 2, 0.1, 40.0)])])
        assert [(r["lateral_measure"], r["mean_hq"]) for r in table["by_lateral_measure"]] == [(2, 50.0)]
        assert len(table["omitted"]) == 6

    def test_two_buckets(self):
        table = stratify_by_complexity([report_from("salt", [("a", 1, 0.1, 80.0), ("b", 5, 0.9, 40.0)])])
        assert [r["mean_hq"] for r in table["by_lateral_measure"]] == [80.0, 40.0]
        assert [r["uncertainty_tercile"] for r in table["by_uncertainty_tercile"]] == ["low", "high"]
        assert table["trend"]["salt"] == "non-increasing"

    @given(st.lists(st.tuples(st.integers(1, 7), st.floats(0, 1), st.sampled_from([0.0, 25.0, 50.0, 100.0])),
                    min_size=1, max_size=30))
    def test_matches_groupby(self, raw):
        rows = [(f"s{i}", l, u, hq) for i, (l, u, hq) in enumerate(raw)]
        table = stratify_by_complexity([report_from("salt", rows)])
        got = [(r["lateral_measure"], r["mean_hq"], r["n"]) for r in table["by_lateral_measure"]]
        want = groupby_oracle(rows)
        assert [g[0] for g in got] == [w[0] for w in want]
        assert [g[2] for g in got] == [w[2] for w in want]
        assert [g[1] for g in got] == pytest.approx([w[1] for w in want])

    def test_manifest_overrides(self):
        report = report_from("salt", [("a", 1, 0.1, 80.0)])
        table = stratify_by_complexity([report], {"scenarios": {"a": ComplexityMetrics(4, 0, 0.5).to_dict()}})
        assert table["by_lateral_measure"][0]["lateral_measure"] == 4

    def test_csv(self):
        table = stratify_by_complexity([report_from("salt", [("a", 3, 0.5, 10.0)])])
        assert stratified_csv(table).splitlines() == ["system,lateral_measure,mean_hq,n", "salt,3,10.0,1"]

    @pytest.mark.parametrize("u,name", [(0.0, "low"), (0.33, "low"), (0.34, "mid"), (0.67, "high"), (1.0, "high")])
    def test_terciles(self, u, name):
        assert uncertainty_tercile(u) == name


def test_comparison_table():
    salt = evaluate_run(annotated.run_record("salt"), annotated.SCENARIOS)
    base = evaluate_run(annotated.run_record("temporal-baseline"), annotated.SCENARIOS)
    rows = comparison_rows([salt, base])
    assert [r["query_id"] for r in rows] == ["coffee", "ports", "aggregate"]
    assert rows[-1] == {"query_id": "aggregate", "salt_rp": 37.5, "salt_hq": 50.0,
                        "temporal-baseline_rp": 37.5, "temporal-baseline_hq": 50.0}
    assert comparison_csv([salt, base]).splitlines()[0] == \
        "query_id,salt_rp,salt_hq,temporal-baseline_rp,temporal-baseline_hq"
