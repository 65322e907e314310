"""Scoring run records against scenario ground truth.

Retrieval performance (RP) is recall over cited article ids; hypothesis
quality (HQ) is the share of a scenario's sub-events that some hypothesis
identifies. Both are percentages. A query's score is the mean over its
scenarios and the aggregate is the unweighted mean over queries.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Protocol

from . import prompts
from .backends import Backend
from .backends.text import content_words
from .core import ComplexityMetrics, Hypothesis, Scenario
from .records import RunRecord

DEFAULT_MATCH_FRACTION = 0.6


class UndefinedMetricError(ValueError):
    pass


class EvalInputError(ValueError):
    pass


class Matcher(Protocol):
    name: str

    def matches(self, sub_event: str, texts: list[str]) -> bool: ...


@dataclass(frozen=True)
class LexicalMatcher:
    """A sub-event counts as found when one hypothesis holds enough of its content words."""

    fraction: float = DEFAULT_MATCH_FRACTION
    name: str = "lexical"

    def matches(self, sub_event: str, texts: list[str]) -> bool:
        wanted = set(content_words(sub_event))
        if not wanted:
            return False
        return any(len(wanted & set(content_words(t))) >= self.fraction * len(wanted) for t in texts)


class JudgeMatcher:
    """Asks a backend whether the hypotheses identify the sub-event."""

    name = "judge"

    def __init__(self, backend: Backend) -> None:
        self.backend = backend

    def matches(self, sub_event: str, texts: list[str]) -> bool:
        if not texts:
            return False
        return prompts.parse_yes_no(self.backend.generate(prompts.judge_request(sub_event, sorted(set(texts)))))


def retrieval_performance(hypotheses: Iterable[Hypothesis], scenario: Scenario) -> float:
    relevant = scenario.relevant_article_ids
    if not relevant:
        raise UndefinedMetricError(f"scenario {scenario.id} has no relevant articles")
    cited = {r for h in hypotheses for r in h.references}
    return 100.0 * len(cited & relevant) / len(relevant)


def sub_event_hits(hypotheses: Iterable[Hypothesis], scenario: Scenario, matcher: Matcher | None = None) -> list[bool]:
    matcher = matcher or LexicalMatcher()
    texts = sorted({h.text for h in hypotheses})
    return [matcher.matches(e, texts) for e in scenario.sub_events]


def hypothesis_quality(hypotheses: Iterable[Hypothesis], scenario: Scenario, matcher: Matcher | None = None) -> float:
    if not scenario.sub_events:
        raise UndefinedMetricError(f"scenario {scenario.id} has no sub-events")
    hits = sub_event_hits(hypotheses, scenario, matcher)
    return 100.0 * sum(hits) / len(hits)


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


@dataclass
class EvaluationReport:
    system: str
    matcher: str
    seed: int | None
    config_hash: str | None
    pairs: list[dict]
    per_query: dict[str, dict[str, float]]
    aggregate: dict[str, float]
    stratification: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "matcher": self.matcher,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "pairs": self.pairs,
            "per_query": self.per_query,
            "aggregate": self.aggregate,
            "stratification": self.stratification,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(d["system"], d["matcher"], d.get("seed"), d.get("config_hash"), d["pairs"],
                   d["per_query"], d["aggregate"], d.get("stratification", {}))

    def to_csv(self) -> str:
        rows = [
            {
                "system": self.system,
                "query_id": p["query_id"],
                "scenario_id": p["scenario_id"],
                "rp": p["rp"],
                "hq": p["hq"],
                "lateral_measure": p["metrics"]["lateral_measure"],
                "time_lag": p["metrics"]["time_lag"],
                "uncertainty": p["metrics"]["uncertainty"],
            }
            for p in self.pairs
        ]
        return _csv(rows, ["system", "query_id", "scenario_id", "rp", "hq", "lateral_measure", "time_lag", "uncertainty"])


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def evaluate_run(
    run: RunRecord,
    scenarios: list[Scenario],
    matcher: Matcher | None = None,
    query_ids: Iterable[str] | None = None,
) -> EvaluationReport:
    """Score every (query, scenario) pair of ``run``.

    ``query_ids`` defaults to the queries that own a scenario; the run must
    answer exactly those queries.
    """
    matcher = matcher or LexicalMatcher()
    expected = sorted(set(query_ids) if query_ids is not None else {s.query_id for s in scenarios})
    answered = sorted(run.query_ids())
    if answered != expected:
        raise EvalInputError(f"run answers queries {answered} but ground truth covers {expected}")
    pairs = []
    by_query: dict[str, list[dict]] = defaultdict(list)
    for s in sorted(scenarios, key=lambda s: (s.query_id, s.id)):
        hyps = run.hypotheses_for(s.query_id)
        hits = sub_event_hits(hyps, s, matcher)
        pair = {
            "query_id": s.query_id,
            "scenario_id": s.id,
            "rp": retrieval_performance(hyps, s),
            "hq": 100.0 * sum(hits) / len(hits),
            "hits": [{"sub_event": e, "matched": m} for e, m in zip(s.sub_events, hits)],
            "metrics": s.metrics.to_dict(),
        }
        pairs.append(pair)
        by_query[s.query_id].append(pair)
    per_query = {
        q: {"rp": _mean(p["rp"] for p in ps), "hq": _mean(p["hq"] for p in ps)} for q, ps in sorted(by_query.items())
    }
    aggregate = {
        "rp": _mean(v["rp"] for v in per_query.values()),
        "hq": _mean(v["hq"] for v in per_query.values()),
    }
    report = EvaluationReport(
        run.system, matcher.name, run.meta.get("seed"), run.meta.get("config_hash"), pairs, per_query, aggregate
    )
    report.stratification = {
        str(r["lateral_measure"]): r["mean_hq"] for r in stratify_by_complexity([report])["by_lateral_measure"]
    }
    return report


def uncertainty_tercile(u: float) -> str:
    return ("low", "mid", "high")[min(2, int(u * 3))]


def stratify_by_complexity(reports: list[EvaluationReport], manifest: dict | None = None) -> dict:
    """Mean HQ per lateral-measure bucket and per uncertainty tercile, per system.

    ``manifest`` may map scenario ids to metrics dicts that override the
    ones stored in the reports. Empty buckets are omitted and listed.
    """
    overrides = {k: ComplexityMetrics.from_dict(v) for k, v in (manifest or {}).get("scenarios", {}).items()}
    by_l, by_u = [], []
    omitted = []
    trends = {}
    for report in reports:
        l_groups: dict[int, list[float]] = defaultdict(list)
        u_groups: dict[str, list[float]] = defaultdict(list)
        for p in report.pairs:
            m = overrides.get(p["scenario_id"]) or ComplexityMetrics.from_dict(p["metrics"])
            l_groups[m.lateral_measure].append(p["hq"])
            u_groups[uncertainty_tercile(m.uncertainty)].append(p["hq"])
        rows = []
        for level in range(1, 8):
            if level in l_groups:
                rows.append({"system": report.system, "lateral_measure": level,
                             "mean_hq": _mean(l_groups[level]), "n": len(l_groups[level])})
            else:
                omitted.append({"system": report.system, "lateral_measure": level})
        by_l += rows
        for name in ("low", "mid", "high"):
            if name in u_groups:
                by_u.append({"system": report.system, "uncertainty_tercile": name,
                             "mean_hq": _mean(u_groups[name]), "n": len(u_groups[name])})
        means = [r["mean_hq"] for r in rows]
        # reported only; whether accuracy falls with L is an empirical question
        trends[report.system] = (
            "non-increasing" if all(a >= b for a, b in zip(means, means[1:])) else "mixed"
        )
    return {"by_lateral_measure": by_l, "by_uncertainty_tercile": by_u, "omitted": omitted, "trend": trends}


def stratified_csv(table: dict) -> str:
    return _csv(table["by_lateral_measure"], ["system", "lateral_measure", "mean_hq", "n"])


def comparison_rows(reports: list[EvaluationReport]) -> list[dict]:
    """One row per query (plus an aggregate row) with every system's RP and HQ side by side."""
    queries = sorted({q for r in reports for q in r.per_query})
    rows = []
    for q in [*queries, "aggregate"]:
        row = {"query_id": q}
        for r in reports:
            scores = r.aggregate if q == "aggregate" else r.per_query.get(q, {})
            row[f"{r.system}_rp"] = scores.get("rp")
            row[f"{r.system}_hq"] = scores.get("hq")
        rows.append(row)
    return rows


def comparison_csv(reports: list[EvaluationReport]) -> str:
    columns = ["query_id"] + [f"{r.system}_{m}" for r in reports for m in ("rp", "hq")]
    return _csv(comparison_rows(reports), columns)
