"""Synthetic workload generation: queries -> scenarios -> article corpora.

Every scenario carries its causal chain of sub-events, the ids of the
articles written about it, and complexity metrics (lateral measure, time
lag, outcome uncertainty). Randomness comes only from the generation spec's seed.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from typing import Iterable

from . import prompts
from .backends import Backend
from .backends.mock import FILLER, unit_hash
from .core import Article, ComplexityMetrics, Perspective, Query, Scenario, validate_corpus

log = logging.getLogger(__name__)

ARTICLES_MIN, ARTICLES_MAX = 20, 100
WORDS_MIN, WORDS_MAX = 200, 1000
UNIFORM_SPAN = 180  # about six months of day indices
CLUSTER_WIDTH = 14  # two weeks

DOMAINS = (
    "geopolitics",
    "technology",
    "climate change",
    "economics",
    "energy",
    "agriculture",
    "health",
    "security",
    "trade",
    "society",
)


class SpecError(ValueError):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


class DatagenError(RuntimeError):
    pass


@dataclass(frozen=True)
class TemporalDistribution:
    kind: str = "uniform"
    span: int = UNIFORM_SPAN
    center: int = 90
    width: int = CLUSTER_WIDTH

    @property
    def bounds(self) -> tuple[int, int]:
        if self.kind == "uniform":
            return 0, self.span - 1
        half = self.width // 2
        return max(0, self.center - half), self.center + half

    def sample(self, rng: random.Random) -> int:
        if self.kind == "uniform":
            return rng.randrange(0, self.span)
        lo, hi = self.bounds
        return min(hi, max(lo, round(rng.gauss(self.center, self.width / 4))))

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "span": self.span}
        return {"kind": "clustered", "center": self.center, "width": self.width}


@dataclass(frozen=True)
class GenerationSpec:
    query: str
    seed: int
    query_id: str = "q1"
    domain: str | None = None
    scenario_count: int = 1
    article_range: tuple[int, int] = (ARTICLES_MIN, ARTICLES_MAX)
    length_range: tuple[int, int] = (WORDS_MIN, WORDS_MAX)
    perspectives: dict = field(default_factory=lambda: {"conservative": 0.5, "liberal": 0.5})
    temporal: TemporalDistribution = field(default_factory=TemporalDistribution)

    def violations(self) -> list[str]:
        out = []
        if not self.query.strip():
            out.append("query text is empty")
        if self.scenario_count < 1:
            out.append("scenario count must be at least 1")
        lo, hi = self.article_range
        if lo > hi:
            out.append(f"article count range [{lo}, {hi}] is inverted")
        if lo < ARTICLES_MIN:
            out.append(f"article count {lo} below lower bound {ARTICLES_MIN}")
        if hi > ARTICLES_MAX:
            out.append(f"article count {hi} above upper bound {ARTICLES_MAX}")
        lo, hi = self.length_range
        if lo > hi:
            out.append(f"article length range [{lo}, {hi}] is inverted")
        if lo < WORDS_MIN:
            out.append(f"article length {lo} below lower bound {WORDS_MIN}")
        if hi > WORDS_MAX:
            out.append(f"article length {hi} above upper bound {WORDS_MAX}")
        if not self.perspectives:
            out.append("perspective mix is empty")
        for name, weight in self.perspectives.items():
            if name not in {p.value for p in Perspective}:
                out.append(f"unknown perspective {name!r}")
            if weight < 0:
                out.append(f"perspective weight for {name!r} is negative")
        if self.perspectives and sum(self.perspectives.values()) <= 0:
            out.append("perspective weights sum to zero")
        t = self.temporal
        if t.kind not in {"uniform", "clustered"}:
            out.append(f"unknown temporal distribution {t.kind!r}")
        elif t.kind == "uniform" and t.span < 1:
            out.append("uniform span must be positive")
        elif t.kind == "clustered" and (t.width < 0 or t.center - t.width // 2 < 0):
            out.append("clustered window must lie at or after time 0")
        if self.domain is not None and self.domain not in DOMAINS:
            out.append(f"unknown domain {self.domain!r}")
        return out

    def validate(self) -> "GenerationSpec":
        problems = self.violations()
        if problems:
            raise SpecError(problems)
        return self

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationSpec":
        if "seed" not in d:
            raise SpecError(["seed is required"])
        temporal = d.get("temporal", {"kind": "uniform"})
        kwargs = dict(
            query=d["query"],
            seed=int(d["seed"]),
            query_id=d.get("query_id", "q1"),
            domain=d.get("domain"),
            scenario_count=int(d.get("scenario_count", 1)),
            article_range=tuple(d.get("article_range", (ARTICLES_MIN, ARTICLES_MAX))),
            length_range=tuple(d.get("length_range", (WORDS_MIN, WORDS_MAX))),
            temporal=TemporalDistribution(**temporal),
        )
        if "perspectives" in d:
            kwargs["perspectives"] = dict(d["perspectives"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "seed": self.seed,
            "query_id": self.query_id,
            "domain": self.domain,
            "scenario_count": self.scenario_count,
            "article_range": list(self.article_range),
            "length_range": list(self.length_range),
            "perspectives": dict(self.perspectives),
            "temporal": self.temporal.to_dict(),
        }


def _lateral(sub_events) -> int:
    return min(7, max(1, len(sub_events) - 1))


def generate_scenarios(query: Query, n: int, backend: Backend, seed: int) -> list[Scenario]:
    if n < 1:
        raise ValueError("n must be >= 1")
    parsed = prompts.parse_scenarios(backend.generate(prompts.scenarios_request(query.text, n)))
    if len(parsed) < n:
        raise DatagenError(f"query {query.id}: asked for {n} scenarios, got {len(parsed)}")
    out = []
    for i, p in enumerate(parsed[:n]):
        sub_events = p.sub_events or [p.description]
        u = p.uncertainty if p.uncertainty is not None else round(unit_hash(seed, "U", p.description), 1)
        metrics = ComplexityMetrics(_lateral(sub_events), max(0, p.time_lag or 0), min(1.0, max(0.0, u)))
        out.append(Scenario(f"{query.id}-s{i + 1}", query.id, p.description, tuple(sub_events), frozenset(), metrics))
    return out


def _fit_length(body: str, lo: int, hi: int, rng: random.Random) -> str:
    words = body.split()
    if len(words) > hi:
        words = words[:hi]
    while len(words) < lo:
        words.append(rng.choice(FILLER))
    return " ".join(words)


def generate_articles(scenario: Scenario, spec: GenerationSpec, backend: Backend) -> list[Article]:
    """Write articles for ``scenario`` following ``spec``.

    Timestamps are sampled, sorted, and handed to sub-events in causal
    order: every sub-event gets one article first, the rest are dealt out
    round-robin, and each sub-event's articles form a contiguous stretch
    of time.
    """
    spec.validate()
    rng = random.Random(f"{spec.seed}|{scenario.id}")
    count = rng.randint(*spec.article_range)
    m = len(scenario.sub_events)
    slots = list(range(m)) + [i % m for i in range(max(0, count - m))]
    slots = sorted(slots[:count])
    times = sorted(spec.temporal.sample(rng) for _ in range(count))
    names = sorted(spec.perspectives)
    weights = [spec.perspectives[p] for p in names]
    lo, hi = spec.length_range
    articles = []
    for k, (slot, t) in enumerate(zip(slots, times)):
        perspective = rng.choices(names, weights)[0]
        words = rng.randint(lo, hi)
        event = scenario.sub_events[slot]
        reply = backend.generate(prompts.article_request(scenario.description, event, perspective, words, k))
        title, body = prompts.parse_article(reply)
        fitted = _fit_length(body, lo, hi, rng)
        if fitted != body:
            log.info("article %s-a%03d resized to [%d, %d] words", scenario.id, k + 1, lo, hi)
        articles.append(
            Article(f"{scenario.id}-a{k + 1:03d}", title or event, fitted, t, scenario.id, Perspective(perspective))
        )
    return articles


def score_complexity(query: Query | None, scenario: Scenario, articles: Iterable[Article] = ()) -> ComplexityMetrics:
    """Lateral measure from the causal chain, time lag from the spread of relevant articles.

    Without articles the lag is whatever was estimated with the scenario.
    Uncertainty is the value elicited with the scenario, clamped to [0, 1].
    """
    times = [a.timestamp for a in articles if a.id in scenario.relevant_article_ids]
    lag = max(times) - min(times) if times else scenario.metrics.time_lag
    return ComplexityMetrics(
        _lateral(scenario.sub_events), max(0, lag), min(1.0, max(0.0, scenario.metrics.uncertainty))
    )


def attach_articles(query: Query | None, scenario: Scenario, articles: list[Article]) -> Scenario:
    """Record the articles as the scenario's ground truth and rescore its metrics."""
    with_ids = replace(scenario, relevant_article_ids=frozenset(a.id for a in articles))
    return replace(with_ids, metrics=score_complexity(query, with_ids, articles))


def _terciles(values: list[float], lo: float, hi: float) -> list[int]:
    width = (hi - lo) / 3 or 1.0
    counts = [0, 0, 0]
    for v in values:
        counts[min(2, max(0, int((v - lo) // width)))] += 1
    return counts


def balance_workload(entries: list[dict], domains: Iterable[str] = DOMAINS) -> dict:
    """Per-domain counts, metric histograms and balance flags.

    ``entries`` holds one ``{"query_id", "domain", "metrics"}`` per
    query-scenario pair; domains count distinct queries.
    """
    domains = list(domains)
    per_domain = {d: set() for d in domains}
    for e in entries:
        per_domain.setdefault(e["domain"], set()).add(e["query_id"])
    metrics = [e["metrics"] for e in entries]
    L = [m.lateral_measure for m in metrics]
    T = [m.time_lag for m in metrics]
    U = [m.uncertainty for m in metrics]
    t_hi = max([21, *T])
    histograms = {
        "lateral_measure": {str(v): L.count(v) for v in range(1, 8)},
        "time_lag": {f"{lo}-{lo + 6}": sum(lo <= t <= lo + 6 for t in T) for lo in range(0, t_hi + 1, 7)},
        "uncertainty": {f"{i / 10:.1f}": sum(min(9, int(u * 10)) == i for u in U) for i in range(10)},
    }
    terciles = {
        "lateral_measure": _terciles(L, 1, 7),
        "time_lag": _terciles(T, 0, t_hi),
        "uncertainty": _terciles(U, 0.0, 1.0),
    }
    flags = [f"domain {d!r} has no queries" for d in domains if not per_domain[d]]
    n = len(entries)
    for metric, counts in terciles.items():
        for name, c in zip(("low", "mid", "high"), counts):
            if n and c < 0.1 * n:
                flags.append(f"{metric} {name} tercile holds {c}/{n} pairs (< 10%)")
    return {
        "queries": len({e["query_id"] for e in entries}),
        "pairs": n,
        "domains": {d: len(per_domain[d]) for d in sorted(per_domain)},
        "histograms": histograms,
        "terciles": terciles,
        "normalized": {
            "lateral_measure": [(v - 1) / 6 for v in L],
            "time_lag": [t / t_hi for t in T],
            "uncertainty": U,
        },
        "flags": flags,
        "balanced": not flags,
    }


@dataclass
class Workload:
    queries: list[Query]
    scenarios: list[Scenario]
    corpus: list[Article]
    manifest: dict


def generate_workload(specs: list[GenerationSpec], backend: Backend) -> Workload:
    problems = [f"{s.query_id}: {v}" for s in specs for v in s.violations()]
    ids = [s.query_id for s in specs]
    if len(set(ids)) != len(ids):
        problems.append("query ids must be unique across the workload")
    if problems:
        raise SpecError(problems)
    queries, scenarios, corpus, entries = [], [], [], []
    for spec in specs:
        query = Query(spec.query_id, spec.query, domain=spec.domain)
        queries.append(query)
        for scenario in generate_scenarios(query, spec.scenario_count, backend, spec.seed):
            articles = generate_articles(scenario, spec, backend)
            scenario = attach_articles(query, scenario, articles)
            scenarios.append(scenario)
            corpus.extend(articles)
            entries.append({"query_id": query.id, "domain": spec.domain or "unassigned", "metrics": scenario.metrics})
    violations = validate_corpus(corpus, scenarios)
    if violations:
        raise DatagenError("generated corpus is invalid: " + "; ".join(v.detail for v in violations))
    return Workload(queries, scenarios, corpus, balance_workload(entries))
