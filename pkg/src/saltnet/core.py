"""Domain model shared by every module: articles, queries, beliefs,
hypotheses, scenarios, plus corpus validation, batching and file formats.

All types are immutable value objects; validation happens at construction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable


class Perspective(str, Enum):
    CONSERVATIVE = "conservative"
    LIBERAL = "liberal"
    CENTRIST = "centrist"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    body: str
    timestamp: int
    scenario_id: str | None = None
    perspective: Perspective | None = None
    word_count: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("article id must be non-empty")
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int):
            raise ValueError(f"article {self.id}: timestamp must be an integer")
        if self.timestamp < 0:
            raise ValueError(f"article {self.id}: timestamp must be >= 0")
        if self.perspective is not None and not isinstance(self.perspective, Perspective):
            object.__setattr__(self, "perspective", Perspective(self.perspective))
        # never trust a supplied count
        words = len(self.body.split())
        if words == 0:
            raise ValueError(f"article {self.id}: body is empty")
        object.__setattr__(self, "word_count", words)

    @property
    def text(self) -> str:
        return f"{self.title}\n{self.body}"

    def to_dict(self) -> dict:
        d = {"id": self.id, "title": self.title, "body": self.body, "timestamp": self.timestamp}
        if self.scenario_id is not None:
            d["scenario_id"] = self.scenario_id
        if self.perspective is not None:
            d["perspective"] = self.perspective.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Article":
        return cls(
            id=str(d["id"]),
            title=d.get("title", ""),
            body=d["body"],
            timestamp=d["timestamp"],
            scenario_id=d.get("scenario_id"),
            perspective=d.get("perspective"),
        )


@dataclass(frozen=True)
class Batch:
    index: int
    articles: tuple[Article, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("batch index must be >= 0")

    @property
    def time(self) -> int:
        """Latest article timestamp in the batch; the batch's notion of 'now'."""
        return max(a.timestamp for a in self.articles)

    def __len__(self) -> int:
        return len(self.articles)


@dataclass(frozen=True)
class Query:
    id: str
    text: str
    topics: tuple[str, ...] | None = None
    domain: str | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"query {self.id}: text must be non-empty")
        if self.topics is not None:
            object.__setattr__(self, "topics", tuple(self.topics))

    def to_dict(self) -> dict:
        d = {"id": self.id, "text": self.text}
        if self.topics is not None:
            d["topics"] = list(self.topics)
        if self.domain is not None:
            d["domain"] = self.domain
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Query":
        topics = d.get("topics")
        return cls(str(d["id"]), d["text"], tuple(topics) if topics is not None else None, d.get("domain"))


@dataclass(frozen=True)
class BeliefStatement:
    """An agent-held observation: statement, confidence, timestamp, references.

    ``hop_count`` is 0 for beliefs read directly off articles and k for
    beliefs synthesized from material k agent-to-agent steps away.
    """

    statement: str
    confidence: float
    timestamp: int
    references: tuple[str, ...]
    origin_agent: str
    hop_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "references", tuple(self.references))
        if not self.statement or not self.statement.strip():
            raise ValueError("belief statement must be non-empty")
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.timestamp < 0:
            raise ValueError("belief timestamp must be >= 0")
        if self.hop_count < 0:
            raise ValueError("hop_count must be >= 0")
        if self.hop_count == 0 and not self.references:
            raise ValueError("a hop-0 belief must cite at least one article")
        if len(set(self.references)) != len(self.references):
            raise ValueError("references must be distinct")

    @property
    def id(self) -> str:
        key = "\x1f".join(
            [self.origin_agent, self.statement, str(self.timestamp), str(self.hop_count), *self.references]
        )
        return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "statement": self.statement,
            "confidence": self.confidence,
            "timestamp": self.timestamp,
            "references": list(self.references),
            "origin_agent": self.origin_agent,
            "hop_count": self.hop_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BeliefStatement":
        return cls(
            d["statement"], d["confidence"], d["timestamp"], tuple(d["references"]),
            d["origin_agent"], d.get("hop_count", 0),
        )


@dataclass(frozen=True)
class Hypothesis:
    query_id: str
    text: str
    references: tuple[str, ...]
    timestamp: int
    supporting_beliefs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "references", tuple(self.references))
        object.__setattr__(self, "supporting_beliefs", tuple(self.supporting_beliefs))

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "text": self.text,
            "references": list(self.references),
            "timestamp": self.timestamp,
            "supporting_beliefs": list(self.supporting_beliefs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hypothesis":
        return cls(d["query_id"], d["text"], tuple(d["references"]), d["timestamp"],
                   tuple(d.get("supporting_beliefs", ())))


@dataclass(frozen=True)
class ComplexityMetrics:
    lateral_measure: int
    time_lag: int
    uncertainty: float

    def __post_init__(self) -> None:
        if not 1 <= self.lateral_measure <= 7:
            raise ValueError(f"lateral measure {self.lateral_measure} outside [1, 7]")
        if self.time_lag < 0:
            raise ValueError("time lag must be >= 0")
        if not 0.0 <= self.uncertainty <= 1.0:
            raise ValueError(f"uncertainty {self.uncertainty} outside [0, 1]")

    def to_dict(self) -> dict:
        return {"lateral_measure": self.lateral_measure, "time_lag": self.time_lag,
                "uncertainty": self.uncertainty}

    @classmethod
    def from_dict(cls, d: dict) -> "ComplexityMetrics":
        return cls(int(d["lateral_measure"]), int(d["time_lag"]), float(d["uncertainty"]))


@dataclass(frozen=True)
class Scenario:
    id: str
    query_id: str
    description: str
    sub_events: tuple[str, ...]
    relevant_article_ids: frozenset[str]
    metrics: ComplexityMetrics

    def __post_init__(self) -> None:
        object.__setattr__(self, "sub_events", tuple(self.sub_events))
        object.__setattr__(self, "relevant_article_ids", frozenset(self.relevant_article_ids))
        if len(self.sub_events) < self.metrics.lateral_measure:
            raise ValueError(
                f"scenario {self.id}: {len(self.sub_events)} sub-events cannot carry "
                f"lateral measure {self.metrics.lateral_measure}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "query_id": self.query_id,
            "description": self.description,
            "sub_events": list(self.sub_events),
            "relevant_article_ids": sorted(self.relevant_article_ids),
            "metrics": self.metrics.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            d["id"], d["query_id"], d.get("description", ""), tuple(d["sub_events"]),
            frozenset(d.get("relevant_article_ids", ())), ComplexityMetrics.from_dict(d["metrics"]),
        )


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


def validate_corpus(corpus: Iterable[Article], scenarios: Iterable[Scenario] = ()) -> list[Violation]:
    """Report everything that makes a corpus unusable; never raises."""
    corpus = list(corpus)
    violations: list[Violation] = []
    seen: set[str] = set()
    for art in corpus:
        if art.id in seen:
            violations.append(Violation("duplicate-id", f"article id {art.id!r} appears more than once"))
        seen.add(art.id)
    scenarios = list(scenarios)
    scenario_ids = {s.id for s in scenarios}
    for s in scenarios:
        for ref in sorted(s.relevant_article_ids - seen):
            violations.append(Violation("dangling-reference", f"scenario {s.id!r} references unknown article {ref!r}"))
        if not s.relevant_article_ids:
            violations.append(Violation("empty-relevant-set", f"scenario {s.id!r} lists no relevant articles"))
    if scenarios:
        for art in corpus:
            if art.scenario_id is not None and art.scenario_id not in scenario_ids:
                violations.append(
                    Violation("unknown-scenario", f"article {art.id!r} tagged with unknown scenario {art.scenario_id!r}")
                )
    ordered = batch_order(corpus)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.timestamp < prev.timestamp:
            violations.append(Violation("non-monotone", f"{cur.id} precedes {prev.id} after sorting"))
    return violations


def batch_order(corpus: Iterable[Article]) -> list[Article]:
    return sorted(corpus, key=lambda a: (a.timestamp, a.id))


def batch_stream(corpus: Iterable[Article], batch_size: int) -> list[Batch]:
    """Sort by (timestamp, id) and cut into consecutive batches of at most ``batch_size``."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    ordered = batch_order(corpus)
    return [
        Batch(i, tuple(ordered[start:start + batch_size]))
        for i, start in enumerate(range(0, len(ordered), batch_size))
    ]


# -- file formats -------------------------------------------------------------


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def save_corpus(path: str | Path, corpus: Iterable[Article]) -> None:
    lines = [json.dumps(a.to_dict(), sort_keys=True, ensure_ascii=False) for a in corpus]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_corpus(path: str | Path) -> list[Article]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(Article.from_dict(json.loads(line)))
    return out


def save_queries(path: str | Path, queries: Iterable[Query], scenarios: Iterable[Scenario] = ()) -> None:
    write_json(path, {"queries": [q.to_dict() for q in queries], "scenarios": [s.to_dict() for s in scenarios]})


def load_queries(path: str | Path) -> tuple[list[Query], list[Scenario]]:
    doc = read_json(path)
    return (
        [Query.from_dict(q) for q in doc.get("queries", [])],
        [Scenario.from_dict(s) for s in doc.get("scenarios", [])],
    )
