"""Agent network construction and the dynamically weighted topology.

Static edge weights are ``alpha * cosine(rep_i, rep_j)`` clamped at zero,
where an agent's representation is the embedding of its space-joined
topics. The weights never change after construction; what evolves is a
per-edge activity level, an exponential moving average of how relevant
both endpoints were to recent batches. Propagation reads
``weight * activity``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from itertools import combinations

from . import prompts
from .backends import Backend, EmbeddingVector, cosine, keyword_phrases
from .backends.embedding import ZeroInformationError
from .config import EngineConfig
from .core import Query
from .store import BeliefStore

log = logging.getLogger(__name__)


class NetworkInitError(ValueError):
    pass


@dataclass
class Agent:
    id: str
    topics: tuple[str, ...]
    representation: EmbeddingVector
    belief_store: BeliefStore = field(default_factory=lambda: BeliefStore(200))

    def __post_init__(self) -> None:
        self.topics = tuple(self.topics)
        if not self.topics:
            raise ValueError(f"agent {self.id}: topics must be non-empty")
        lowered = [t.lower() for t in self.topics]
        if len(set(lowered)) != len(lowered):
            raise ValueError(f"agent {self.id}: duplicate topics")

    @property
    def topic_text(self) -> str:
        return " ".join(self.topics)


def make_agent(agent_id: str, topics, backend: Backend, capacity: int = 200) -> Agent:
    topics = tuple(topics)
    return Agent(agent_id, topics, backend.embed(" ".join(topics)), BeliefStore(capacity))


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def edge_weight(a: Agent, b: Agent, alpha: float) -> float:
    if a.id == b.id:
        raise ValueError("no self-edges")
    return min(alpha, max(0.0, alpha * cosine(a.representation, b.representation)))


@dataclass
class AgentGraph:
    agents: list[Agent]
    weights: dict[tuple[str, str], float]
    alpha: float = 1.0
    active_threshold: float = 0.0
    activity: dict[tuple[str, str], float] = field(default_factory=dict)
    beta: float = 0.2
    query_topics: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._by_id = {a.id: a for a in self.agents}
        for key in self.weights:
            self.activity.setdefault(key, 1.0)

    def agent(self, agent_id: str) -> Agent:
        return self._by_id[agent_id]

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.agents]

    def weight(self, a: str, b: str) -> float:
        return self.weights[_pair(a, b)]

    def activity_of(self, a: str, b: str) -> float:
        return self.activity[_pair(a, b)]

    def effective_weight(self, a: str, b: str) -> float:
        key = _pair(a, b)
        return self.weights[key] * self.activity[key]

    def neighbors(self, agent_id: str) -> list[str]:
        """Agents joined to ``agent_id`` by an edge whose static weight clears ``active_threshold``."""
        return [
            other.id
            for other in self.agents
            if other.id != agent_id and self.weight(agent_id, other.id) >= self.active_threshold
        ]

    def eligible_edges(self) -> set[tuple[str, str]]:
        return {k for k, w in self.weights.items() if w >= self.active_threshold}

    def snapshot(self) -> dict:
        return {
            "agents": [{"id": a.id, "topics": list(a.topics)} for a in self.agents],
            "edges": [
                {"a": a, "b": b, "weight": self.weights[(a, b)], "activity": self.activity[(a, b)]}
                for a, b in sorted(self.weights)
            ],
        }


def build_graph(
    agents: list[Agent],
    alpha: float = 1.0,
    alpha_overrides: dict | None = None,
    active_threshold: float = 0.0,
    beta: float = 0.2,
) -> AgentGraph:
    """Complete graph over ``agents`` weighted by topic similarity.

    ``alpha_overrides`` maps ``"id_a|id_b"`` (either order) to a per-edge coefficient.
    """
    overrides = {}
    for key, value in (alpha_overrides or {}).items():
        a, b = key.split("|")
        overrides[_pair(a, b)] = float(value)
    weights = {}
    for a, b in combinations(agents, 2):
        key = _pair(a.id, b.id)
        weights[key] = edge_weight(a, b, overrides.get(key, alpha))
    return AgentGraph(list(agents), weights, alpha, active_threshold, beta=beta)


def _clean_topic(topic: str) -> str:
    topic = re.split(r"\s[-–:]\s|:\s", topic, maxsplit=1)[0]
    return " ".join(topic.strip(" .;,").split())


def extract_topics(queries: list[Query], backend: Backend, k: int = 4) -> dict[str, list[str]]:
    """Ask the backend for up to ``k`` research areas per query.

    Queries that already carry topics keep them. Replies that yield no
    usable list fall back to keyword phrases taken from the query text.
    """
    if not queries:
        raise ValueError("at least one query is required")
    out: dict[str, list[str]] = {}
    for q in queries:
        if q.topics:
            raw = list(q.topics)
        else:
            reply = backend.generate(prompts.topics_request(q.text, k))
            raw = prompts.parse_numbered_list(reply)
            if not raw:
                log.warning("query %s: unparseable topic reply, falling back to keywords", q.id)
                raw = keyword_phrases(q.text, k)
        topics: list[str] = []
        for t in map(_clean_topic, raw):
            if t and t.lower() not in {x.lower() for x in topics}:
                topics.append(t)
        out[q.id] = topics[:k]
    return out


def _slug(topic: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", topic.lower()).strip("-") or "agent"


def initialize_network(queries: list[Query], backend: Backend, config: EngineConfig | None = None) -> AgentGraph:
    """One agent per distinct topic across all queries, joined into a weighted graph."""
    config = config or EngineConfig()
    per_query = extract_topics(queries, backend, config.topics_per_query)
    seen: dict[str, str] = {}
    agents: list[Agent] = []
    used_ids: set[str] = set()
    for qid in (q.id for q in queries):
        for topic in per_query[qid]:
            if topic.lower() in seen:
                continue
            try:
                rep = backend.embed(topic)
            except ZeroInformationError:
                log.warning("topic %r has no content words; skipped", topic)
                continue
            agent_id = base = _slug(topic)
            n = 2
            while agent_id in used_ids:
                agent_id, n = f"{base}-{n}", n + 1
            used_ids.add(agent_id)
            seen[topic.lower()] = agent_id
            agents.append(Agent(agent_id, (topic,), rep, BeliefStore(config.capacity)))
    if not agents:
        raise NetworkInitError("no topics could be extracted from the queries")
    graph = build_graph(agents, config.alpha, config.alpha_overrides, config.active_threshold, config.activity_beta)
    graph.query_topics = per_query
    return graph


def update_topology(graph: AgentGraph, relevance_scores: dict[str, float]) -> AgentGraph:
    """EMA co-activation update for every edge whose endpoints were both scored.

    ``activity <- (1 - beta) * activity + beta * min(R_i, R_j)``. Static
    weights are left untouched.
    """
    scored = sorted(a for a in relevance_scores if a in graph._by_id)
    for a, b in combinations(scored, 2):
        key = _pair(a, b)
        co = min(relevance_scores[a], relevance_scores[b])
        graph.activity[key] = (1.0 - graph.beta) * graph.activity[key] + graph.beta * co
    return graph
