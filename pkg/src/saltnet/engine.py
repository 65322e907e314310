"""Streaming core: relevance routing, belief generation, propagation,
bounded stores and per-query hypotheses.

Per batch the phases run in a fixed order: score every article against
every agent, let each sufficiently relevant agent read the article,
propagate the fresh beliefs across the graph, update edge activity,
prune stores, then answer every query from the global belief pool.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import prompts
from .backends import Backend, BackendError, TerminalBackendError, cosine
from .config import EngineConfig
from .core import Article, BeliefStatement, Hypothesis, Query, batch_stream
from .network import Agent, AgentGraph, update_topology
from .records import SALT, BatchRecord, MemoryBoundError, RunAborted, RunRecord, RunWriter
from .store import BeliefStore, retention_score

__all__ = [
    "BeliefStore",
    "EngineConfig",
    "RelevanceScore",
    "TraceEntry",
    "assign_relevance",
    "process_item",
    "propagate_beliefs",
    "prune_store",
    "rank_beliefs",
    "retention_score",
    "run_stream",
    "synthesize_hypotheses",
]

log = logging.getLogger(__name__)

INSUFFICIENT_EVIDENCE = "insufficient evidence"
DEFAULT_CONFIDENCE = 0.5


@dataclass(frozen=True)
class RelevanceScore:
    agent_id: str
    score: float


@dataclass
class TraceEntry:
    source: str
    target: str
    shared: list[str]
    synthesized: list[str]
    hop: int
    skipped: str | None = None

    def to_dict(self) -> dict:
        d = {"source": self.source, "target": self.target, "shared": self.shared,
             "synthesized": self.synthesized, "hop": self.hop}
        if self.skipped:
            d["skipped"] = self.skipped
        return d


def _call(backend: Backend, request, retries: int):
    """Generate with ``retries`` extra attempts; terminal errors are never retried."""
    for attempt in range(retries + 1):
        try:
            return backend.generate(request)
        except TerminalBackendError:
            raise
        except BackendError:
            if attempt == retries:
                raise


def assign_relevance(item: Article, graph: AgentGraph, backend: Backend) -> list[RelevanceScore]:
    vec = backend.embedder.try_embed(item.text)
    if vec is None:
        log.info("article %s has no content words; skipped", item.id)
        return [RelevanceScore(a.id, 0.0) for a in graph.agents]
    return [RelevanceScore(a.id, max(0.0, cosine(vec, a.representation))) for a in graph.agents]


def process_item(agent: Agent, item: Article, backend: Backend, config: EngineConfig | None = None) -> list[BeliefStatement]:
    """Have ``agent`` read ``item`` and return its hop-0 beliefs (empty on backend failure)."""
    config = config or EngineConfig()
    try:
        reply = _call(backend, prompts.belief_request(agent.id, list(agent.topics), item), config.item_retries)
    except TerminalBackendError:
        raise
    except BackendError as exc:
        log.warning("agent %s could not process %s: %s", agent.id, item.id, exc)
        return []
    beliefs = []
    for block in prompts.parse_belief_blocks(reply):
        conf = block.confidence if block.confidence is not None else DEFAULT_CONFIDENCE
        beliefs.append(BeliefStatement(block.statement, conf, item.timestamp, (item.id,), agent.id, 0))
    return beliefs


def _union_refs(beliefs) -> tuple[str, ...]:
    refs: list[str] = []
    for b in beliefs:
        for r in b.references:
            if r not in refs:
                refs.append(r)
    return tuple(refs)


def _synthesize(receiver: Agent, shared: list[BeliefStatement], hop: int, backend: Backend,
                config: EngineConfig) -> list[BeliefStatement]:
    reply = _call(backend, prompts.synthesis_request(receiver.id, list(receiver.topics), shared), config.item_retries)
    refs = _union_refs(shared)
    timestamp = max(b.timestamp for b in shared)
    fallback = sum(b.confidence for b in shared) / len(shared) * config.synthesis_decay
    out = []
    for block in prompts.parse_belief_blocks(reply):
        conf = block.confidence if block.confidence is not None else fallback
        out.append(BeliefStatement(block.statement, conf, timestamp, refs, receiver.id, hop))
    return out


def propagate_beliefs(
    source: Agent,
    new_beliefs: list[BeliefStatement],
    graph: AgentGraph,
    backend: Backend,
    config: EngineConfig | None = None,
    now: int | None = None,
    visited: dict[str, set[str]] | None = None,
) -> list[TraceEntry]:
    """Share fresh beliefs outward from ``source``, breadth first, up to ``max_hops``.

    An edge carries beliefs when its effective weight clears
    ``propagation_threshold`` and the best cosine between a candidate
    belief and the receiver's representation clears
    ``relevance_threshold``. The receiver then synthesizes one or more
    beliefs from the ``top_k_share`` most relevant ones; those keep
    travelling while their hop count is below ``max_hops``. A belief never
    reaches the same agent twice and never goes back the way it came;
    pass the same ``visited`` map (belief id -> agents reached) to every
    call of a run to extend that guarantee across calls.
    """
    config = config or EngineConfig()
    if not new_beliefs:
        return []
    if now is None:
        now = max(b.timestamp for b in new_beliefs)
    embed = backend.embedder.try_embed
    visited = {} if visited is None else visited
    for b in new_beliefs:
        visited.setdefault(b.id, set()).add(source.id)
    trace: list[TraceEntry] = []
    queue = deque([(source.id, list(new_beliefs), None)])
    while queue:
        sender, beliefs, came_from = queue.popleft()
        for rid in graph.neighbors(sender):
            if rid == came_from or graph.effective_weight(sender, rid) < config.propagation_threshold:
                continue
            receiver = graph.agent(rid)
            scored = []
            for b in beliefs:
                if rid in visited[b.id]:
                    continue
                vec = embed(b.statement)
                if vec is not None:
                    scored.append((cosine(vec, receiver.representation), b))
            if not scored or max(s for s, _ in scored) <= config.relevance_threshold:
                continue
            scored.sort(key=lambda sb: (-sb[0], sb[1].statement, sb[1].id))
            shared = [b for _, b in scored[: config.top_k_share]]
            hop = 1 + max(b.hop_count for b in shared)
            if hop > config.max_hops:
                continue
            for b in shared:
                visited[b.id].add(rid)
            try:
                synthesized = _synthesize(receiver, shared, hop, backend, config)
            except TerminalBackendError:
                raise
            except BackendError as exc:
                log.warning("synthesis %s -> %s skipped: %s", sender, rid, exc)
                trace.append(TraceEntry(sender, rid, [b.id for b in shared], [], hop, skipped=str(exc)))
                continue
            receiver.belief_store.add(synthesized, now, config.aging_half_life)
            lineage = set().union(*(visited[b.id] for b in shared)) | {rid}
            for s in synthesized:
                visited.setdefault(s.id, set()).update(lineage)
            trace.append(TraceEntry(sender, rid, [b.id for b in shared], [s.id for s in synthesized], hop))
            if hop < config.max_hops and synthesized:
                queue.append((rid, synthesized, sender))
    return trace


def prune_store(store: BeliefStore, current_batch: int, config: EngineConfig | None = None) -> BeliefStore:
    """Evict by retention score until ``store`` is within capacity.

    Eviction order: lowest ``confidence * 0.5 ** (age / half_life)``
    first, then older timestamp, then lexicographically smaller statement.
    """
    config = config or EngineConfig()
    store.prune(current_batch, config.aging_half_life)
    return store


def rank_beliefs(
    query: Query, graph: AgentGraph, backend: Backend, k: int, now: int | None = None, half_life: int | None = None
) -> list[tuple[float, BeliefStatement]]:
    """Top-``k`` beliefs across all agents by cosine(belief, query) * confidence.

    With ``now`` and ``half_life`` given, confidence is the age-discounted
    retention score, so fresh evidence is not crowded out by old beliefs.
    Beliefs with no lexical overlap with the query (score 0) never qualify.
    """
    qvec = backend.embedder.try_embed(query.text)
    if qvec is None:
        return []
    scored = []
    for agent in graph.agents:
        for b in agent.belief_store:
            vec = backend.embedder.try_embed(b.statement)
            if vec is None:
                continue
            weight = b.confidence if now is None else retention_score(b, now, half_life)
            score = cosine(vec, qvec) * weight
            if score > 0.0:
                scored.append((score, b))
    scored.sort(key=lambda sb: (-sb[0], sb[1].id))
    return scored[:k]


def synthesize_hypotheses(
    queries: list[Query],
    graph: AgentGraph,
    backend: Backend,
    batch_index: int,
    config: EngineConfig | None = None,
    now: int | None = None,
) -> list[Hypothesis]:
    config = config or EngineConfig()
    out = []
    for q in queries:
        ranked = rank_beliefs(q, graph, backend, config.hypothesis_top_k, now, config.aging_half_life)
        top = [b for _, b in ranked]
        if not top:
            out.append(Hypothesis(q.id, INSUFFICIENT_EVIDENCE, (), batch_index, ()))
            continue
        try:
            reply = _call(backend, prompts.hypothesis_request(q, top), config.item_retries)
            text, _ = prompts.parse_hypothesis(reply)
        except TerminalBackendError:
            raise
        except BackendError as exc:
            log.warning("hypothesis for %s fell back to belief text: %s", q.id, exc)
            text = ""
        if not text:
            text = " ".join(b.statement for b in top)
        out.append(Hypothesis(q.id, text, _union_refs(top), batch_index, tuple(b.id for b in top)))
    return out


def step_batch(batch, queries: list[Query], graph: AgentGraph, backend: Backend, config: EngineConfig,
               trace: bool = False, visited: dict[str, set[str]] | None = None) -> BatchRecord:
    """Run every phase for one batch and return its record."""
    visited = {} if visited is None else visited
    now = batch.time
    half_life = config.aging_half_life
    batch_relevance = {a.id: 0.0 for a in graph.agents}
    jobs: list[tuple[Agent, Article]] = []
    for item in batch.articles:
        for score in assign_relevance(item, graph, backend):
            batch_relevance[score.agent_id] = max(batch_relevance[score.agent_id], score.score)
            if score.score > config.relevance_threshold:
                jobs.append((graph.agent(score.agent_id), item))

    def run(job):
        return process_item(job[0], job[1], backend, config)

    if config.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    fresh: list[tuple[Agent, list[BeliefStatement]]] = []
    for (agent, _), beliefs in zip(jobs, results):
        added = agent.belief_store.add(beliefs, now, half_life)
        if added:
            fresh.append((agent, added))

    entries: list[TraceEntry] = []
    for agent, beliefs in fresh:
        entries += propagate_beliefs(agent, beliefs, graph, backend, config, now, visited)

    update_topology(graph, batch_relevance)
    for agent in graph.agents:
        prune_store(agent.belief_store, now, config)
        if len(agent.belief_store) > config.capacity:
            raise MemoryBoundError(f"agent {agent.id} holds {len(agent.belief_store)} > {config.capacity} beliefs")

    hypotheses = synthesize_hypotheses(queries, graph, backend, batch.index, config, now)
    return BatchRecord(
        batch.index,
        hypotheses,
        {a.id: len(a.belief_store) for a in graph.agents},
        [e.to_dict() for e in entries] if trace else None,
    )


def run_stream(
    corpus: list[Article],
    queries: list[Query],
    graph: AgentGraph,
    backend: Backend,
    config: EngineConfig | None = None,
    *,
    out_dir: str | Path | None = None,
    trace: bool = False,
    meta: dict | None = None,
) -> RunRecord:
    """Stream ``corpus`` through the network batch by batch.

    Emits one hypothesis per query per batch. With ``out_dir`` set, each
    batch is written as soon as it completes; a terminal backend error
    stops the run with the completed prefix on disk and raises
    :class:`RunAborted`.
    """
    config = config or EngineConfig()
    meta = {"config": config.to_dict(), "config_hash": config.digest(), **(meta or {})}
    writer = RunWriter(out_dir, SALT, meta)
    record = RunRecord(SALT, [], meta)
    visited: dict[str, set[str]] = {}
    for batch in batch_stream(corpus, config.batch_size):
        try:
            rec = step_batch(batch, queries, graph, backend, config, trace, visited)
        except TerminalBackendError as exc:
            writer.finish(len(record.batches), "aborted", str(exc))
            raise RunAborted(f"batch {batch.index}: {exc}", record) from exc
        record.batches.append(rec)
        writer.batch(rec, graph.snapshot() if trace else None)
    writer.finish(len(record.batches))
    return record
