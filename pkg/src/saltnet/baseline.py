"""Single-agent comparison system.

One agent per query re-reads the stream batch by batch, seeing only the
current window of articles plus its own previous hypothesis. Queries never
see each other's material.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import prompts
from .backends import Backend, TerminalBackendError
from .core import Article, Hypothesis, Query, batch_stream
from .records import TEMPORAL_BASELINE, BatchRecord, RunAborted, RunRecord, RunWriter

log = logging.getLogger(__name__)

TemporalContext = dict  # query id -> list[Hypothesis], one per processed batch


@dataclass(frozen=True)
class BaselineParams:
    batch_size: int = 10
    start: int | None = None
    end: int | None = None
    include_previous: bool = True
    window: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError("start must not exceed end")

    def to_dict(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "start": self.start,
            "end": self.end,
            "include_previous": self.include_previous,
            "window": self.window,
        }


def filter_by_date(corpus: list[Article], start: int | None, end: int | None) -> list[Article]:
    """Keep articles whose timestamp lies in ``[start, end]`` (either bound optional)."""
    return [
        a for a in corpus
        if (start is None or a.timestamp >= start) and (end is None or a.timestamp <= end)
    ]


class _QueryAborted(Exception):
    def __init__(self, done: list[Hypothesis], cause: TerminalBackendError) -> None:
        super().__init__(str(cause))
        self.done = done
        self.cause = cause


def _run_query(query: Query, batches, backend: Backend, params: BaselineParams) -> list[Hypothesis]:
    history: list[Hypothesis] = []
    for batch in batches:
        lo = max(0, batch.index - params.window + 1)
        window = [a for b in batches[lo:batch.index + 1] for a in b.articles]
        allowed = [a.id for a in window]
        previous = history[-1].text if params.include_previous and history else None
        try:
            reply = backend.generate(prompts.baseline_request(query, window, previous))
        except TerminalBackendError as exc:
            raise _QueryAborted(history, exc) from exc
        text, refs = prompts.parse_hypothesis(reply)
        if refs is None:
            # no reference list at all: the whole window is what the agent saw
            refs = allowed
        refs = [r for r in dict.fromkeys(refs) if r in allowed]
        history.append(Hypothesis(query.id, text or reply.strip(), tuple(refs), batch.index))
    return history


def run_baseline(corpus, queries: list[Query], backend: Backend, params: BaselineParams | None = None) -> TemporalContext:
    """Per-query hypothesis sequences, one hypothesis per batch.

    Raises :class:`RunAborted` on a terminal backend error; ``partial``
    then maps every query to the hypotheses completed so far.
    """
    params = params or BaselineParams()
    batches = batch_stream(filter_by_date(list(corpus), params.start, params.end), params.batch_size)

    def one(q):
        try:
            return _run_query(q, batches, backend, params), None
        except _QueryAborted as exc:
            return exc.done, exc.cause

    if params.workers > 1 and len(queries) > 1:
        with ThreadPoolExecutor(params.workers) as pool:
            results = list(pool.map(one, queries))
    else:
        results = [one(q) for q in queries]
    context = {q.id: hyps for q, (hyps, _) in zip(queries, results)}
    errors = [err for _, err in results if err is not None]
    if errors:
        raise RunAborted(f"baseline aborted: {errors[0]}", context)
    return context


def context_to_record(context: TemporalContext, queries: list[Query], meta: dict | None = None) -> RunRecord:
    """Regroup a temporal context by batch into the shared run-record shape.

    Queries that stopped early simply contribute nothing to later batches.
    """
    n = max((len(v) for v in context.values()), default=0)
    batches = []
    for i in range(n):
        hyps = [context[q.id][i] for q in queries if i < len(context[q.id])]
        batches.append(BatchRecord(i, hyps))
    return RunRecord(TEMPORAL_BASELINE, batches, dict(meta or {}))


def run_baseline_record(
    corpus,
    queries: list[Query],
    backend: Backend,
    params: BaselineParams | None = None,
    *,
    out_dir: str | Path | None = None,
    meta: dict | None = None,
) -> RunRecord:
    """Run the baseline and write it in the engine's run-record layout.

    On abort the completed prefix is still written before re-raising.
    """
    params = params or BaselineParams()
    meta = {"params": params.to_dict(), **(meta or {})}
    writer = RunWriter(out_dir, TEMPORAL_BASELINE, meta)
    try:
        context = run_baseline(corpus, queries, backend, params)
    except RunAborted as exc:
        record = context_to_record(exc.partial, queries, meta)
        for rec in record.batches:
            writer.batch(rec)
        writer.finish(len(record.batches), "aborted", str(exc))
        raise RunAborted(str(exc), record) from exc
    record = context_to_record(context, queries, meta)
    for rec in record.batches:
        writer.batch(rec)
    writer.finish(len(record.batches))
    return record
