"""Run-record files shared by the engine and the baseline.

A run directory holds ``run.json`` (system tag, seed, config hash, status)
and one ``batch_NNNN.json`` per processed batch. With tracing on, the
engine adds ``graph_NNNN.json`` topology snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .core import Hypothesis, read_json, write_json

SALT = "salt"
TEMPORAL_BASELINE = "temporal-baseline"
SYSTEMS = (SALT, TEMPORAL_BASELINE)


class RunAborted(RuntimeError):
    """A run stopped early; ``partial`` holds whatever was completed."""

    def __init__(self, message: str, partial) -> None:
        super().__init__(message)
        self.partial = partial


class MemoryBoundError(RuntimeError):
    pass


@dataclass
class BatchRecord:
    batch: int
    hypotheses: list[Hypothesis]
    store_sizes: dict[str, int] = field(default_factory=dict)
    trace: list[dict] | None = None

    def to_dict(self, system: str) -> dict:
        d = {
            "batch": self.batch,
            "system": system,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "store_sizes": dict(self.store_sizes),
        }
        if self.trace is not None:
            d["trace"] = self.trace
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BatchRecord":
        return cls(
            d["batch"],
            [Hypothesis.from_dict(h) for h in d["hypotheses"]],
            d.get("store_sizes", {}),
            d.get("trace"),
        )


@dataclass
class RunRecord:
    system: str
    batches: list[BatchRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def hypotheses_for(self, query_id: str) -> list[Hypothesis]:
        return [h for b in self.batches for h in b.hypotheses if h.query_id == query_id]

    def all_hypotheses(self) -> list[Hypothesis]:
        return [h for b in self.batches for h in b.hypotheses]

    def query_ids(self) -> list[str]:
        seen: list[str] = []
        for h in self.all_hypotheses():
            if h.query_id not in seen:
                seen.append(h.query_id)
        return seen

    def cited(self, query_id: str) -> set[str]:
        return {r for h in self.hypotheses_for(query_id) for r in h.references}


class RunWriter:
    """Flushes batch records as they complete so aborted runs keep their prefix."""

    def __init__(self, out_dir: str | Path | None, system: str, meta: dict | None = None) -> None:
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.system = system
        self.meta = dict(meta or {})
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def batch(self, record: BatchRecord, snapshot: dict | None = None) -> None:
        if self.out_dir is None:
            return
        write_json(self.out_dir / f"batch_{record.batch:04d}.json", record.to_dict(self.system))
        if snapshot is not None:
            write_json(self.out_dir / f"graph_{record.batch:04d}.json", snapshot)

    def finish(self, n_batches: int, status: str = "complete", error: str | None = None) -> None:
        if self.out_dir is None:
            return
        doc = {**self.meta, "system": self.system, "batches": n_batches, "status": status}
        if error is not None:
            doc["error"] = error
        write_json(self.out_dir / "run.json", doc)


def load_run(run_dir: str | Path) -> RunRecord:
    run_dir = Path(run_dir)
    meta_path = run_dir / "run.json"
    if not meta_path.is_file():
        raise FileNotFoundError(f"{run_dir} has no run.json")
    meta = read_json(meta_path)
    batches = [BatchRecord.from_dict(read_json(p)) for p in sorted(run_dir.glob("batch_*.json"))]
    return RunRecord(meta.get("system", SALT), batches, meta)
