"""Command-line entry point: ``saltnet generate | fixture | run | eval``.

Exit codes: 0 success, 2 bad input, 3 backend or runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .backends import BackendError, HttpBackend, MockBackend
from .baseline import BaselineParams, run_baseline_record
from .config import EngineConfig
from .core import dumps, load_corpus, load_queries, read_json, save_corpus, save_queries, validate_corpus, write_json
from .datagen import GenerationSpec, SpecError, generate_workload
from .engine import run_stream
from .evaluation import (
    EvalInputError,
    JudgeMatcher,
    LexicalMatcher,
    UndefinedMetricError,
    comparison_csv,
    evaluate_run,
    stratified_csv,
    stratify_by_complexity,
)
from .fixtures import FIXTURE_CONFIG, load_fixture
from .network import NetworkInitError, initialize_network
from .records import SALT, SYSTEMS, MemoryBoundError, RunAborted, load_run

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("saltnet")


class InputError(ValueError):
    pass


def _make_backend(kind: str, seed: int | None, model: str | None = None):
    if kind == "mock":
        if seed is None:
            raise InputError("--seed is required with the mock backend")
        return MockBackend(seed)
    if kind == "http":
        return HttpBackend(model or "gpt-4o")
    raise InputError(f"unknown backend {kind!r}")


# -- generate -----------------------------------------------------------------


def _load_specs(path: Path) -> list[GenerationSpec]:
    doc = read_json(path)
    items = doc["specs"] if isinstance(doc, dict) and "specs" in doc else [doc]
    specs = []
    for i, item in enumerate(items):
        if "query_id" not in item and len(items) > 1:
            item = {**item, "query_id": f"q{i + 1}"}
        specs.append(GenerationSpec.from_dict(item))
    return specs


def cmd_generate(spec_path, out_dir, backend: str = "mock", model: str | None = None) -> int:
    specs = _load_specs(Path(spec_path))
    problems = [f"{s.query_id}: {v}" for s in specs for v in s.violations()]
    if problems:
        raise SpecError(problems)
    workload = generate_workload(specs, _make_backend(backend, specs[0].seed, model))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(out / "corpus.jsonl", workload.corpus)
    save_queries(out / "queries.json", workload.queries, workload.scenarios)
    write_json(out / "workload.json", workload.manifest)
    write_json(out / "spec.json", {"specs": [s.to_dict() for s in specs]})
    print(f"wrote {len(workload.scenarios)} scenarios and {len(workload.corpus)} articles to {out}")
    return EXIT_OK


def cmd_fixture(out_dir, seed: int) -> int:
    corpus, queries, scenarios = load_fixture(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(out / "corpus.jsonl", corpus)
    save_queries(out / "queries.json", queries, scenarios)
    write_json(out / "config.json", FIXTURE_CONFIG.to_dict())
    print(f"wrote fixture (seed {seed}, {len(corpus)} articles) to {out}")
    return EXIT_OK


# -- run ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunManifest:
    corpus: Path
    queries: Path
    out: Path
    system: str = SALT
    backend: str = "mock"
    seed: int | None = None
    config: Path | None = None
    trace: bool = False
    batch_size: int | None = None
    model: str | None = None

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise InputError(f"unknown system {self.system!r}; expected one of {', '.join(SYSTEMS)}")
        if self.backend not in ("mock", "http"):
            raise InputError(f"unknown backend {self.backend!r}")
        if self.backend == "mock" and self.seed is None:
            raise InputError("a seed is required with the mock backend")
        for name in ("corpus", "queries", "config"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise InputError(f"{name} file {path} does not exist")

    @classmethod
    def resolve(cls, manifest_path: str | None, overrides: dict) -> "RunManifest":
        doc: dict = {}
        base = Path(".")
        if manifest_path:
            doc = read_json(manifest_path)
            base = Path(manifest_path).parent
        doc.update({k: v for k, v in overrides.items() if v is not None})
        missing = [k for k in ("corpus", "queries", "out") if k not in doc]
        if missing:
            raise InputError(f"missing run inputs: {', '.join(missing)}")

        def path(key):
            return None if doc.get(key) is None else base / doc[key]

        return cls(
            corpus=path("corpus"),
            queries=path("queries"),
            out=path("out"),
            system=doc.get("system", SALT),
            backend=doc.get("backend", "mock"),
            seed=doc.get("seed"),
            config=path("config"),
            trace=bool(doc.get("trace", False)),
            batch_size=doc.get("batch_size"),
            model=doc.get("model"),
        )


@contextmanager
def _lock(out: Path):
    """One process owns a run directory at a time."""
    out.mkdir(parents=True, exist_ok=True)
    lock = out / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise InputError(f"{out} is locked by another run (remove {lock} if stale)") from None
    os.close(fd)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def _clear_outputs(out: Path) -> None:
    for pattern in ("batch_*.json", "graph_*.json", "run.json"):
        for p in out.glob(pattern):
            p.unlink()


def cmd_run(manifest: RunManifest) -> int:
    config = EngineConfig.from_dict(read_json(manifest.config)) if manifest.config else EngineConfig()
    if manifest.batch_size is not None:
        config = config.replace(batch_size=manifest.batch_size)
    corpus = load_corpus(manifest.corpus)
    queries, scenarios = load_queries(manifest.queries)
    if not queries:
        raise InputError(f"{manifest.queries} holds no queries")
    problems = [v for v in validate_corpus(corpus, scenarios) if v.kind != "empty-relevant-set"]
    if problems:
        raise InputError("corpus is invalid: " + "; ".join(v.detail for v in problems))
    backend = _make_backend(manifest.backend, manifest.seed, manifest.model)
    meta = {"seed": manifest.seed, "backend": manifest.backend}
    with _lock(manifest.out):
        _clear_outputs(manifest.out)
        if manifest.system == SALT:
            graph = initialize_network(queries, backend, config)
            record = run_stream(corpus, queries, graph, backend, config,
                                out_dir=manifest.out, trace=manifest.trace, meta=meta)
        else:
            params = BaselineParams(batch_size=config.batch_size)
            digest = hashlib.sha256(dumps(params.to_dict()).encode()).hexdigest()[:16]
            record = run_baseline_record(corpus, queries, backend, params, out_dir=manifest.out,
                                         meta={**meta, "config_hash": digest})
    print(f"{record.system}: {len(record.batches)} batches written to {manifest.out}")
    return EXIT_OK


# -- eval ---------------------------------------------------------------------


def cmd_eval(run_dirs, scenarios_path, out_dir, matcher: str = "lexical", backend: str = "mock",
             seed: int | None = None, workload: str | None = None) -> int:
    queries, scenarios = load_queries(scenarios_path)
    if not scenarios:
        raise InputError(f"{scenarios_path} holds no scenarios")
    if matcher == "judge":
        scorer = JudgeMatcher(_make_backend(backend, seed))
    else:
        scorer = LexicalMatcher()
    query_ids = [q.id for q in queries] if queries else None
    reports = []
    for run_dir in run_dirs:
        try:
            run = load_run(run_dir)
        except FileNotFoundError as exc:
            raise InputError(str(exc)) from None
        if run.meta.get("status") != "complete":
            raise InputError(f"{run_dir} is not a complete run (status {run.meta.get('status')!r})")
        reports.append(evaluate_run(run, scenarios, scorer, query_ids))
    systems = [r.system for r in reports]
    if len(set(systems)) != len(systems):
        raise InputError("each run must come from a different system")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for r in reports:
        write_json(out / f"report_{r.system}.json", r.to_dict())
        (out / f"report_{r.system}.csv").write_text(r.to_csv(), encoding="utf-8")
    table = stratify_by_complexity(reports, read_json(workload) if workload else None)
    write_json(out / "stratified.json", table)
    (out / "stratified.csv").write_text(stratified_csv(table), encoding="utf-8")
    (out / "comparison.csv").write_text(comparison_csv(reports), encoding="utf-8")
    for r in reports:
        print(f"{r.system}: RP {r.aggregate['rp']:.2f}  HQ {r.aggregate['hq']:.2f}")
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saltnet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic workload from a spec file")
    gen.add_argument("spec")
    gen.add_argument("--out", required=True)
    gen.add_argument("--backend", choices=["mock", "http"], default="mock")
    gen.add_argument("--model")

    fix = sub.add_parser("fixture", help="write the bundled three-query fixture")
    fix.add_argument("--out", required=True)
    fix.add_argument("--seed", type=int, default=7)

    run = sub.add_parser("run", help="stream a corpus through the engine or the baseline")
    run.add_argument("manifest", nargs="?")
    run.add_argument("--config")
    run.add_argument("--corpus")
    run.add_argument("--queries")
    run.add_argument("--system", choices=list(SYSTEMS))
    run.add_argument("--backend", choices=["mock", "http"])
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--trace", action="store_true", default=None)
    run.add_argument("--batch-size", type=int)
    run.add_argument("--model")

    ev = sub.add_parser("eval", help="score run directories against ground truth")
    ev.add_argument("runs", nargs="+")
    ev.add_argument("--scenarios", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--matcher", choices=["lexical", "judge"], default="lexical")
    ev.add_argument("--backend", choices=["mock", "http"], default="mock")
    ev.add_argument("--seed", type=int)
    ev.add_argument("--workload", help="workload manifest overriding scenario metrics")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            return cmd_generate(args.spec, args.out, args.backend, args.model)
        if args.command == "fixture":
            return cmd_fixture(args.out, args.seed)
        if args.command == "run":
            overrides = {
                "config": args.config, "corpus": args.corpus, "queries": args.queries,
                "system": args.system, "backend": args.backend, "seed": args.seed, "out": args.out,
                "trace": args.trace, "batch_size": args.batch_size, "model": args.model,
            }
            return cmd_run(RunManifest.resolve(args.manifest, overrides))
        return cmd_eval(args.runs, args.scenarios, args.out, args.matcher, args.backend, args.seed, args.workload)
    except SpecError as exc:
        print("invalid generation spec:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, EvalInputError, UndefinedMetricError, NetworkInitError, FileNotFoundError,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RunAborted as exc:
        print(f"run aborted, partial results kept: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (BackendError, MemoryBoundError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
