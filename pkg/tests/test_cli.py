import hashlib
import json
from pathlib import Path

import pytest

from saltnet.cli import EXIT_INPUT, EXIT_OK, EXIT_RUNTIME, RunManifest, main
from saltnet.core import load_corpus, load_queries


def tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


SPEC = {
    "specs": [
        {"query": "Monitor extreme weather impacts on agricultural commodity prices", "seed": 3,
         "domain": "climate change", "article_range": [20, 25], "length_range": [200, 240]},
        {"query": "Track shipping disruptions affecting commodity supply", "seed": 3, "domain": "trade",
         "article_range": [20, 25], "length_range": [200, 240]},
        {"query": "Watch semiconductor supply chain risks", "seed": 3, "domain": "technology",
         "article_range": [20, 25], "length_range": [200, 240]},
    ]
}


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(SPEC))
    return p


def test_generate_three_scenarios(tmp_path, spec_file):
    assert main(["generate", str(spec_file), "--out", str(tmp_path / "w")]) == EXIT_OK
    corpus = load_corpus(tmp_path / "w" / "corpus.jsonl")
    queries, scenarios = load_queries(tmp_path / "w" / "queries.json")
    assert len(scenarios) == 3 and len(queries) == 3
    assert 60 <= len(corpus) <= 300


def test_generate_rejects_short_articles(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"query": "Monitor crops", "seed": 1, "length_range": [50, 300]}))
    assert main(["generate", str(p), "--out", str(tmp_path / "w")]) == EXIT_INPUT
    assert "article length 50 below lower bound 200" in capsys.readouterr().err
    assert not (tmp_path / "w").exists()


def test_generate_missing_seed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"query": "Monitor crops"}))
    assert main(["generate", str(p), "--out", str(tmp_path / "w")]) == EXIT_INPUT


def test_generate_is_idempotent(tmp_path, spec_file):
    main(["generate", str(spec_file), "--out", str(tmp_path / "a")])
    main(["generate", str(spec_file), "--out", str(tmp_path / "b")])
    assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")


@pytest.fixture
def fixture_dir(tmp_path):
    out = tmp_path / "fx"
    assert main(["fixture", "--out", str(out), "--seed", "7"]) == EXIT_OK
    return out


def run(fx: Path, out: Path, *extra):
    return main(["run", "--corpus", str(fx / "corpus.jsonl"), "--queries", str(fx / "queries.json"),
                 "--config", str(fx / "config.json"), "--seed", "7", "--out", str(out), *extra])


def test_run_both_systems_and_eval(tmp_path, fixture_dir):
    assert run(fixture_dir, tmp_path / "salt") == EXIT_OK
    assert run(fixture_dir, tmp_path / "base", "--system", "temporal-baseline") == EXIT_OK
    base_meta = json.loads((tmp_path / "base" / "run.json").read_text())
    assert base_meta["system"] == "temporal-baseline" and base_meta["status"] == "complete"
    assert not (tmp_path / "salt" / ".lock").exists()
    rc = main(["eval", str(tmp_path / "salt"), str(tmp_path / "base"),
               "--scenarios", str(fixture_dir / "queries.json"), "--out", str(tmp_path / "ev")])
    assert rc == EXIT_OK
    names = {p.name for p in (tmp_path / "ev").iterdir()}
    assert {"report_salt.json", "report_temporal-baseline.json", "stratified.csv", "comparison.csv"} <= names


def test_run_from_manifest_file(tmp_path, fixture_dir):
    m = fixture_dir / "run.json"
    m.write_text(json.dumps({"corpus": "corpus.jsonl", "queries": "queries.json", "out": "out", "seed": 7,
                             "config": "config.json"}))
    assert main(["run", str(m)]) == EXIT_OK
    assert (fixture_dir / "out" / "run.json").is_file()


def test_trace_snapshots(tmp_path, fixture_dir):
    assert run(fixture_dir, tmp_path / "t", "--trace") == EXIT_OK
    batches = sorted((tmp_path / "t").glob("batch_*.json"))
    graphs = sorted((tmp_path / "t").glob("graph_*.json"))
    assert batches and len(graphs) == len(batches)
    assert "trace" in json.loads(batches[0].read_text())


def test_rerun_replaces_outputs(tmp_path, fixture_dir):
    run(fixture_dir, tmp_path / "r")
    first = tree_digest(tmp_path / "r")
    (tmp_path / "r" / "batch_9999.json").write_text("{}")
    run(fixture_dir, tmp_path / "r")
    assert tree_digest(tmp_path / "r") == first


def test_locked_directory(tmp_path, fixture_dir):
    (tmp_path / "l").mkdir()
    (tmp_path / "l" / ".lock").touch()
    assert run(fixture_dir, tmp_path / "l") == EXIT_INPUT


def test_mock_needs_seed(tmp_path, fixture_dir):
    rc = main(["run", "--corpus", str(fixture_dir / "corpus.jsonl"), "--queries",
               str(fixture_dir / "queries.json"), "--out", str(tmp_path / "x")])
    assert rc == EXIT_INPUT


def test_missing_inputs(tmp_path):
    assert main(["run", "--seed", "1", "--out", str(tmp_path)]) == EXIT_INPUT
    with pytest.raises(Exception):
        RunManifest(tmp_path / "nope", tmp_path / "nope", tmp_path, seed=1)


def test_eval_empty_run_dir(tmp_path, fixture_dir):
    (tmp_path / "empty").mkdir()
    rc = main(["eval", str(tmp_path / "empty"), "--scenarios", str(fixture_dir / "queries.json"),
               "--out", str(tmp_path / "ev")])
    assert rc == EXIT_INPUT


def test_eval_rejects_aborted_run(tmp_path, fixture_dir):
    run(fixture_dir, tmp_path / "a")
    meta = tmp_path / "a" / "run.json"
    meta.write_text(json.dumps({**json.loads(meta.read_text()), "status": "aborted"}))
    rc = main(["eval", str(tmp_path / "a"), "--scenarios", str(fixture_dir / "queries.json"),
               "--out", str(tmp_path / "ev")])
    assert rc == EXIT_INPUT


def test_backend_failure_exit_code(tmp_path, fixture_dir, monkeypatch):
    from saltnet.backends import TerminalBackendError, MockBackend

    def boom(self, request):
        raise TerminalBackendError("quota exhausted")

    monkeypatch.setattr(MockBackend, "generate", boom)
    assert run(fixture_dir, tmp_path / "f", "--system", "temporal-baseline") == EXIT_RUNTIME
    meta = json.loads((tmp_path / "f" / "run.json").read_text())
    assert meta["status"] == "aborted"
