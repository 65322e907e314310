import pytest

from saltnet.backends import MockBackend
from saltnet.core import Article


def art(aid, ts=0, body=None, title="", **kw):
    return Article(aid, title, body or f"report {aid}", ts, **kw)


@pytest.fixture
def mock():
    return MockBackend(seed=42)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
