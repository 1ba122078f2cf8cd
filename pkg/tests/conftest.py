import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edskit.corpus import corpus_dir  # noqa: E402
from edskit.dsl import load  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    """Loader for bundled corpus documents by entry name."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load(corpus_dir() / f"{name}.eds")
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
