import numpy as np
import pytest
from hypothesis import settings

from antibunch.detection import TAG_DTYPE

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile("default")

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{crit}] {detail}")


@pytest.fixture
def record():
    def _record(crit, ok, detail):
        ACCEPTANCE.append((crit, bool(ok), detail))
        return ok
    return _record


def tags_from(pairs):
    """[(t, ch), ...] -> sorted TAG_DTYPE array."""
    out = np.empty(len(pairs), TAG_DTYPE)
    if pairs:
        out["t"] = [p[0] for p in pairs]
        out["channel"] = [p[1] for p in pairs]
    order = np.lexsort((out["channel"], out["t"]))
    return out[order]
