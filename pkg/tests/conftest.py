import pytest

_RESULTS = {}


@pytest.fixture
def acceptance():
    """``record(criterion, ok, detail)`` collects one outcome for the summary block."""

    def record(criterion, ok, detail=""):
        _RESULTS.setdefault(int(criterion), []).append((bool(ok), str(detail)))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_RESULTS):
        parts = _RESULTS[c]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"criterion {c}: {status}  {detail}")
