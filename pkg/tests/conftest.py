import pytest

_ACCEPTANCE: list = []


@pytest.fixture
def record():
    """Collects one summary line per acceptance criterion."""

    def _record(number: int, title: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((number, title, bool(ok), detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status}  [{number:2d}] {title}: {detail}")
