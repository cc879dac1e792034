from contextlib import contextmanager

import pytest

_CRITERIA: dict = {}


class _Recorder:
    """``with criterion(3, "detail"):`` records one part of a criterion;
    ``criterion.note(4, "text")`` adds context without affecting the status."""

    @contextmanager
    def __call__(self, number, detail=""):
        try:
            yield
        except BaseException as exc:
            _CRITERIA.setdefault(number, []).append((False, f"{detail} FAILED: {type(exc).__name__}: {exc}"[:300]))
            raise
        _CRITERIA.setdefault(number, []).append((True, detail))

    def note(self, number, text):
        _CRITERIA.setdefault(number, []).append((None, text))


@pytest.fixture
def criterion():
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        status = "PASS" if all(ok is not False for ok, _ in parts) and any(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(text for _, text in parts if text)
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
