from __future__ import annotations

import pytest

_CRITERIA: list[str] = []


class CriterionRecorder:
    """Collects one summary line per acceptance criterion."""

    def __init__(self, sink: list[str]):
        self._sink = sink

    def record(self, number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        self._sink.append(line)
        print(line)
        return ok


@pytest.fixture
def criterion() -> CriterionRecorder:
    return CriterionRecorder(_CRITERIA)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERIA, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
