"""Verification records and run configuration."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from typing import Any

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

DEFAULT_EPS_SCHEDULE = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


@dataclass
class VerificationReport:
    """One named check.

    ``status`` is derived from ``abs_error <= tolerance`` unless the record is
    an adjudication (``inconclusive``), whose outcome is a finding rather
    than a pass/fail verdict.  ``computed``/``abs_error`` are ``None`` when a
    value could not be produced (e.g. a divergent series); such checks fail.
    """

    name: str
    status: str
    computed: complex | float | None
    reference: complex | float | None
    abs_error: float | None
    tolerance: float
    runtime_ms: int = 0
    notes: str = ""

    @classmethod
    def compare(cls, name: str, computed, reference, tolerance: float, notes: str = "", runtime_ms: int = 0):
        if computed is None or reference is None:
            return cls(name, FAIL, computed, reference, None, tolerance, runtime_ms, notes)
        err = abs(complex(computed) - complex(reference))
        status = PASS if err <= tolerance else FAIL
        return cls(name, status, computed, reference, float(err), tolerance, runtime_ms, notes)

    @classmethod
    def adjudication(cls, name: str, computed, reference, notes: str, runtime_ms: int = 0):
        err = None
        if computed is not None and reference is not None:
            err = float(abs(complex(computed) - complex(reference)))
        return cls(name, INCONCLUSIVE, computed, reference, err, 0.0, runtime_ms, notes)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self, timing: bool = True) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "runtime_ms" and not timing:
                value = 0
            out[f.name] = _jsonable(value)
        return out


def _jsonable(value):
    if isinstance(value, complex):
        return [_jsonable(value.real), _jsonable(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@contextmanager
def stopwatch():
    """Yields a one-element list that holds elapsed milliseconds on exit."""
    box = [0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = int(round(1000.0 * (time.perf_counter() - start)))


def timed(reports: list[VerificationReport], elapsed_ms: int) -> list[VerificationReport]:
    """Stamp a share of ``elapsed_ms`` on reports that have no timing yet."""
    share = int(round(elapsed_ms / max(len(reports), 1)))
    for rep in reports:
        if rep.runtime_ms == 0:
            rep.runtime_ms = share
    return reports


@dataclass
class Config:
    tol: float = 1e-8
    max_terms: int = 10_000
    grid: int = 256
    eps_schedule: tuple[float, ...] = DEFAULT_EPS_SCHEDULE
    samples: int = 10_000
    seed: int = 0
    json_path: str | None = None
    timing: bool = field(default=True)

    def __post_init__(self):
        self.eps_schedule = tuple(float(e) for e in self.eps_schedule)
        if self.tol <= 0 or self.max_terms <= 0 or self.grid <= 0 or self.samples <= 0:
            raise ValueError("tol, max_terms, grid and samples must be positive")
        if any(e <= 0 for e in self.eps_schedule):
            raise ValueError("eps_schedule entries must be positive")
        if any(b >= a for a, b in zip(self.eps_schedule, self.eps_schedule[1:])):
            raise ValueError("eps_schedule must be strictly decreasing")
