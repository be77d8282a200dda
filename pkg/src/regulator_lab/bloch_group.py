"""Formal divisors on C*, scissors-congruence relations, and D2 on divisors.

Points are binary64 complex numbers with a display label; the relations are
certified where they are literally testable, as equalities of Bloch-Wigner
values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dilog import bloch_wigner, five_term_divisor_points
from .errors import DomainError
from .report import VerificationReport

SQRT5 = math.sqrt(5.0)
PHI = 0.5 * (1.0 + SQRT5)
PHI_TILDE = 0.5 * (1.0 - SQRT5)

# exact trigonometric values at multiples of pi/5, written in sqrt(5)
_C1 = 0.25 * (SQRT5 - 1.0)           # cos(2pi/5)
_S1 = 0.25 * math.sqrt(10.0 + 2.0 * SQRT5)   # sin(2pi/5)
_C2 = -0.25 * (SQRT5 + 1.0)          # cos(4pi/5)
_S2 = 0.25 * math.sqrt(10.0 - 2.0 * SQRT5)   # sin(4pi/5)

ZETA_POWERS = {
    0: complex(1.0, 0.0),
    1: complex(_C1, _S1),
    2: complex(_C2, _S2),
    3: complex(_C2, -_S2),
    4: complex(_C1, -_S1),
}
ZETA = ZETA_POWERS[1]
EXP_I_PI_5 = complex(-_C2, _S2)      # e^{i pi/5} = -zeta^3

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LabeledPoint:
    """A nonzero complex point with a display label.

    Equality compares values within ``MERGE_TOL``; labels are metadata.
    """

    value: complex
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise DomainError(f"point must be finite, got {self.value}")
        if self.value == 0:
            raise DomainError("divisor points must be nonzero")
        if not self.label:
            object.__setattr__(self, "label", f"{self.value:.6g}")

    def close_to(self, other: "LabeledPoint", tol: float = MERGE_TOL) -> bool:
        return abs(self.value - other.value) <= tol * max(1.0, abs(self.value))

    def __eq__(self, other):
        if not isinstance(other, LabeledPoint):
            return NotImplemented
        return self.close_to(other)

    __hash__ = None

    def d2(self) -> float:
        return bloch_wigner(self.value)


def point(value: complex, label: str = "") -> LabeledPoint:
    return LabeledPoint(complex(value), label)


def _sort_key(term: tuple[int, LabeledPoint]):
    p = term[1]
    return (p.value.real, p.value.imag, p.label, term[0])


@dataclass(frozen=True)
class Divisor:
    """Formal integer combination of points, kept merged and zero-free."""

    terms: tuple[tuple[int, LabeledPoint], ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, LabeledPoint | complex]], tol: float = MERGE_TOL) -> "Divisor":
        merged: list[list] = []
        normalized = []
        for coef, p in terms:
            if not isinstance(p, LabeledPoint):
                p = LabeledPoint(complex(p))
            if int(coef) != coef:
                raise DomainError(f"divisor coefficients must be integers, got {coef}")
            normalized.append((int(coef), p))
        # canonical order first so the merge representative does not depend on input order
        for coef, p in sorted(normalized, key=_sort_key):
            for slot in merged:
                if slot[1].close_to(p, tol):
                    slot[0] += coef
                    break
            else:
                merged.append([coef, p])
        return cls(tuple(sorted(((c, p) for c, p in merged if c != 0), key=_sort_key)))

    @classmethod
    def of(cls, *pairs) -> "Divisor":
        return cls.from_terms(pairs)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.from_terms(self.terms + other.terms)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((-c, p) for c, p in self.terms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor.from_terms((k * c, p) for c, p in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return sum(c for c, _ in self.terms)

    def coefficient(self, value: complex) -> int:
        probe = LabeledPoint(value)
        return sum(c for c, p in self.terms if p.close_to(probe))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}[{p.label}]" for c, p in self.terms).replace("+ -", "- ")


# ``Divisor.from_terms`` leaves no duplicates, so __eq__ from the dataclass is exact on terms;
# tolerance-aware comparison goes through ``same_divisor``.
def same_divisor(a: Divisor, b: Divisor) -> bool:
    return len(a - b) == 0


def divisor_combine(a: Divisor, b: Divisor, k: int) -> Divisor:
    """``a + k b`` with duplicate points merged and zero terms dropped."""
    return Divisor.from_terms(a.terms + tuple((k * c, p) for c, p in b.terms))


def d2_of_divisor(d: Divisor) -> float:
    """``sum coefficient * D2(point)``, correctly rounded over the terms."""
    return math.fsum(c * p.d2() for c, p in d.terms)


RELATION_KINDS = ("inversion", "conjugation", "complement", "five_term")


def relation_divisor(kind: str, *args: complex) -> Divisor:
    """Divisor of a scissors-congruence relation; its D2 value vanishes.

    Points equal to 0 or 1 (where D2 vanishes) are dropped.
    """
    if kind == "inversion":
        (z,) = args
        pts = [z, 1.0 / complex(z)]
    elif kind == "conjugation":
        (z,) = args
        pts = [z, complex(z).conjugate()]
    elif kind == "complement":
        (z,) = args
        pts = [z, 1.0 - complex(z)]
    elif kind == "five_term":
        x, y = args
        pts = list(five_term_divisor_points(x, y))
    else:
        raise DomainError(f"unknown relation kind {kind!r}; expected one of {RELATION_KINDS}")
    return Divisor.from_terms((1, complex(p)) for p in pts if complex(p) != 0 and complex(p) != 1)


def relation_defect(kind: str, *args: complex) -> float:
    return abs(d2_of_divisor(relation_divisor(kind, *args)))


def congruence_link(name: str, left: Divisor, right: Divisor, tol: float = 1e-10) -> VerificationReport:
    """Report ``|D2(left) - D2(right)|`` against ``tol``."""
    lv = d2_of_divisor(left)
    rv = d2_of_divisor(right)
    notes = f"D2(left) = {lv:.15g}, D2(right) = {rv:.15g}"
    if rv != 0 and abs(lv + rv) <= tol < abs(lv - rv):
        notes += "; the two sides agree up to sign"
    return VerificationReport.compare(name, lv, rv, tol, notes)


def _chains() -> list[tuple[str, Sequence[tuple[str, Divisor]], float, str]]:
    from .mirror_curve import divisor_constant

    z = ZETA_POWERS
    n1 = divisor_constant(1)
    n2 = divisor_constant(2)
    chain1 = [
        ("N1", n1),
        ("-10[zeta^2]+5[zeta^4]", Divisor.of((-10, point(z[2], "zeta^2")), (5, point(z[4], "zeta^4")))),
        ("10[-zeta*phi~]", Divisor.of((10, point(-z[1] * PHI_TILDE, "-zeta*phi~")))),
        ("10[zeta*phi]", Divisor.of((10, point(z[1] * PHI, "zeta*phi")))),
    ]
    chain2 = [
        ("N2", n2),
        ("-10[zeta]+5[zeta^2]", Divisor.of((-10, point(z[1], "zeta")), (5, point(z[2], "zeta^2")))),
        ("10[-zeta^3*phi]", Divisor.of((10, point(-z[3] * PHI, "-zeta^3*phi")))),
        ("10[e^{i pi/5}*phi]", Divisor.of((10, point(EXP_I_PI_5 * PHI, "e^{i pi/5}*phi")))),
    ]
    return [
        ("N1", chain1, z[1] * PHI, "zeta*phi"),
        ("N2", chain2, EXP_I_PI_5 * PHI, "e^{i pi/5}*phi"),
    ]


def verify_congruence_chain(tol: float = 1e-10) -> list[VerificationReport]:
    """Check every link of both congruence chains at the level of D2 values.

    Per chain: one report per consecutive link, then the end-to-end check
    ``D2(N) = 10 D2(point)``.  Failures are reported, never raised.
    """
    reports = []
    for label, chain, endpoint, endpoint_label in _chains():
        for (ln, left), (rn, right) in zip(chain, chain[1:]):
            reports.append(congruence_link(f"congruence {ln} vs {rn}", left, right, tol))
        total = d2_of_divisor(chain[0][1])
        target = 10.0 * bloch_wigner(endpoint)
        notes = f"D2({label}) = {total:.15g}, 10*D2({endpoint_label}) = {target:.15g}"
        if abs(total + target) <= tol:
            notes += f"; D2({label}) = -10*D2({endpoint_label}) holds instead"
        reports.append(VerificationReport.compare(
            f"congruence D2({label}) vs 10*D2({endpoint_label})", total, target, tol, notes))
    return reports
