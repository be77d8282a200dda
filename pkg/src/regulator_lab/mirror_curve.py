"""The genus-2 mirror curve at the conifold point, its nodes and uniformizations.

The curve family is the Laurent polynomial

    phi(X, Y) = x0 + x1 X + x2 Y + x3 X^-1 Y^-1 + x4 X^-2 Y^-2,

and at the conifold point the parameters are ``(5, 1, 1, -5, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bloch_group import PHI, PHI_TILDE, ZETA_POWERS, Divisor, point
from .errors import DomainError, PoleProximity
from .report import VerificationReport

EXPONENTS = ((0, 0), (1, 0), (0, 1), (-1, -1), (-2, -2))


@dataclass(frozen=True)
class CurveParams:
    x0: complex
    x1: complex
    x2: complex
    x3: complex
    x4: complex

    @classmethod
    def conifold(cls) -> "CurveParams":
        return cls(5, 1, 1, -5, 1)

    @property
    def coefficients(self) -> tuple[complex, ...]:
        return (self.x0, self.x1, self.x2, self.x3, self.x4)

    @property
    def z1(self) -> complex:
        return self.x1 * self.x2 * self.x3 / self.x0 ** 3

    @property
    def z2(self) -> complex:
        return self.x0 * self.x4 / self.x3 ** 2

    @property
    def coefficient_norm(self) -> float:
        return float(sum(abs(c) for c in self.coefficients))


def _check_torus_point(X, Y):
    if np.any(np.asarray(X) == 0) or np.any(np.asarray(Y) == 0):
        raise DomainError("phi is a Laurent polynomial: X and Y must be nonzero")


def _monomials(p: CurveParams, X, Y):
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    return [c * X ** a * Y ** b for c, (a, b) in zip(p.coefficients, EXPONENTS)]


def curve_eval(p: CurveParams, X, Y):
    """Value of phi at (X, Y); vectorized over arrays."""
    _check_torus_point(X, Y)
    out = sum(_monomials(p, X, Y))
    return complex(out) if np.ndim(out) == 0 else out


def log_gradient(p: CurveParams, X, Y) -> tuple[complex, complex]:
    """``(X dphi/dX, Y dphi/dY)``."""
    _check_torus_point(X, Y)
    terms = _monomials(p, X, Y)
    gx = sum(a * t for t, (a, _) in zip(terms, EXPONENTS))
    gy = sum(b * t for t, (_, b) in zip(terms, EXPONENTS))
    return complex(gx), complex(gy)


def log_hessian(p: CurveParams, X, Y) -> np.ndarray:
    """Hessian of phi(e^s, e^t) in (s, t)."""
    _check_torus_point(X, Y)
    terms = _monomials(p, X, Y)
    h = np.zeros((2, 2), dtype=complex)
    for t, (a, b) in zip(terms, EXPONENTS):
        h += complex(t) * np.array([[a * a, a * b], [a * b, b * b]])
    return h


def node(which: int) -> tuple[float, float]:
    if which == 1:
        return (-PHI, -PHI)
    if which == 2:
        return (-PHI_TILDE, -PHI_TILDE)
    raise DomainError("which must be 1 or 2")


def node_residuals(which: int, params: CurveParams | None = None, at=None) -> tuple[float, float, float]:
    p = params or CurveParams.conifold()
    X, Y = at if at is not None else node(which)
    gx, gy = log_gradient(p, X, Y)
    return abs(curve_eval(p, X, Y)), abs(gx), abs(gy)


def node_check(which: int, tol: float = 1e-10) -> VerificationReport:
    """phi and both log-derivatives vanish at the node q_which."""
    res = node_residuals(which)
    det = np.linalg.det(log_hessian(CurveParams.conifold(), *node(which)))
    notes = (f"|phi| = {res[0]:.3e}, |X phi_X| = {res[1]:.3e}, |Y phi_Y| = {res[2]:.3e}; "
             f"log-Hessian det = {det.real:.6g}{det.imag:+.3g}i")
    return VerificationReport.compare(f"curve node q{which}", max(res), 0.0, tol, notes)


@dataclass(frozen=True)
class FactoredMap:
    """``constant * prod (1 - alpha * t**sign) ** exponent``.

    Evaluated factor by factor, which keeps full relative accuracy near the
    roots ``t = alpha**-sign``.
    """

    constant: complex
    factors: tuple[tuple[complex, int, int], ...]

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.full(t.shape, self.constant, dtype=complex)
        for alpha, sign, exponent in self.factors:
            out = out * (1.0 - alpha * t ** sign) ** exponent
        return complex(out) if out.ndim == 0 else out

    def pole_distance(self, t: complex) -> float:
        """Smallest ``|1 - alpha t**sign|`` over factors with negative exponent."""
        dists = [abs(1.0 - alpha * complex(t) ** sign) for alpha, sign, e in self.factors if e < 0]
        return min(dists) if dists else math.inf


Variant = Literal["printed", "corrected"]


@dataclass(frozen=True)
class Uniformization:
    which: int
    X: FactoredMap
    Y: FactoredMap
    variant: str = "printed"

    def __call__(self, t):
        return self.X(t), self.Y(t)


def uniformization(which: int, variant: Variant = "printed") -> Uniformization:
    """Rational parametrizations of the conifold curve by P^1.

    ``variant="corrected"`` only differs for ``which=2``: the last Y factor
    ``(1 - t/zeta**2)**2`` of the printed formula is replaced by
    ``(1 - t/zeta)**2``, matching the pattern of the numerator ``(1 - zeta t)**3``.
    """
    z = ZETA_POWERS
    if which == 1:
        c = -PHI
        X = FactoredMap(c, ((z[2], -1, 3), (1.0 / z[2], -1, -2), (1.0, -1, -1)))
        Y = FactoredMap(c, ((z[2], 1, 3), (1.0 / z[2], 1, -2), (1.0, 1, -1)))
        return Uniformization(1, X, Y, "printed")
    if which == 2:
        c = -PHI_TILDE
        X = FactoredMap(c, ((z[1], -1, 3), (1.0 / z[1], -1, -2), (1.0, -1, -1)))
        if variant == "printed":
            y_den = 1.0 / z[2]
        elif variant == "corrected":
            y_den = 1.0 / z[1]
        else:
            raise DomainError(f"unknown variant {variant!r}")
        Y = FactoredMap(c, ((z[1], 1, 3), (y_den, 1, -2), (1.0, 1, -1)))
        return Uniformization(2, X, Y, variant)
    raise DomainError("which must be 1 or 2")


def uniformization_residual(u: Uniformization, t: complex, pole_tol: float = 1e-12) -> float:
    """``|phi(X(t), Y(t))|`` at the conifold parameters."""
    t = complex(t)
    if t == 0 or min(u.X.pole_distance(t), u.Y.pole_distance(t)) <= pole_tol:
        raise PoleProximity(f"t = {t} is within {pole_tol} of a pole")
    X, Y = u(t)
    return abs(curve_eval(CurveParams.conifold(), X, Y))


def max_residual_on_circle(u: Uniformization, radius: float, count: int, rng: np.random.Generator) -> float:
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    return max(uniformization_residual(u, radius * complex(math.cos(a), math.sin(a))) for a in theta)


def node_limit_check(u: Uniformization, tol: float = 1e-5) -> VerificationReport:
    """``t -> 0`` and ``t -> inf`` both land on the node of the uniformization."""
    X0, Y0 = node(u.which)
    dists = []
    for t in (1e-8, 1e8):
        X, Y = u(t)
        dists.append(max(abs(X - X0), abs(Y - Y0)))
    notes = f"distance to q{u.which}: t=1e-8 -> {dists[0]:.3e}, t=1e8 -> {dists[1]:.3e}"
    return VerificationReport.compare(
        f"uniformization {u.which} ({u.variant}) node limits", max(dists), 0.0, tol, notes)


def adjudicate_second_uniformization(t: complex = 2.0, tol: float = 1e-9) -> VerificationReport:
    """Which transcription of the second uniformization lies on the curve."""
    printed = uniformization(2, "printed")
    corrected = uniformization(2, "corrected")
    rp = uniformization_residual(printed, t)
    rc = uniformization_residual(corrected, t)
    lim_p = node_limit_check(printed)
    lim_c = node_limit_check(corrected)
    matches = [name for name, r in (("printed", rp), ("corrected", rc)) if r < tol]
    verdict = ", ".join(matches) if matches else "neither"
    notes = (f"residual at t={t}: printed denominator (1 - t/zeta^2)^2 -> {rp:.3e}, "
             f"denominator (1 - t/zeta)^2 -> {rc:.3e}; node limits printed {lim_p.status}, "
             f"corrected {lim_c.status}; satisfies the curve equation: {verdict}")
    return VerificationReport.adjudication("uniformization 2 transcription", rp, rc, notes)


def divisor_constant(which: int) -> Divisor:
    """The divisors N1, N2 on the fifth roots of unity."""
    z = ZETA_POWERS
    labels = {1: "zeta", 2: "zeta^2", 3: "zeta^3", 4: "zeta^4"}
    if which == 2:
        coeffs = {1: -6, 2: 9, 3: 4, 4: 4}
    elif which == 1:
        coeffs = {2: -6, 4: 9, 1: 4, 3: 4}
    else:
        raise DomainError("which must be 1 or 2")
    return Divisor.from_terms((coeffs[k], point(z[k], labels[k])) for k in sorted(coeffs))
