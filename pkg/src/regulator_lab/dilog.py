"""Dilogarithm, Bloch-Wigner function, Clausen function and Catalan's constant.

Everything here is binary64.  ``li2`` reaches every point of the plane from
one of three kernels:

* the defining series ``sum z**k / k**2`` for ``|z| <= 1/2``;
* the inversion ``Li2(z) + Li2(1/z) = -pi**2/6 - log(-z)**2 / 2`` for ``|z| > 2``;
* on the annulus, the series in ``u = -log(1 - z)`` with Bernoulli
  coefficients when ``Re z <= 1/2``, after the complement map
  ``z -> 1 - z`` otherwise.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .errors import DegenerateInput

ZETA2 = math.pi ** 2 / 6.0
TINY = 1e-300


def _bernoulli_coefficients(count: int) -> list[float]:
    # B_n / (n + 1)! for n = 0 .. count-1, with B_1 = -1/2
    bern = [Fraction(1)]
    for n in range(1, count):
        acc = Fraction(0)
        for k in range(n):
            acc += math.comb(n + 1, k) * bern[k]
        bern.append(-acc / (n + 1))
    return [float(b / math.factorial(n + 1)) for n, b in enumerate(bern)]


_BERN = _bernoulli_coefficients(40)


def _series(z: complex) -> complex:
    # |z| <= 1/2: 0.5**k / k**2 < 1e-17 for k > 45
    total = 0j
    power = z
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300) or k > 80:
            return total
        k += 1
        power *= z


def _bernoulli_series(z: complex) -> complex:
    u = -cmath.log(1.0 - z)
    u2 = u * u
    # B_1 term handled separately, then only even Bernoulli numbers remain
    total = u - 0.25 * u2
    power = u * u2  # u**3
    for n in range(2, len(_BERN), 2):
        term = _BERN[n] * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= u2
    return total


def _li2_core(z: complex, depth: int = 0) -> complex:
    if z == 0:
        return 0j
    az = abs(z)
    if az <= 0.5:
        return _series(z)
    if az > 2.0:
        w = 1.0 / z
        lg = cmath.log(-z)
        return -_li2_core(w, depth + 1) - ZETA2 - 0.5 * lg * lg
    if z.real <= 0.5:
        return _bernoulli_series(z)
    if depth > 3:
        # unreachable for finite input; guards against a refactoring slip
        raise RuntimeError(f"li2 transform recursion did not terminate at z={z}")
    w = 1.0 - z
    return ZETA2 - cmath.log(z) * cmath.log(w) - _li2_core(w, depth + 1)


def li2(z: complex) -> complex:
    """Principal branch of the dilogarithm, cut along ``[1, inf)``.

    On the cut itself the value is the limit from the lower half-plane.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"li2 needs a finite argument, got {z}")
    if z.imag == 0.0:
        x = z.real
        if x == 1.0:
            return complex(ZETA2, 0.0)
        if x > 1.0:
            lx = math.log(x)
            re = 2.0 * ZETA2 - 0.5 * lx * lx - _li2_core(complex(1.0 / x, 0.0)).real
            return complex(re, -math.pi * lx)
        return complex(_li2_core(complex(x, 0.0)).real, 0.0)
    return _li2_core(z)


def bloch_wigner(z: complex) -> float:
    """``D2(z) = Im Li2(z) + arg(1 - z) log|z|``; zero on the real axis."""
    z = complex(z)
    if z.imag == 0.0:
        return 0.0
    if abs(z) < TINY or abs(1.0 - z) < TINY:
        return 0.0
    w = 1.0 - z
    # atan2 rather than cmath.phase, which raises on subnormal imaginary parts
    return li2(z).imag + math.atan2(w.imag, w.real) * math.log(abs(z))


def clausen2(theta: float) -> float:
    """Clausen function ``Cl2(theta) = D2(exp(i theta))``."""
    t = math.remainder(float(theta), 2.0 * math.pi)
    if t == 0.0 or abs(t) == math.pi:
        return 0.0
    return bloch_wigner(complex(math.cos(t), math.sin(t)))


def alternating_sum(term, n: int = 30) -> float:
    """Accelerated value of ``sum_{k>=0} (-1)**k term(k)``.

    Cohen-Rodriguez Villegas-Zagier weights (a refined Euler transform):
    the error after ``n`` terms is about ``5.83**-n`` for totally monotone
    ``term``.
    """
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    parts = []
    for k in range(n):
        c = b - c
        parts.append(c * term(k))
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return math.fsum(parts) / d


def catalan() -> float:
    """Catalan's constant ``sum_{n>=0} (-1)**n / (2n + 1)**2``."""
    return alternating_sum(lambda k: 1.0 / ((2 * k + 1) ** 2), 30)


def five_term_divisor_points(x: complex, y: complex) -> tuple[complex, complex, complex, complex, complex]:
    """The five arguments ``x, y, (1-x)/(1-xy), 1-xy, (1-y)/(1-xy)``."""
    x = complex(x)
    y = complex(y)
    q = 1.0 - x * y
    if abs(q) < 1e-14:
        raise DegenerateInput(f"|1 - xy| = {abs(q):.3e} is below 1e-14")
    return x, y, (1.0 - x) / q, q, (1.0 - y) / q


def five_term_defect(x: complex, y: complex) -> float:
    """``|D2(x) + D2(y) + D2((1-x)/(1-xy)) + D2(1-xy) + D2((1-y)/(1-xy))|``."""
    return abs(math.fsum(bloch_wigner(p) for p in five_term_divisor_points(x, y)))
