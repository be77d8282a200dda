"""KLM regulator integrals for curves in the 3-cube.

A curve is a triple ``(f1, f2, f3)`` of rational functions of a parameter
``z`` with ``f1(z) = z`` (or ``1/z``, which is reparametrized to ``z``).  For
such a precycle the regulator current reduces to a line integral over the
ray ``T_{f1} = (-inf, 0)`` plus point terms where ``f2`` crosses the negative
real axis.  Values are normalized by ``1/(2 pi i)``::

    R = sum mult * ( int_{-inf}^{0} log f2 dlog f3
                     + 2 pi i * sum_{t*} sigma(t*) log f3(t*) ),

so that ``Im R`` is the quantity quoted for both worked examples.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .dilog import catalan
from .errors import DegenerateCut, DomainError, UndersampledPath
from .numerics import (
    Interval,
    chebyshev_points,
    compactify_ray,
    compactify_ray_derivative,
    fsum_complex,
    integrate_adaptive,
    richardson_table,
    winding_number,
)
from .report import DEFAULT_EPS_SCHEDULE

TWO_PI_I = 2j * math.pi
_ROOT_TOL = 1e-12
# numerical roots of a double root split by about sqrt(machine eps)
_MULTIPLE_ROOT_TOL = 1e-6
_SCAN_POINTS = 4096


def _trim(c: Sequence[complex]) -> tuple[complex, ...]:
    c = [complex(x) for x in c]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def _taylor_shift(c: Sequence[complex], a: float) -> tuple[complex, ...]:
    # synthetic division repeated: coefficients of p(a + d) in powers of d
    work = list(reversed([complex(x) for x in c]))
    n = len(work)
    out = []
    for _ in range(n):
        acc = 0j
        nxt = []
        for x in work:
            acc = acc * a + x
            nxt.append(acc)
        out.append(nxt.pop())
        work = nxt
    return tuple(out)


@dataclass(frozen=True)
class RationalMap:
    """``numerator(z) / denominator(z)``, coefficients in ascending order."""

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...] = (1.0,)

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if all(c == 0 for c in den):
            raise DomainError("denominator is identically zero")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls((0.0, 1.0))

    @classmethod
    def constant(cls, c: complex) -> "RationalMap":
        return cls((c,))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = P.polyval(z, self.numerator) / P.polyval(z, self.denominator)
        return complex(out) if np.ndim(out) == 0 else out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        n = P.polyval(z, self.numerator)
        d = P.polyval(z, self.denominator)
        dn = P.polyval(z, P.polyder(self.numerator)) if len(self.numerator) > 1 else 0 * z
        dd = P.polyval(z, P.polyder(self.denominator)) if len(self.denominator) > 1 else 0 * z
        out = (dn * d - n * dd) / (d * d)
        return complex(out) if np.ndim(out) == 0 else out

    def dlog(self, z):
        """``f'(z) / f(z)``, computed as ``N'/N - D'/D``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for coeffs, sign in ((self.numerator, 1.0), (self.denominator, -1.0)):
            if len(coeffs) > 1:
                out = out + sign * P.polyval(z, P.polyder(coeffs)) / P.polyval(z, coeffs)
        return complex(out) if out.ndim == 0 else out

    def scaled(self, c: complex) -> "RationalMap":
        return RationalMap(tuple(c * x for x in self.numerator), self.denominator)

    def reciprocal(self) -> "RationalMap":
        return RationalMap(self.denominator, self.numerator)

    def pullback_by_inverse(self) -> "RationalMap":
        """The map ``t -> self(1/t)``."""
        n = len(self.numerator) - 1
        d = len(self.denominator) - 1
        num = tuple(reversed(self.numerator))
        den = tuple(reversed(self.denominator))
        if d > n:
            num = (0.0,) * (d - n) + num
        elif n > d:
            den = (0.0,) * (n - d) + den
        return RationalMap(num, den)

    def shifted(self, a: float) -> "RationalMap":
        """The map ``d -> self(a + d)``, re-expanded around ``a``.

        Near a zero or pole at ``a`` the expanded coefficients keep full
        relative accuracy in ``d`` where evaluation at ``a + d`` would cancel.
        """
        if a == 0:
            return self
        return RationalMap(_taylor_shift(self.numerator, a), _taylor_shift(self.denominator, a))

    def _is_monomial(self, power: int) -> bool:
        num, den = self.numerator, self.denominator
        if power == 1:
            return len(num) == 2 and num[0] == 0 and len(den) == 1 and num[1] == den[0]
        return len(den) == 2 and den[0] == 0 and len(num) == 1 and den[1] == num[0]

    def is_identity(self) -> bool:
        return self._is_monomial(1)

    def is_reciprocal(self) -> bool:
        return self._is_monomial(-1)

    def real_roots(self, lo: float, hi: float) -> list[float]:
        """Real zeros and poles in ``[lo, hi]``."""
        found = []
        for coeffs in (self.numerator, self.denominator):
            if len(coeffs) < 2:
                continue
            for r in P.polyroots(coeffs):
                if abs(r.imag) <= _MULTIPLE_ROOT_TOL * max(1.0, abs(r)) and lo - _MULTIPLE_ROOT_TOL <= r.real <= hi + _MULTIPLE_ROOT_TOL:
                    found.append(float(r.real))
        return sorted(found)


@dataclass(frozen=True)
class CubeCurve:
    """One component ``multiplicity * (f1, f2, f3)`` of a precycle.

    ``phase_sign`` selects the direction of the regularizing rotation of
    ``f2`` (``+1`` for a curve, ``-1`` for its inverse partner).
    """

    f1: RationalMap
    f2: RationalMap
    f3: RationalMap
    multiplicity: int = 1
    phase_sign: int = 1

    def __post_init__(self):
        if self.multiplicity == 0:
            raise DomainError("multiplicity must be nonzero")
        if self.phase_sign not in (1, -1):
            raise DomainError("phase_sign must be +1 or -1")

    def on_ray(self) -> "CubeCurve":
        """The same curve parametrized so that ``f1`` is the identity."""
        if self.f1.is_identity():
            return self
        if self.f1.is_reciprocal():
            return CubeCurve(RationalMap.identity(), self.f2.pullback_by_inverse(),
                             self.f3.pullback_by_inverse(), self.multiplicity, self.phase_sign)
        raise DomainError("only f1 = z or f1 = 1/z is supported")


@dataclass(frozen=True)
class Precycle:
    components: tuple[CubeCurve, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DomainError("a precycle needs at least one component")


def log_branch(z, shift: int = 0):
    """Logarithm with imaginary part in ``[-pi, pi)``, plus ``2 pi i * shift``."""
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    ang = np.where(ang >= math.pi, ang - 2.0 * math.pi, ang)
    out = np.log(np.abs(z)) + 1j * (ang + 2.0 * math.pi * shift)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Crossing:
    z: float
    sigma: int
    point_term: complex


def _on_ray_maps(curve: CubeCurve, eps: float):
    rot = cmath.exp(1j * eps * curve.phase_sign)
    g = curve.f2.scaled(rot)
    return g, curve.f3, g.pullback_by_inverse(), curve.f3.pullback_by_inverse()


def _eval_on_ray(direct: RationalMap, pulled: RationalMap, s: np.ndarray) -> np.ndarray:
    # s in (0,1) -> z = -(1-s)/s; use t = 1/z = -s/(1-s) where |z| > 1
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape, dtype=complex)
    far = s <= 0.5
    if np.any(far):
        out[far] = pulled(-s[far] / (1.0 - s[far]))
    if np.any(~far):
        out[~far] = direct(compactify_ray(s[~far]))
    return out


def find_crossings(curve: CubeCurve, eps: float, branch_shift: int = 0,
                   scan_points: int = _SCAN_POINTS) -> list[Crossing]:
    """Isolated points of the ray where ``f2`` (rotated by ``eps``) crosses R<0.

    Raises:
        DegenerateCut: ``f2`` runs along the negative axis instead of crossing it.
    """
    g, h, g_inv, h_inv = _on_ray_maps(curve, eps)
    s = (np.arange(scan_points) + 0.5) / scan_points
    vals = _eval_on_ray(g, g_inv, s)
    on_cut = (np.abs(vals.imag) <= 1e-12 * np.abs(vals)) & (vals.real < 0)
    runs = np.convolve(on_cut.astype(int), np.ones(3, dtype=int), mode="valid")
    if np.any(runs == 3):
        raise DegenerateCut(
            "f2 lies on the negative real axis along an interval of the ray; use eps > 0")
    im = vals.imag

    def im_g(x):
        return float(_eval_on_ray(g, g_inv, np.array([x]))[0].imag)

    out = []
    for i in range(scan_points - 1):
        a, b = s[i], s[i + 1]
        if im[i + 1] == 0.0:
            # exact hit on a sample: count it once, from the left neighbour
            if i + 2 >= scan_points or im[i] * im[i + 2] >= 0:
                continue
            root = b
        elif im[i] * im[i + 1] < 0:
            root = brentq(im_g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            continue
        z_star = compactify_ray(root)
        g_star = complex(_eval_on_ray(g, g_inv, np.array([root]))[0])
        if g_star.real >= 0:
            continue
        # sigma: direction of the crossing as z increases towards 0
        sigma = 1 if g.dlog(z_star).imag > 0 else -1
        term = TWO_PI_I * sigma * log_branch(h(z_star), branch_shift)
        out.append(Crossing(float(z_star), sigma, term))
    return out


def _pieces(direct: RationalMap, extra: Sequence[float]) -> list[Interval]:
    """Split [-1, 0] at real zeros/poles of ``direct`` and at ``extra`` points."""
    cuts = {-1.0: False, 0.0: False}
    for r in direct.real_roots(-1.0, 0.0):
        r = min(max(r, -1.0), 0.0)
        key = min(cuts, key=lambda c: abs(c - r))
        if abs(key - r) <= _MULTIPLE_ROOT_TOL:
            cuts[key] = True
        else:
            cuts[r] = True
    for x in extra:
        if -1.0 + 1e-12 < x < -1e-12 and all(abs(x - c) > 1e-12 for c in cuts):
            cuts[x] = False
    pts = sorted(cuts)
    return [Interval(a, b, cuts[a], cuts[b]) for a, b in zip(pts, pts[1:])]


def _integrate_local(g: RationalMap, h: RationalMap, pieces: Sequence[Interval], tol: float,
                     branch_shift: int) -> complex:
    """``int log g dlog h`` over ``pieces``, each in a coordinate centred on its singular end."""
    parts = []
    share = tol / len(pieces)
    for iv in pieces:
        halves = [iv]
        if iv.lo_singular and iv.hi_singular:
            mid = 0.5 * (iv.lo + iv.hi)
            halves = [Interval(iv.lo, mid, True, False), Interval(mid, iv.hi, False, True)]
        for part in halves:
            anchor = part.hi if part.hi_singular else part.lo
            ga, ha = g.shifted(anchor), h.shifted(anchor)

            def integrand(d, ga=ga, ha=ha):
                return log_branch(ga(d), branch_shift) * ha.dlog(d)

            local = Interval(part.lo - anchor, part.hi - anchor, part.lo_singular, part.hi_singular)
            parts.append(integrate_adaptive(integrand, local, share / len(halves)).value)
    return fsum_complex(parts)


def component_regulator(curve: CubeCurve, eps: float, tol: float, branch_shift: int = 0) -> complex:
    """Normalized regulator of one component (multiplicity included)."""
    curve = curve.on_ray()
    g, h, g_inv, h_inv = _on_ray_maps(curve, eps)
    crossings = find_crossings(curve, eps, branch_shift)
    near_cuts = [c.z for c in crossings if c.z >= -1.0]
    far_cuts = [1.0 / c.z for c in crossings if c.z < -1.0]
    # z in [-1, 0] directly; z in (-inf, -1] as t = 1/z in [-1, 0), traversed from 0 to -1
    near_part = _integrate_local(g, h, _pieces(g, near_cuts), 0.5 * tol, branch_shift)
    far_part = -_integrate_local(g_inv, h_inv, _pieces(g_inv, far_cuts), 0.5 * tol, branch_shift)
    points = fsum_complex(c.point_term for c in crossings)
    return curve.multiplicity * (near_part + far_part + points)


def r3_regulator(p: Precycle, eps: float = 0.0, tol: float = 1e-10, branch_shift: int = 0) -> complex:
    """Normalized regulator ``(1/2 pi i) int R3`` of a one-dimensional precycle.

    Args:
        p: precycle whose components have ``f1`` equal to ``z`` or ``1/z``.
        eps: phase ``e^{+-i eps}`` applied to ``f2`` (sign from ``phase_sign``).
        tol: absolute quadrature tolerance, shared among components.
        branch_shift: add ``2 pi i * branch_shift`` to every logarithm.

    Raises:
        DegenerateCut: ``f2`` lies along the cut and ``eps`` does not move it off.
        NonConvergence: from the quadrature.
    """
    if eps < 0:
        raise DomainError("eps must be >= 0")
    share = tol / len(p.components)
    return fsum_complex(component_regulator(c, eps, share, branch_shift) for c in p.components)


# -- the elliptic toy model -------------------------------------------------

W_SCALE = 3.0 / 2.0 ** (5.0 / 3.0)
W_MIN = 2.0 ** (-5.0 / 3.0)
W_MAX = 2.0 ** (-2.0 / 3.0)


def toy_curve_coordinates(z):
    """``(x, y, dx/dz, dy/dz)`` on the nodal cubic ``y^2 = x^3 + x^2``."""
    z = np.asarray(z, dtype=float)
    q = z - 1.0
    x = 4.0 * z / (q * q)
    y = 4.0 * z * (z + 1.0) / (q * q * q)
    dx = -4.0 * (z + 1.0) / (q * q * q)
    dy = -4.0 * (z * z + 4.0 * z + 1.0) / (q * q * q * q)
    return x, y, dx, dy


def toy_w(z):
    """``w(z) = 3 / 2^(5/3) * (-i y(z) + x(z) + 2/3)`` for real ``z``."""
    x, y, _, _ = toy_curve_coordinates(z)
    out = W_SCALE * (x + 2.0 / 3.0 - 1j * y)
    return complex(out) if np.ndim(out) == 0 else out


def _toy_w_on_ray(s):
    """``w`` and ``dw/ds`` along the compactified ray, accurate as ``s -> 0``."""
    s = np.asarray(s, dtype=float)
    z = compactify_ray(s)
    x, y, dx, dy = toy_curve_coordinates(z)
    w = W_SCALE * (x + 2.0 / 3.0 - 1j * y)
    dw = W_SCALE * (dx - 1j * dy) * compactify_ray_derivative(s)
    return w, dw


def _toy_integrand(s):
    w, dw = _toy_w_on_ray(s)
    return np.log(np.abs(w)) * (dw / w).imag


def toy_model_im_regulator(tol: float = 1e-10, multiplicity: int = 9) -> float:
    """``Im R = 2 * multiplicity * int_gamma log|w| darg w``.

    ``gamma`` is traversed from ``z = 0`` out to ``z = -inf``; in this
    direction ``w`` winds clockwise and the value is positive.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    # z = -1 (s = 1/2) is where w crosses the negative axis; keep it a panel edge
    pieces = [Interval(0.0, 0.5), Interval(0.5, 1.0)]
    res = 0.0
    for iv in pieces:
        res += integrate_adaptive(_toy_integrand, iv, 0.25 * tol / abs(multiplicity), reverse=True).value.real
    return 2.0 * multiplicity * res


def verify_w_bounds(n_samples: int = 10_000) -> tuple[float, float]:
    """Min and max of ``|w|`` at Chebyshev points of the compactified ray."""
    if n_samples < 100:
        raise DomainError("need at least 100 samples")
    w, _ = _toy_w_on_ray(chebyshev_points(n_samples))
    mod = np.abs(w)
    return float(mod.min()), float(mod.max())


def toy_model_winding(w: Callable | None = None, *, start: int = 256, budget: int = 2 ** 20) -> int:
    """Winding number about 0 of ``w(z)`` along ``gamma`` (from 0 to -inf).

    The path is closed at ``z = 0`` and ``z = -inf``; sampling doubles until
    consecutive samples are less than ``pi`` apart in argument.

    Raises:
        UndersampledPath: still undersampled with ``budget`` samples.
    """
    fn = toy_w if w is None else w
    n = start
    while True:
        s = ((np.arange(n) + 0.5) / n)[::-1]
        samples = np.asarray(fn(compactify_ray(s)), dtype=complex)
        if samples.shape == ():
            samples = np.full(s.shape, samples, dtype=complex)
        try:
            return winding_number(np.append(samples, samples[0]), closed=True)
        except UndersampledPath:
            if n >= budget:
                raise
            n *= 2


def toy_model_precycle(multiplicity: int = 9) -> Precycle:
    """``multiplicity * (z, w, w / w-bar)`` with ``w-bar`` the conjugate-coefficient map."""
    cube = P.polypow((-1.0, 1.0), 3)
    z_z1 = P.polymul((0.0, 1.0), (-1.0, 1.0))          # z (z - 1)
    z_zp1 = P.polymul((0.0, 1.0), (1.0, 1.0))          # z (z + 1)
    base = P.polyadd(4.0 * z_z1, (2.0 / 3.0) * cube)
    w_num = P.polyadd(base, -4j * np.asarray(z_zp1))
    wbar_num = P.polyadd(base, 4j * np.asarray(z_zp1))
    w = RationalMap(tuple(W_SCALE * np.asarray(w_num, dtype=complex)), tuple(cube))
    ratio = RationalMap(tuple(np.asarray(w_num, dtype=complex)), tuple(np.asarray(wbar_num, dtype=complex)))
    return Precycle((CubeCurve(RationalMap.identity(), w, ratio, multiplicity),))


# -- the Collino-type class -------------------------------------------------

# f2 = -((1 - z)/(1 + z))^2,  f3 = -((z - i)/(z + i))^2, ascending coefficients
COLLINO_F2 = RationalMap((-1.0, 2.0, -1.0), (1.0, 2.0, 1.0))
COLLINO_F3 = RationalMap((1.0, 2j, -1.0), (-1.0, 2j, 1.0))


def collino_precycle() -> Precycle:
    """``(z, f2, f3) - (1/z, 1/f2, 1/f3)``."""
    first = CubeCurve(RationalMap.identity(), COLLINO_F2, COLLINO_F3, 1, 1)
    partner = CubeCurve(RationalMap((1.0,), (0.0, 1.0)), COLLINO_F2.reciprocal(),
                        COLLINO_F3.reciprocal(), -1, -1)
    return Precycle((first, partner))


def _check_schedule(eps_schedule: Sequence[float]) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_schedule)
    if any(e == 0 for e in eps):
        raise DegenerateCut("eps = 0 puts f2 on the cut; the schedule must be positive")
    if len(eps) < 3:
        raise DomainError("eps_schedule needs at least three entries")
    if any(e < 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("eps_schedule must be positive and strictly decreasing")
    return eps


@dataclass(frozen=True)
class EpsExtrapolation:
    values: tuple[complex, ...]
    im_extrapolated: float
    re_extrapolated: float
    stability: float


def collino_extrapolation(eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE, tol: float = 1e-10,
                          precycle: Precycle | None = None) -> EpsExtrapolation:
    eps = _check_schedule(eps_schedule)
    p = precycle or collino_precycle()
    values = tuple(r3_regulator(p, e, tol) for e in eps)
    im_diag = richardson_table([v.imag for v in values], eps)
    re_diag = richardson_table([v.real for v in values], eps)
    return EpsExtrapolation(values, im_diag[-1], re_diag[-1], abs(im_diag[-1] - im_diag[-2]))


def collino_z3_regulator(eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE, tol: float = 1e-10) -> tuple[float, float]:
    """Extrapolated ``Im R`` as ``eps -> 0`` and the stability estimate."""
    ex = collino_extrapolation(eps_schedule, tol)
    return ex.im_extrapolated, ex.stability


def rational_multiple(value: float, unit: float, max_denominator: int = 60, tol: float = 1e-6) -> Fraction | None:
    """``q`` with ``|value - q * unit| < tol`` and denominator ``<= max_denominator``."""
    q = Fraction(value / unit).limit_denominator(max_denominator)
    return q if abs(value - float(q) * unit) < tol else None


def collino_real_part(eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE, tol: float = 1e-10) -> tuple[float, Fraction | None]:
    """Extrapolated ``Re R`` and its ratio to ``(2 pi)^2`` if that ratio is a small rational."""
    ex = collino_extrapolation(eps_schedule, tol)
    return ex.re_extrapolated, rational_multiple(ex.re_extrapolated, (2.0 * math.pi) ** 2)


TOY_REFERENCE = 120.0 * catalan()
COLLINO_REFERENCE = 32.0 * catalan()
