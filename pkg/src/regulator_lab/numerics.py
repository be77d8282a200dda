"""Quadrature and path utilities.

The integrands met in this package are smooth on open intervals and grow at
most logarithmically at flagged endpoints.  A global-adaptive 15-point
Gauss-Kronrod scheme handles them; panels touching a flagged endpoint are
integrated in the variable ``u`` of ``x = lo + (hi - lo) * exp(-u)`` (or the
mirrored map), which turns ``log`` growth into exponential decay.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInterval, NonConvergence, UndersampledPath, ZeroSample

# Kronrod abscissae on [-1, 1] (non-negative half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for the 7-point rule living on _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]

DEFAULT_MAX_PANELS = 10_000

# upper limit of the exponential substitution; exp(-60) * 60 ~ 5e-25
_U_MAX = 60.0


@dataclass(frozen=True)
class Interval:
    """Integration interval ``[lo, hi]`` with optional log-singular endpoints."""

    lo: float
    hi: float
    lo_singular: bool = False
    hi_singular: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidInterval(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise InvalidInterval(f"need lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error_estimate: float
    evaluations: int


def fsum_complex(values: Iterable[complex]) -> complex:
    """Correctly rounded sum of complex values (real and imaginary parts separately)."""
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


class _Segment:
    """A sub-problem in its own integration variable."""

    __slots__ = ("g", "lo", "hi")

    def __init__(self, g, lo, hi):
        self.g = g
        self.lo = lo
        self.hi = hi


def _panel(g, a: float, b: float):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(g(mid + half * NODES), dtype=complex)
    if vals.shape != (15,):
        raise ValueError("integrand must map an array of nodes to an array of the same shape")
    if not np.all(np.isfinite(vals)):
        raise NonConvergence(f"integrand is not finite on the panel [{a}, {b}]")
    k = half * complex(math.fsum((KRONROD_WEIGHTS * vals.real).tolist()),
                       math.fsum((KRONROD_WEIGHTS * vals.imag).tolist()))
    gsum = half * complex(math.fsum((GAUSS_WEIGHTS * vals.real).tolist()),
                          math.fsum((GAUSS_WEIGHTS * vals.imag).tolist()))
    return k, abs(k - gsum)


def _singular_cutoff(anchor: float, width: float) -> float:
    # keep anchor + width * exp(-u) distinguishable from anchor in binary64
    spacing = math.ulp(anchor) if anchor != 0.0 else math.ulp(width) * 1e-200
    return max(1.0, min(_U_MAX, math.log(width / (8.0 * spacing))))


def _segments(f, iv: Interval) -> list[_Segment]:
    lo, hi = iv.lo, iv.hi
    if iv.lo_singular and iv.hi_singular:
        mid = 0.5 * (lo + hi)
        return _segments(f, Interval(lo, mid, True, False)) + _segments(f, Interval(mid, hi, False, True))
    width = hi - lo
    if iv.lo_singular:
        def g(u, lo=lo, width=width):
            e = width * np.exp(-u)
            return f(lo + e) * e
        return [_Segment(g, 0.0, _singular_cutoff(lo, width))]
    if iv.hi_singular:
        def g(u, hi=hi, width=width):
            e = width * np.exp(-u)
            return f(hi - e) * e
        return [_Segment(g, 0.0, _singular_cutoff(hi, width))]
    return [_Segment(f, lo, hi)]


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    iv: Interval,
    tol: float = 1e-12,
    *,
    max_panels: int = DEFAULT_MAX_PANELS,
    reverse: bool = False,
) -> QuadResult:
    """Integrate ``f`` over ``iv`` to absolute tolerance ``tol``.

    ``f`` is called with 1-D arrays of nodes and must return an array of the
    same shape (real or complex).  The error estimate is the sum over panels
    of ``|K15 - G7|``.  Panels are bisected largest-error first; ties are
    broken by creation order, so results are deterministic.

    ``reverse=True`` integrates along the reversed orientation; it uses the
    same node set and returns exactly the negated value.

    Raises:
        NonConvergence: the panel budget was exhausted first.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    segments = _segments(f, iv)
    heap: list[tuple[float, int, int, float, float, complex]] = []
    counter = 0
    total_err = 0.0
    for si, seg in enumerate(segments):
        k, e = _panel(seg.g, seg.lo, seg.hi)
        heap.append((-e, counter, si, seg.lo, seg.hi, k))
        counter += 1
        total_err += e
    heapq.heapify(heap)
    panels = len(heap)
    evaluations = 15 * panels
    while total_err > tol:
        if panels >= max_panels:
            raise NonConvergence(
                f"adaptive quadrature used {panels} panels; error estimate {total_err:.3e} > tol {tol:.3e}"
            )
        neg_e, _, si, a, b, _ = heapq.heappop(heap)
        g = segments[si].g
        m = 0.5 * (a + b)
        k1, e1 = _panel(g, a, m)
        k2, e2 = _panel(g, m, b)
        heapq.heappush(heap, (-e1, counter, si, a, m, k1))
        heapq.heappush(heap, (-e2, counter + 1, si, m, b, k2))
        counter += 2
        panels += 1
        evaluations += 30
        # recompute instead of updating incrementally to avoid drift
        total_err = math.fsum(-item[0] for item in heap)
    ordered = sorted(heap, key=lambda item: (item[2], item[3]))
    value = fsum_complex(item[5] for item in ordered)
    err = math.fsum(-item[0] for item in ordered)
    if reverse:
        value = -value
    return QuadResult(value=value, error_estimate=err, evaluations=evaluations)


def integrate_pieces(
    f: Callable[[np.ndarray], np.ndarray],
    intervals: Sequence[Interval],
    tol: float = 1e-12,
    *,
    max_panels: int = DEFAULT_MAX_PANELS,
) -> QuadResult:
    """Integrate over consecutive intervals, splitting ``tol`` evenly."""
    results = [integrate_adaptive(f, iv, tol / len(intervals), max_panels=max_panels) for iv in intervals]
    return QuadResult(
        value=fsum_complex(r.value for r in results),
        error_estimate=math.fsum(r.error_estimate for r in results),
        evaluations=sum(r.evaluations for r in results),
    )


def compactify_ray(s):
    """Map ``s`` in (0, 1) onto the negative real axis: ``z = -(1 - s) / s``.

    ``s -> 0+`` sends ``z -> -infinity`` and ``s -> 1-`` sends ``z -> 0-``.
    Accepts scalars or arrays.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("compactify_ray needs 0 < s < 1")
    z = -(1.0 - arr) / arr
    return float(z) if z.ndim == 0 else z


def compactify_ray_derivative(s):
    """``dz/ds = 1 / s**2`` for :func:`compactify_ray`."""
    arr = np.asarray(s, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("compactify_ray needs 0 < s < 1")
    d = 1.0 / (arr * arr)
    return float(d) if d.ndim == 0 else d


def unwrapped_argument_change(samples: Sequence[complex]) -> float:
    """Total change of ``arg`` along the sampled path.

    Raises:
        ZeroSample: a sample has modulus below 1e-300.
        UndersampledPath: two consecutive samples differ in argument by >= pi.
    """
    w = np.asarray(samples, dtype=complex)
    if w.ndim != 1 or w.size < 2:
        raise DomainError("need at least two samples")
    if np.any(np.abs(w) < 1e-300):
        raise ZeroSample("a sample has modulus below 1e-300")
    # argument of each ratio is the principal jump in (-pi, pi]
    jumps = np.angle(w[1:] / w[:-1])
    if np.any(np.abs(jumps) >= math.pi * (1.0 - 1e-12)):
        i = int(np.argmax(np.abs(jumps)))
        raise UndersampledPath(f"argument jump {jumps[i]:.6f} between samples {i} and {i + 1}")
    return math.fsum(jumps.tolist())


def winding_number(samples: Sequence[complex], closed: bool = True, *, close_tol: float = 1e-9) -> int:
    """Winding number about 0 of a sampled path (counterclockwise = +1)."""
    w = np.asarray(samples, dtype=complex)
    if closed and w.size >= 2:
        scale = max(abs(w[0]), abs(w[-1]))
        if abs(w[0] - w[-1]) > close_tol * max(scale, 1.0):
            raise DomainError("closed path: first and last samples do not coincide")
    return int(round(unwrapped_argument_change(w) / (2.0 * math.pi)))


def chebyshev_points(n: int) -> np.ndarray:
    """``n`` Chebyshev points of the first kind mapped into (0, 1), ascending."""
    k = np.arange(n)
    return np.sort(0.5 * (1.0 - np.cos(math.pi * (k + 0.5) / n)))


def richardson_table(values: Sequence[float], steps: Sequence[float]) -> list[float]:
    """Polynomial (Neville) extrapolation of ``values(step)`` to ``step = 0``.

    Returns the diagonal of the Neville tableau: entry ``j`` uses the first
    ``j + 1`` samples.  The difference of the last two entries is the usual
    stability estimate.
    """
    if len(values) != len(steps) or not values:
        raise DomainError("values and steps must be non-empty and equally long")
    h = [float(x) for x in steps]
    table = [float(v) for v in values]
    diagonal = [table[0]]
    n = len(table)
    # in-place Neville: after pass j, table[i] extrapolates samples i-j..i
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (h[i - j] * table[i] - h[i] * table[i - 1]) / (h[i - j] - h[i])
        diagonal.append(table[j])
    return diagonal
