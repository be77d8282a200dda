"""Numerical verification of dilogarithm and regulator computations.

Modules:
    numerics: adaptive Gauss-Kronrod quadrature, ray compactification, winding numbers.
    dilog: Li2, the Bloch-Wigner function, Clausen function, Catalan's constant.
    bloch_group: divisors of points and their Bloch-Wigner values.
    cube_regulator: regulator integrals of curves in the 3-cube.
    conifold_series: constant-term series, torus periods, conifold sums.
    mirror_curve: the nodal genus-2 curve and its rational parametrizations.
    cli: the ``verify`` command.
"""

from __future__ import annotations

from .report import Config, VerificationReport

__all__ = ["Config", "VerificationReport"]
__version__ = "0.1.0"
