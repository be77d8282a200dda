"""Exception hierarchy shared by all regulator_lab modules."""

from __future__ import annotations


class RegulatorLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RegulatorLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidInterval(RegulatorLabError, ValueError):
    """An integration interval with ``lo >= hi``."""


class NonConvergence(RegulatorLabError, ArithmeticError):
    """An iterative scheme exhausted its budget before meeting its tolerance."""


class UndersampledPath(RegulatorLabError, ValueError):
    """Consecutive path samples differ in argument by at least pi."""


class ZeroSample(RegulatorLabError, ValueError):
    """A path sample is numerically zero, so its argument is undefined."""


class DegenerateInput(RegulatorLabError, ValueError):
    """Arguments make a dilogarithm relation ill-posed (e.g. ``xy = 1``)."""


class DegenerateCut(RegulatorLabError, ValueError):
    """A cube coordinate lies on the negative real axis along a whole arc.

    The intersection of the cut loci is then not proper, and the regulator
    must be computed with a phase perturbation ``eps > 0``.
    """


class BranchRisk(RegulatorLabError, ValueError):
    """The torus radii do not keep ``|phi / const| < 1``; the principal log is unsafe."""


class NonPowerOfTwoGrid(RegulatorLabError, ValueError):
    """Torus lattice sizes must be powers of two, at least 16."""


class PoleProximity(RegulatorLabError, ValueError):
    """Evaluation point too close to a pole of a uniformization."""


class UnknownCheck(RegulatorLabError, KeyError):
    """The CLI was asked for a check that is not registered."""


class MismatchDetail(RegulatorLabError, AssertionError):
    """Two exact coefficient tables disagree.

    Attributes:
        m, r: index of the first disagreeing coefficient (in summation order).
        expected: coefficient from the closed form.
        actual: coefficient from the constant-term expansion.
    """

    def __init__(self, m: int, r: int, expected, actual, message: str = ""):
        self.m = m
        self.r = r
        self.expected = expected
        self.actual = actual
        super().__init__(message or f"coefficient mismatch at (m, r) = ({m}, {r}): "
                                    f"closed form {expected}, expansion {actual}")
