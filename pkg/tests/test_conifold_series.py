from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regulator_lab.conifold_series import (
    CONIFOLD,
    FAMILIES,
    LOG5,
    LaurentPoly2,
    _multinomial,
    _phi_parts,
    adjudicate_eq9,
    closed_form_coefficient,
    compare_series_identity,
    constant_term_power,
    default_radii,
    derived_coefficients,
    extrapolated_identity_report,
    geometric_tail_bound,
    identity_lhs,
    jensen_identity_report,
    kernel_solutions,
    laurent_phi,
    max_ratio,
    prefactor_exponent,
    series_sum,
    series_value,
    torus_log_integral,
    tube_integral,
    tube_real_part,
    verify_identity,
    weight_groups,
    x_from_z,
)
from regulator_lab.errors import BranchRisk, DomainError, MismatchDetail, NonConvergence, NonPowerOfTwoGrid
from regulator_lab.report import FAIL, INCONCLUSIVE, PASS

laurent = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
    st.dictionaries(st.integers(0, 2), st.integers(-3, 3), min_size=1, max_size=2),
    max_size=4,
).map(LaurentPoly2.from_dict)


def brute_constant_term(variant: str, n: int) -> dict[int, int]:
    """Constant term by repeated multiplication, one factor at a time."""
    phi = laurent_phi(variant)
    acc = LaurentPoly2.one()
    for _ in range(n):
        acc = acc * phi
    return acc.constant_term()


def test_constant_term_examples():
    assert constant_term_power("phi1", 0) == {0: 1}
    assert constant_term_power("phi1", 1) == {}
    assert constant_term_power("phi1", 3) == {1: 6}
    with pytest.raises(DomainError):
        constant_term_power("phi1", 201)
    with pytest.raises(DomainError):
        constant_term_power("phi3", 2)


@pytest.mark.parametrize("variant", ["phi1", "phi2"])
def test_constant_term_against_expansion(variant):
    for n in range(0, 14):
        assert constant_term_power(variant, n) == brute_constant_term(variant, n)


@pytest.mark.parametrize("variant,weights", [("phi1", (5, 3)), ("phi2", (5, 2))])
def test_constant_term_support(variant, weights):
    a, b = weights
    reachable = {a * m + b * r for m in range(13) for r in range(31)}
    for n in range(0, 61):
        ct = constant_term_power(variant, n)
        assert all(isinstance(v, int) and v > 0 for v in ct.values())
        assert bool(ct) == (n in reachable)


def test_multinomial_bijection():
    for m in range(7):
        for r in range(11):
            n = 5 * m + 3 * r
            if n == 0 or n > 30:
                continue
            f = math.factorial
            expected = f(n) // (f(2 * m + r) ** 2 * f(m) * f(r))
            assert constant_term_power("phi1", n).get(r, 0) == expected


def test_kernel_solutions_are_balanced():
    mons = FAMILIES[1].monomials
    for counts in kernel_solutions(mons, 13):
        assert sum(counts) == 13
        assert sum(c * e[0] for c, e in zip(counts, mons)) == 0
        assert sum(c * e[1] for c, e in zip(counts, mons)) == 0
    assert _multinomial((1, 1, 1, 0)) == 6


@given(laurent, laurent, laurent)
@settings(max_examples=60, deadline=None)
def test_laurent_ring_laws(a, b, c):
    assert (a * b).as_dict() == (b * a).as_dict()
    assert ((a * b) * c).as_dict() == (a * (b * c)).as_dict()
    assert (a * LaurentPoly2.one()).as_dict() == a.as_dict()
    assert (a ** 3).as_dict() == (a * a * a).as_dict()


def test_closed_form_examples():
    assert closed_form_coefficient("eq1C", 0, 1) == 2
    assert closed_form_coefficient("eq1C", 1, 0) == 6
    assert closed_form_coefficient("eq2C", 0, 1) == 1
    with pytest.raises(IndexError):
        closed_form_coefficient("eq1C", 0, 0)


def test_series_identity_first_cycle():
    assert compare_series_identity(1, 30).status == PASS


def test_series_identity_second_cycle_sign_mismatch():
    # the printed second closed form disagrees in sign with the constant terms
    with pytest.raises(MismatchDetail) as info:
        compare_series_identity(2, 30)
    assert (info.value.m, info.value.r) == (0, 1)
    derived = derived_coefficients(2, 30)
    for (m, r), c in derived.items():
        assert abs(c) == closed_form_coefficient("eq2C", m, r)
        assert c == (-1) ** m * closed_form_coefficient("eq2C", m, r)


def test_corrupted_coefficient_is_reported():
    def corrupted(m, r):
        base = (-1) ** (m + r) * closed_form_coefficient("eq1C", m, r)
        return base + 1 if (m, r) == (1, 2) else base

    with pytest.raises(MismatchDetail) as info:
        compare_series_identity(1, 30, corrupted)
    assert (info.value.m, info.value.r) == (1, 2)


def test_prefactor():
    assert prefactor_exponent(1) == Fraction(-1, 5)
    assert prefactor_exponent(2) == Fraction(-1, 5)
    z1, z2 = CONIFOLD.z1, CONIFOLD.z2
    assert Fraction(z1).limit_denominator(100) ** 2 * Fraction(z2).limit_denominator(100) == Fraction(1, 3125)
    assert abs(-0.2 * math.log(z1 * z1 * z2) - LOG5) < 1e-15


def test_x_from_z_round_trip():
    for variant in (1, 2):
        x0, x3 = x_from_z(variant, 0.01, 0.05)
        assert abs(x3 / x0 ** 3 - 0.01) < 1e-14
        assert abs(x0 / x3 ** 2 - 0.05) < 1e-14


def test_torus_integral_constant_only():
    assert torus_log_integral(2.5, [], (1.0, 1.0)) == pytest.approx(math.log(2.5), abs=0)


def test_torus_integral_single_monomial_has_zero_average():
    assert abs(torus_log_integral(3.0, [(1.0, (1, 0))], (1.0, 1.0), 64) - math.log(3.0)) < 1e-14


def test_grid_and_branch_errors():
    with pytest.raises(NonPowerOfTwoGrid):
        tube_integral(1, 0.01, 0.05, grid=100)
    with pytest.raises(BranchRisk):
        tube_integral(1, 0.01, 0.05, radii=(1.0, 1.0))


def test_tube_matches_series_first_cycle():
    tube = tube_integral(1, 0.01, 0.05)
    series = series_value("eq1C", 0.01, 0.05, 1e-13)
    assert abs(tube.real - series.real) < 1e-6
    k = round((tube - series).imag / (2 * math.pi / 5))
    assert abs((tube - series).imag - 2 * math.pi * k / 5) < 1e-6 and abs(k) <= 10


def test_tube_matches_constant_term_series_second_cycle():
    tube = tube_integral(2, 0.01, 0.05)
    assert abs(tube.real - series_value("eq2B", 0.01, 0.05, 1e-13).real) < 1e-6
    assert abs(tube.real - series_value("eq2C", 0.01, 0.05, 1e-13).real) > 1e-2


def test_tube_grid_doubling():
    assert abs(tube_integral(1, 0.01, 0.05, 256) - tube_integral(1, 0.01, 0.05, 512)) < 1e-10


def test_tube_radius_invariance():
    x0, x3 = x_from_z(1, 0.01, 0.05)
    const, monos = _phi_parts(1, x0, x3)
    a, b = default_radii(const, monos)
    values = []
    for fa, fb in ((1.0, 1.0), (1.15, 1.0), (1.0, 0.9), (0.9, 1.05)):
        radii = (a * fa, b * fb)
        if max_ratio(const, monos, radii, 128) < 0.95:
            values.append(tube_integral(1, 0.01, 0.05, 512, radii))
    assert len(values) >= 3
    assert max(abs(v - values[0]) for v in values) < 1e-9


def test_jensen_route_matches_trapezoid():
    x0, x3 = x_from_z(1, 0.01, 0.05)
    radii = default_radii(*_phi_parts(1, x0, x3))
    assert abs(tube_real_part(1, 0.01, 0.05, radii) - tube_integral(1, 0.01, 0.05).real) < 1e-9


def test_tail_bound_dominates_dropped_terms():
    full = weight_groups("eq1C", 0.01, 0.05, 400)
    for w in (60, 90, 150):
        bound = geometric_tail_bound(full, w)
        assert abs(math.fsum(full[w + 1:w + 11].tolist())) <= bound


def test_tail_bound_needs_history():
    groups = weight_groups("eq1C", 0.01, 0.05, 10)
    d = abs(math.fsum(groups[:7].tolist()) - math.fsum(groups[:6].tolist()))
    assert d <= geometric_tail_bound(groups, 5) == math.inf


def test_series_sum_converges_off_conifold():
    s = series_sum("eq1C", 0.01, 0.05, 1e-12)
    direct = math.fsum(weight_groups("eq1C", 0.01, 0.05, 200).tolist())
    assert abs(s.value - direct) < 1e-12 and s.tail_bound < 1e-12


def test_first_series_diverges_at_conifold():
    with pytest.raises(NonConvergence):
        series_sum("eq1C", CONIFOLD.z1, CONIFOLD.z2, 1e-12, 2000)


def test_identity_lhs_against_mpmath():
    mpmath.mp.dps = 30
    phi = (1 + mpmath.sqrt(5)) / 2
    for which, angle in (("eq9", 2 * mpmath.pi / 5), ("eq10", mpmath.pi / 5)):
        z = mpmath.expjpi(angle / mpmath.pi) * phi
        d2 = mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z))
        assert abs(identity_lhs(which) - float(5 / mpmath.pi * d2)) < 1e-14


def test_identity_reports():
    assert verify_identity("eq9", max_weight=2000).status == FAIL
    assert verify_identity("eq10").status == FAIL
    assert jensen_identity_report("eq9").status == PASS
    assert jensen_identity_report("eq10").status == PASS
    assert extrapolated_identity_report().status == PASS


def test_eq9_adjudication_names_variant():
    rep = adjudicate_eq9(max_weight=2000)
    assert rep.status == INCONCLUSIVE
    assert "consistent variant: eq1C" in rep.notes
