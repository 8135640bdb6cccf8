import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from discwindow.bessel import (
    BesselZero,
    Multiplicity,
    bessel_j,
    bessel_j_prime,
    bessel_zero,
    fold_order,
    mcmahon_estimate,
    zeros_below,
)


def series_bisection_root(n, lo, hi):
    """Oracle: bisection on the power series of J_n, in 40-digit arithmetic."""
    with mpmath.workdps(40):
        def j(x):
            x = mpmath.mpf(x)
            total, term, k = mpmath.mpf(0), (x / 2) ** n / mpmath.factorial(n), 0
            while abs(term) > mpmath.mpf(10) ** -45:
                total += term
                k += 1
                term *= -(x / 2) ** 2 / (k * (n + k))
            return total

        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        f_lo = j(lo)
        assert f_lo * j(hi) < 0
        for _ in range(140):
            mid = (lo + hi) / 2
            if j(mid) * f_lo > 0:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)


def sign_change_zeros(n, upper, step=1e-3):
    """Oracle: scan J_n (mpmath) for sign changes on (0, upper)."""
    out = []
    x = step
    prev = mpmath.besselj(n, x)
    while x < upper:
        nxt = mpmath.besselj(n, x + step)
        if prev * nxt < 0:
            out.append(float(mpmath.findroot(lambda t: mpmath.besselj(n, t), (x, x + step), solver="anderson")))
        prev = nxt
        x += step
    return out


def test_values_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(7, 0.0) == 0.0


def test_j0_root_from_series_bisection():
    root = series_bisection_root(0, 2, 3)
    assert root == pytest.approx(2.404825557695773, abs=1e-15)
    assert abs(bessel_j(0, 2.404825557695773)) <= 1e-12


@pytest.mark.parametrize("n, lo, hi, expected", [(0, 2, 3, 2.404825557695773), (1, 3, 4, 3.831705970207512)])
def test_first_zeros(n, lo, hi, expected):
    z = bessel_zero(n, 1)
    assert z.order == n and z.index == 1
    assert z.value == pytest.approx(series_bisection_root(n, lo, hi), abs=1e-12)
    assert z.value == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("bad", [(-1, 1.0), (0.5, 1.0), (0, -0.1)])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        bessel_j(*bad)


def test_zero_index_must_be_positive():
    with pytest.raises(ValueError):
        bessel_zero(0, 0)


def test_fold_order():
    assert fold_order(3) == (3, 1)
    assert fold_order(-3) == (3, -1)
    assert fold_order(-2) == (2, 1)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(0, 40), x=st.floats(0, 200, allow_nan=False))
def test_against_mpmath(n, x):
    assert abs(bessel_j(n, x) - float(mpmath.besselj(n, x))) <= 1e-13


@pytest.mark.parametrize("x", [0.3, 2.0, 4.5, 11.9, 12.1, 29.9, 30.1, 57.0, 199.0])
@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
def test_branch_boundaries(n, x):
    assert abs(bessel_j(n, x) - float(mpmath.besselj(n, x))) <= 1e-13


def test_derivative_matches_finite_difference():
    for n in range(4):
        for x in (0.7, 3.0, 9.5, 40.0):
            h = 1e-5
            fd = (bessel_j(n, x + h) - bessel_j(n, x - h)) / (2 * h)
            assert bessel_j_prime(n, x) == pytest.approx(fd, abs=1e-9)


def test_zeros_match_mpmath():
    for n in range(6):
        for l in range(1, 21):
            assert bessel_zero(n, l).value == pytest.approx(float(mpmath.besseljzero(n, l)), abs=1e-12)


def test_zero_residual_and_sign_flip():
    for n in range(6):
        for l in range(1, 21):
            x = bessel_zero(n, l).value
            assert abs(bessel_j(n, x)) <= 1e-12
            assert bessel_j(n, x - 1e-6) * bessel_j(n, x + 1e-6) < 0


def test_interlacing():
    for n in range(5):
        for l in range(1, 20):
            assert bessel_zero(n, l).value < bessel_zero(n + 1, l).value < bessel_zero(n, l + 1).value


def test_zeros_increase_with_index():
    for n in range(6):
        vals = [bessel_zero(n, l).value for l in range(1, 21)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_leading_asymptotic_deviation_decreases():
    for n in range(6):
        dev = [
            abs(bessel_zero(n, l).value - mcmahon_estimate(n, l, terms=1)) / bessel_zero(n, l).value
            for l in range(1, 21)
        ]
        assert all(b < a for a, b in zip(dev, dev[1:])), n


def test_leading_asymptotic_tends_to_zero():
    x = bessel_zero(0, 200).value
    assert abs(x - mcmahon_estimate(0, 200, terms=1)) / x < 1e-4


def test_bessel_zero_type_invariants():
    with pytest.raises(ValueError):
        BesselZero(-1.0, 0, 1)
    with pytest.raises(ValueError):
        BesselZero(1.0, -1, 1)


def test_zeros_below_empty():
    assert zeros_below(2.0) == []
    assert zeros_below(2.0, "degenerate") == []


def test_zeros_below_four_matches_scan():
    got = [z.value for z in zeros_below(4.0, "single")]
    scanned = sorted(x for n in range(3) for x in sign_change_zeros(n, 4.0))
    assert got == pytest.approx(scanned, abs=1e-10)
    assert got == pytest.approx([2.4048255577, 3.8317059702], abs=1e-9)


def test_zeros_below_ten_close_to_estimate():
    assert abs(len(zeros_below(10.0)) - 100 / math.pi**2) <= 2


def test_degenerate_rule_doubles_nonzero_orders():
    single = zeros_below(12.0, Multiplicity.SINGLE)
    double = zeros_below(12.0, Multiplicity.ANGULAR_DEGENERACY)
    assert len(double) == sum(2 if z.order else 1 for z in single)
    assert Multiplicity("angular_degeneracy") is Multiplicity.ANGULAR_DEGENERACY


def test_zeros_below_complete_and_sorted():
    bound = 15.0
    got = zeros_below(bound)
    assert [z.value for z in got] == sorted(z.value for z in got)
    expected = sorted(
        float(mpmath.besseljzero(n, l))
        for n in range(16)
        for l in range(1, 8)
        if float(mpmath.besseljzero(n, l)) < bound
    )
    assert [z.value for z in got] == pytest.approx(expected, abs=1e-12)


def test_count_ratio_at_thirty():
    ratio = len(zeros_below(30.0)) / (900 / math.pi**2)
    assert 0.8 <= ratio <= 1.2
