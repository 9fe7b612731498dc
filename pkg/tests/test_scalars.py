"""Exact arithmetic kernel: Gaussian rationals, bivariate polynomials,
rational functions, and the gcd reduction behind RationalFn.reduced()."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from willmore.scalars import (
    BP_ONE,
    BP_ZERO,
    BiPoly,
    GaussianRational,
    RationalFn,
    rf_z,
    rf_zbar,
)

fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)

gaussians = st.builds(GaussianRational, fractions, fractions)

nonzero_gaussians = gaussians.filter(lambda g: not g.is_zero())


@st.composite
def bipolys(draw, max_terms=5, max_deg=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        dz = draw(st.integers(0, max_deg))
        db = draw(st.integers(0, max_deg))
        terms[(dz, db)] = draw(gaussians)
    return BiPoly(terms)


# -- Gaussian rationals ------------------------------------------------------


@given(gaussians, gaussians, gaussians)
@settings(deadline=None)
def test_gr_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(gaussians, nonzero_gaussians)
@settings(deadline=None)
def test_gr_field_inverse(a, b):
    assert (a / b) * b == a


@given(gaussians, gaussians)
@settings(deadline=None)
def test_gr_conjugation_is_multiplicative(a, b):
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert (a + b).conjugate() == a.conjugate() + b.conjugate()


@given(gaussians)
@settings(deadline=None)
def test_gr_abs_squared_matches_conjugate_product(a):
    n = a * a.conjugate()
    assert n.im == 0
    assert n.re == a.abs_squared()


def test_gr_coercion_and_literals():
    assert GaussianRational.coerce(3) == GaussianRational(3)
    assert GaussianRational.coerce(Fraction(1, 2)) == GaussianRational(Fraction(1, 2))
    assert GaussianRational.coerce(1j) == GaussianRational(0, 1)
    i = GaussianRational(0, 1)
    assert i * i == GaussianRational(-1)
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1) / GaussianRational(0)


@given(gaussians)
@settings(deadline=None)
def test_gr_complex_round_trip(a):
    z = a.to_complex()
    assert abs(z - complex(float(a.re), float(a.im))) == 0


# -- bivariate polynomials ---------------------------------------------------


@given(bipolys(), bipolys(), bipolys())
@settings(deadline=None)
def test_bipoly_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r


@given(bipolys(), bipolys())
@settings(deadline=None)
def test_bipoly_evaluation_is_a_homomorphism(p, q):
    z = GaussianRational(Fraction(1, 3), Fraction(-1, 2))
    w = GaussianRational(Fraction(2, 5), Fraction(1, 7))
    assert (p * q).evaluate_at(z, w) == p.evaluate_at(z, w) * q.evaluate_at(z, w)
    assert (p + q).evaluate_at(z, w) == p.evaluate_at(z, w) + q.evaluate_at(z, w)


@given(bipolys(), bipolys())
@settings(deadline=None)
def test_bipoly_derivative_product_rule(p, q):
    assert (p * q).d_dz() == p.d_dz() * q + p * q.d_dz()
    assert (p * q).d_dzbar() == p.d_dzbar() * q + p * q.d_dzbar()


@given(bipolys())
@settings(deadline=None)
def test_bipoly_mixed_partials_commute(p):
    assert p.d_dz().d_dzbar() == p.d_dzbar().d_dz()


@given(bipolys())
@settings(deadline=None)
def test_bipoly_conjugation_swaps_variables(p):
    # conj(sum c z^a zbar^b) = sum conj(c) z^b zbar^a
    assert p.conjugate().conjugate() == p
    assert p.conjugate().d_dz() == p.d_dzbar().conjugate()


@given(bipolys())
@settings(deadline=None)
def test_bipoly_integrate_then_differentiate(p):
    assert p.integrate_z().d_dz() == p


def test_bipoly_exact_evaluation_matches_float():
    z = BiPoly.var_z()
    zb = BiPoly.var_zbar()
    p = z * z * zb - zb * 3 + BiPoly.const(GaussianRational(0, Fraction(1, 2)))
    s = 0.25 + 0.5j
    exact = p.evaluate_exact(GaussianRational(Fraction(1, 4), Fraction(1, 2)))
    assert abs(exact.to_complex() - p.evaluate_float(s)) < 1e-15


def test_bipoly_degrees_and_leading_coefficient():
    z = BiPoly.var_z()
    zb = BiPoly.var_zbar()
    p = z ** 3 * zb + z * zb ** 2
    assert p.degrees() == (3, 2)
    assert p.min_degrees() == (1, 1)
    assert BP_ZERO.degrees() == (0, 0)
    assert BP_ONE.leading_coefficient() == GaussianRational(1)


# -- rational functions ------------------------------------------------------


@st.composite
def rationals(draw):
    num = draw(bipolys(max_terms=3, max_deg=2))
    den = draw(bipolys(max_terms=3, max_deg=2).filter(lambda p: not p.is_zero()))
    return RationalFn(num, den)


@given(rationals(), rationals(), rationals())
@settings(deadline=None, max_examples=40)
def test_rationalfn_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RationalFn(BP_ZERO)
    if not b.is_zero():
        assert (a / b) * b == a


@given(rationals(), rationals())
@settings(deadline=None, max_examples=40)
def test_rationalfn_quotient_rule(a, b):
    # (a/b)' = (a'b - ab')/b^2 follows from the product rule; check the
    # product rule itself on the stored quotient form.
    assert (a * b).d_dz() == a.d_dz() * b + a * b.d_dz()
    assert (a * b).d_dzbar() == a.d_dzbar() * b + a * b.d_dzbar()


@given(rationals())
@settings(deadline=None, max_examples=60)
def test_rationalfn_reduced_preserves_value(a):
    r = a.reduced()
    assert r == a
    # reduction never raises the degrees
    an, ad = a.num.degrees(), a.den.degrees()
    rn, rd = r.num.degrees(), r.den.degrees()
    assert rn <= an and rd <= ad


@given(bipolys(max_terms=3, max_deg=2),
       bipolys(max_terms=3, max_deg=2).filter(lambda p: not p.is_zero()),
       bipolys(max_terms=2, max_deg=2).filter(lambda p: not p.is_zero()))
@settings(deadline=None, max_examples=60)
def test_rationalfn_reduced_cancels_common_factor(num, den, common):
    blown = RationalFn(num * common, den * common)
    r = blown.reduced()
    assert r == RationalFn(num, den)
    # the common factor is fully cancelled: degrees come back down to
    # at most the reduced form of num/den itself
    base = RationalFn(num, den).reduced()
    assert r.num.degrees() == base.num.degrees()
    assert r.den.degrees() == base.den.degrees()


def test_rationalfn_known_reduction():
    z = BiPoly.var_z()
    zb = BiPoly.var_zbar()
    num = (z + zb) * (z - zb)
    den = (z + zb) * (z * zb + 1)
    r = RationalFn(num, den).reduced()
    assert r == RationalFn(z - zb, z * zb + 1)
    assert r.num.degrees() == (1, 1)


def test_rationalfn_denominator_vanishing_guard():
    from willmore.errors import DenominatorVanishes

    f = rf_z() / rf_zbar()
    with pytest.raises(DenominatorVanishes):
        f.evaluate(0.0)


def test_rationalfn_conjugate_evaluates_to_conjugate():
    f = (rf_z() * rf_z() + 1) / (rf_zbar() + 2)
    z = 0.3 - 0.7j
    assert abs(f.conjugate().evaluate(z) - f.evaluate(z).conjugate()) < 1e-15
