import random

import pytest
import sympy
from hypothesis import given, strategies as st

from expdio.certificates import Certificate, replay
from expdio.curves import (disc_in_lambda, disc_oracle, dls_certify, dls_criterion,
                           stickelberger_disc, trinomial_disc_poly)
from expdio.poly import Poly, discriminant, interpolate, poly_gcd, resultant, squarefree_part
from oracles import sylvester_resultant, sympy_poly

coeffs = st.lists(st.integers(-9, 9), min_size=1, max_size=7)


def _poly(cs, lead):
    return Poly(cs + [lead])


@given(coeffs, st.sampled_from([1, -2, 3]), coeffs, st.sampled_from([1, 2, -1]))
def test_resultant_matches_sylvester(a, la, b, lb):
    A, B = _poly(a, la), _poly(b, lb)
    assert resultant(A, B) == sylvester_resultant(A, B)


@given(coeffs, st.sampled_from([1, -2, 3]))
def test_discriminant_matches_sympy(a, la):
    A = _poly(a, la)
    if A.degree < 1:
        return
    expr, x = sympy_poly(A)
    assert discriminant(A) == sympy.discriminant(expr, x)


def test_resultant_argument_order_sign():
    # res(x - 7, x^3) = (-7)^3? no: res(f, g) = lc(f)^deg g prod g(roots of f) = 7^3
    assert resultant(Poly([-7, 1]), Poly([0, 0, 0, 1])) == 343
    assert resultant(Poly([0, 0, 0, 1]), Poly([-7, 1])) == -343


@given(coeffs, coeffs)
def test_gcd_degree_matches_sympy(a, b):
    A, B = _poly(a, 1), _poly(b, 1)
    ea, x = sympy_poly(A)
    eb, _ = sympy_poly(B)
    g = poly_gcd(A * B, A * A)
    assert g.degree == sympy.Poly(sympy.gcd(ea * eb, ea * ea), x).degree()


def test_squarefree_and_interpolate():
    f = Poly([1, 1]) ** 3 * Poly([-2, 1])
    assert squarefree_part(f) == Poly([-2, -1, 1])
    xs = [0, 1, 2, 3]
    assert interpolate(xs, [f(x) for x in xs]).degree <= 3


def test_small_discriminants():
    assert disc_oracle(Poly([1, 0, 1])) == -4
    assert disc_oracle(Poly([1, 0, -1, 0, 0, 0, 1])) == -33856
    assert disc_oracle(Poly([1, 0, 0, -1, 0, 1])) == 3017


def test_closed_forms():
    d = stickelberger_disc("b-side", y=6)
    lam = Poly([0, 1])
    assert d.poly == -lam * (216 * lam * lam - 32) ** 2 and d.matches_printed
    d = stickelberger_disc("c-side", z=5, r=3)
    assert d.poly == lam * lam * (3125 * lam * lam - 108) and d.matches_printed
    assert stickelberger_disc("b-side", y=10)(0) == 0 and d(0) == 0


def test_c_side_with_common_factor():
    d = stickelberger_disc("c-side", z=9, r=3)
    lam = Poly([0, 1])
    assert not d.matches_printed
    assert d.poly == lam * lam * (729 * lam * lam - 108) ** 3
    assert d.poly == disc_in_lambda(Poly([0, 0, 0, -1, 0, 0, 0, 0, 0, 1]))


@pytest.mark.parametrize("y", [6, 10, 14])
@pytest.mark.parametrize("z,r", [(5, 3), (7, 3), (7, 5), (9, 5)])
def test_formula_equals_oracle_polynomial(y, z, r):
    fb = Poly.monomial(y) - Poly.monomial(2)
    fc = Poly.monomial(z) - Poly.monomial(r)
    assert stickelberger_disc("b-side", y=y).poly == disc_in_lambda(fb)
    assert stickelberger_disc("c-side", z=z, r=r).poly == disc_in_lambda(fc)


@given(st.integers(3, 12), st.data())
def test_general_trinomial_formula(n, data):
    k = data.draw(st.integers(1, n - 1))
    a = data.draw(st.sampled_from([-2, -1, 1, 3]))
    lam = data.draw(st.integers(-3, 3))
    f = Poly.monomial(n) + Poly.monomial(k, a) + lam
    assert trinomial_disc_poly(n, k, a)(lam) == disc_oracle(f)


def test_dls_examples():
    cert = dls_certify(6, 5, 3)
    b = cert.orientations["b-as-f"]
    assert b.distinct_roots == 3 and b.qualifying == 2
    assert cert.verdict == "inconclusive"
    cert = dls_certify(10, 7, 3)
    assert cert.orientations["c-as-f"].verdict == "irreducible+positive-genus"
    assert cert.verdict == "irreducible+positive-genus"


def test_dls_m2_exception():
    D = Poly([0, 1]) * Poly([-1, 1]) * Poly([-2, 1])
    res = dls_criterion(D, Poly([1]), 3, 2)
    assert res.exception and res.verdict == "inconclusive"


def test_dls_certificates_replay():
    for y, z, r in ((6, 5, 3), (10, 7, 3), (14, 9, 5)):
        cert = dls_certify(y, z, r).certificate()
        assert replay(Certificate.from_json(cert.to_json()))
