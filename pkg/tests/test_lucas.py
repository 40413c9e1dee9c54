import math

import pytest
import sympy
from hypothesis import given, strategies as st

from expdio.certificates import Certificate, replay
from expdio.lucas import (LucasPair, coeff_valuation_bound, congruence_filters, lagrange_coeff,
                          lagrange_expand, lagrange_table, load_defective_table, lucas_term,
                          lucas_terms, p_valuation, prime_power_exclusion, primitive_divisor_report,
                          scan_defective)
from expdio.representations import Representation, witness_from

X, Y = sympy.symbols("X Y")


def test_coefficient_examples():
    assert lagrange_coeff(1, 0) == 1 and lagrange_coeff(2, 0) == 1
    assert lagrange_coeff(2, 1) == 2
    assert lagrange_coeff(5, 2) == 5
    assert lagrange_coeff(7, -1) == 0


@pytest.mark.parametrize("n", [2, 5, 9, 16])
def test_expansion_against_sympy(n):
    expr = sum(lagrange_coeff(n, j) * (-X * Y) ** j * (X + Y) ** (n - 2 * j) for j in range(n // 2 + 1))
    assert sympy.expand(expr - X ** n - Y ** n) == 0
    assert lagrange_expand(n)


def test_closed_form_vs_recurrence():
    table = lagrange_table(120)
    for (n, j), val in table.items():
        assert lagrange_coeff(n, j) == val


@given(st.integers(3, 200), st.data())
def test_valuation_bound(n, data):
    j = data.draw(st.integers(0, (n - 1) // 2))
    p = data.draw(st.sampled_from([3, 5, 7, 11, 13]))
    assert coeff_valuation_bound(n, j, p)


def test_valuation_examples():
    assert p_valuation(lagrange_coeff(9, 1), 3) == 2 and coeff_valuation_bound(9, 1, 3)
    assert coeff_valuation_bound(15, 7, 3)
    assert all(coeff_valuation_bound(n, 0, 5) for n in range(1, 60))


def test_lucas_terms_examples():
    assert lucas_term(LucasPair.lucas(2, 1), 3) == 11
    assert lucas_term(LucasPair.lucas(6, 7), 3) == 59
    assert lucas_term(LucasPair.lucas(6, 7), 1) == 1
    assert lucas_term(LucasPair.lucas(2, 1), 2) == 4          # alpha + beta = 2u


@given(st.integers(1, 60), st.integers(0, 60), st.integers(1, 40))
def test_witness_is_v_times_lucas_and_u_times_lehmer(u2, v2, k):
    u, v, r = 2 * u2, 2 * v2 + 1, 2 * k - 1
    if math.gcd(u, v) != 1:
        return
    w = witness_from(Representation(u * u + v * v, u, v), r)
    assert w.b == v * abs(lucas_term(LucasPair.lucas(u, v), r))
    assert w.a == u * abs(lucas_term(LucasPair.lehmer(u, v), r))


def test_lucas_terms_sequence_matches_single():
    pair = LucasPair.lehmer(6, 7)
    assert lucas_terms(pair, 12) == [lucas_term(pair, r) for r in range(1, 13)]


def test_primitive_divisor_u5():
    rep = primitive_divisor_report(LucasPair.lucas(2, 1), 5)
    assert rep.term == 41 and rep.primitive_primes == [41] and not rep.defective
    earlier = 4 * math.prod(abs(lucas_term(LucasPair.lucas(2, 1), k)) for k in range(1, 5))
    assert math.gcd(41, earlier) == 1


@given(st.integers(1, 200), st.integers(0, 200))
def test_index_31_never_defective(u2, v2):
    u, v = 2 * u2, 2 * v2 + 1
    if math.gcd(u, v) != 1:
        return
    for pair in (LucasPair.lucas(u, v), LucasPair.lehmer(u, v)):
        rep = primitive_divisor_report(pair, 31, factor_part=False)
        assert not rep.defective


def test_defective_table_regenerates():
    rows = [x for x in scan_defective(20000, 30) if x[3] >= 3]
    table = [(r["kind"], r["u"], r["v"], r["r"], r["term"]) for r in load_defective_table()]
    assert sorted(rows) == sorted(table)
    assert max(r[3] for r in rows) <= 30


def test_congruence_filter_examples():
    assert congruence_filters(Representation(15 ** 2 + 4, 2, 15), 7, 6).verdict == "reject"
    v = congruence_filters(Representation(27 ** 2 + 4, 2, 27), 3, 6)
    assert v.clauses[0].exempt and v.clauses[0].p == 3
    v = congruence_filters(Representation(3 ** 10 + 4, 2, 3 ** 5), 9, 34)
    assert v.c_lower_bounds[3] == 3 ** (34 - 4)
    assert v.identity_holds


@given(st.integers(1, 100), st.integers(1, 100), st.sampled_from([3, 5, 7, 9, 11]))
def test_congruence_identity_holds(u2, v2, z):
    u, v = 2 * u2, 2 * v2 + 1
    if math.gcd(u, v) != 1:
        return
    assert congruence_filters(Representation(u * u + v * v, u, v), z, 6).identity_holds is not False


def test_prime_power_examples():
    cert = prime_power_exclusion("c", Representation(125, 2, 11), 3)
    assert cert.verdict == "excluded"
    cert = prime_power_exclusion("a", Representation(5, 2, 1), 3)
    assert cert.verdict == "excluded"
    assert any("defective" in n for t in cert.trace if "notes" in t for n in t["notes"])
    # b = 9 = 3^2 with 3 | v: the instance breaks b = 3 (mod 4) and c >= 85
    cert = prime_power_exclusion("b", Representation(13, 2, 3), 3)
    assert cert.verdict == "excluded"
    viol = cert.trace[-1]["violations"]
    assert any("b = 9" in x for x in viol) and any("c = 13 < 85" in x for x in viol)


def test_prime_power_certificates_replay():
    for which, rep, r in (("c", Representation(125, 2, 11), 3), ("a", Representation(5, 2, 1), 3),
                          ("b", Representation(85, 6, 7), 5)):
        cert = prime_power_exclusion(which, rep, r)
        assert replay(Certificate.from_json(cert.to_json()))
