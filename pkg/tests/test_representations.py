import math

import pytest
import sympy
from hypothesis import given, strategies as st

from expdio.representations import (FactorLimitExceeded, Representation, brute_force_representations,
                                    brute_force_single, cornacchia_all, decompose, factor, is_prime,
                                    residue_class_filter, witness_from)
from conftest import C0


def test_factor_small_cases():
    assert factor(85).factors == ((5, 1), (17, 1))
    assert factor(2 ** 6).factors == ((2, 6),)


def test_factor_c0_against_sympy():
    assert dict(factor(C0).factors) == sympy.factorint(C0)


@given(st.integers(2, 10 ** 24))
def test_factor_matches_sympy(n):
    assert dict(factor(n).factors) == sympy.factorint(n)


@given(st.integers(2, 10 ** 12))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_factor_effort_exceeded():
    p, q = 1000000000000000003, 1000000000000000009   # two 60-bit primes
    with pytest.raises(FactorLimitExceeded):
        factor(p * q, effort=10)


def test_decompose_examples():
    assert [(r.u, r.v) for r in decompose(85)] == [(2, 9), (6, 7)]
    assert [(r.u, r.v) for r in decompose(5)] == [(2, 1)]
    assert decompose(21) == []
    assert brute_force_single(21) == []


def test_cornacchia_matches_brute_force_to_20000():
    table = brute_force_representations(20000)
    for c in range(5, 20001, 4):
        assert [(r.u, r.v) for r in cornacchia_all(c)] == table.get(c, []), c


@given(st.integers(1, 10 ** 7).map(lambda k: 4 * k + 1))
def test_cornacchia_matches_single_brute_force(c):
    assert [(r.u, r.v) for r in cornacchia_all(c)] == brute_force_single(c)


@given(st.integers(10 ** 12, 10 ** 18))
def test_representations_are_valid(c):
    for r in cornacchia_all(c):
        assert r.u * r.u + r.v * r.v == c and r.u % 2 == 0 and r.v % 2 == 1
        assert math.gcd(r.u, r.v) == 1


def test_representation_invariants():
    with pytest.raises(ValueError):
        Representation(85, 9, 2)          # u must be even
    with pytest.raises(ValueError):
        Representation(90, 3, 9)
    with pytest.raises(ValueError):
        Representation(86, 2, 9)


def test_witness_examples():
    w = witness_from(Representation(5, 2, 1), 3)
    assert (w.a, w.b) == (2, 11) and w.check()
    w = witness_from(Representation(5, 2, 1), 1)
    assert (w.a, w.b) == (2, 1)
    w = witness_from(Representation(85, 6, 7), 3)
    assert (w.a, w.b) == (666, 413) and w.a ** 2 + w.b ** 2 == 614125


@given(st.integers(1, 300), st.integers(0, 300), st.integers(0, 24))
def test_witness_identity(u2, v2, k):
    u, v = 2 * u2, 2 * v2 + 1
    if math.gcd(u, v) != 1:
        return
    w = witness_from(Representation(u * u + v * v, u, v), 2 * k + 1)
    assert w.check() and w.a % 2 == 0 and w.b % 2 == 1


def test_residue_filter():
    assert residue_class_filter(85).passes
    assert not residue_class_filter(5).passes
    assert not residue_class_filter(125).passes
    assert "c is a prime power" in residue_class_filter(125).reasons
    assert not residue_class_filter(89).passes         # 89 = 1 (mod 8)
