import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toral_orbits.numtheory import (
    INFINITY,
    crt_combine,
    crt_split,
    divisors,
    euler_phi,
    factorize,
    lcm,
    mobius,
    multiplicative_order,
    p_adic_valuation,
    parse_prime_power,
)


def test_crt_split_examples():
    assert crt_split(360) == [(2, 3), (3, 2), (5, 1)]
    assert crt_split(1) == []
    assert crt_split(97) == [(97, 1)]


@given(st.integers(1, 10**6))
def test_crt_split_multiplies_back(n):
    assert math.prod(p**r for p, r in crt_split(n)) == n


@given(st.integers(2, 5000), st.integers(0, 10**6))
def test_crt_roundtrip(n, x):
    x %= n
    parts = {p**r: x % p**r for p, r in crt_split(n)}
    assert crt_combine(parts) == x


def test_valuation():
    assert p_adic_valuation(48, 2) == 4
    assert p_adic_valuation(7, 3) == 0
    assert p_adic_valuation(0, 5) == INFINITY


def test_mobius_sum_over_divisors():
    for n in range(1, 200):
        assert sum(mobius(e) for e in divisors(n)) == (1 if n == 1 else 0)


def test_phi_and_order():
    assert euler_phi(36) == 12
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(5, 1) == 1
    with pytest.raises(ValueError):
        multiplicative_order(4, 8)


def test_lcm_and_factorize():
    assert lcm(4, 6, 10) == 60
    assert factorize(720) == {2: 4, 3: 2, 5: 1}


@pytest.mark.parametrize("text,expected", [("5^3", (5, 3)), ("7", (7, 1)), (" 2 ^ 4 ", (2, 4))])
def test_parse_prime_power(text, expected):
    assert parse_prime_power(text) == expected


@pytest.mark.parametrize("text", ["6^2", "5^0", "x", "3^-1"])
def test_parse_prime_power_rejects(text):
    with pytest.raises(ValueError):
        parse_prime_power(text)
