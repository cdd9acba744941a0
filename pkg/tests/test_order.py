import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import int_matrices

from toral_orbits.catmap import ARNOLD, FIBONACCI
from toral_orbits.errors import DimensionError, NotInvertibleError, PreconditionError
from toral_orbits.numtheory import crt_split, lcm
from toral_orbits.order import (
    CharPolyCoeffs,
    expand_power,
    invariants_2x2,
    is_finite_order,
    matrix_order,
    mgcd,
    naive_order,
    order_lift_profile,
    order_mod_prime_power,
    order_via_mgcd,
    power_coefficients,
    recursion_values,
    sequence_period,
)
from toral_orbits.ring import ResidueMatrix, int_det, int_matpow

FIB = CharPolyCoeffs(2, (1, 1))


def test_charpoly_coefficients():
    assert CharPolyCoeffs.from_matrix(ARNOLD).c == (3, -1)
    assert CharPolyCoeffs.from_matrix(FIBONACCI).c == (1, 1)
    c = CharPolyCoeffs.from_matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert c.c == (3, -3, 2)
    with pytest.raises(DimensionError):
        CharPolyCoeffs(2, (1,))


def test_recursion_values_fibonacci():
    assert recursion_values(FIB, None, 10).values == (0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55)
    assert recursion_values(FIB, 7, 10).values == tuple(x % 7 for x in (0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55))


def test_power_coefficients_examples():
    c = CharPolyCoeffs(3, (4, -5, 6))
    assert power_coefficients(c, 3) == (6, -5, 4)  # (c_3, c_2, c_1)
    u = recursion_values(FIB, None, 12).values
    for m in range(2, 12):
        assert power_coefficients(FIB, m) == (1 * u[m - 1], u[m])  # -D u_{m-1} with D = -1


@given(st.integers(2, 4).flatmap(lambda d: int_matrices(d, -4, 4)), st.integers(0, 40))
def test_gamma_expansion_three_routes(M, m):
    coeffs = CharPolyCoeffs.from_matrix(M)
    routes = {meth: power_coefficients(coeffs, m, meth) for meth in ("recursion", "u-sum", "u-tail")}
    assert len(set(routes.values())) == 1
    assert expand_power(M, m) == int_matpow(M, m)


def test_expand_power_d3_example():
    M = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert expand_power(M, 5) == int_matpow(M, 5)


def test_arnold_orders():
    assert [matrix_order(ResidueMatrix.of(ARNOLD, 2**r)) for r in range(1, 7)] == [3, 3, 6, 12, 24, 48]
    assert [matrix_order(ResidueMatrix.of(ARNOLD, 5**r)) for r in range(1, 5)] == [10, 50, 250, 1250]


def test_non_unit_has_order_zero():
    assert matrix_order(ResidueMatrix.of([[2, 0], [0, 1]], 4)) == 0
    assert naive_order(ResidueMatrix.of([[2, 0], [0, 1]], 4)) == 0


@given(st.integers(2, 3).flatmap(lambda d: int_matrices(d)), st.integers(2, 40))
def test_matrix_order_matches_naive(M, n):
    R = ResidueMatrix.of(M, n)
    assume(R.is_unit())
    assert matrix_order(R) == naive_order(R)


@given(int_matrices(2), st.integers(2, 400))
def test_crt_consistency(M, n):
    R = ResidueMatrix.of(M, n)
    assume(R.is_unit())
    assert matrix_order(R) == lcm(*(order_mod_prime_power(M, p, r) for p, r in crt_split(n)))


@given(int_matrices(2), st.sampled_from([2, 3, 5, 7]), st.integers(1, 4))
def test_divisibility_ladder(M, p, r):
    assume(int_det(M) % p)
    assert order_mod_prime_power(M, p, r + 1) % order_mod_prime_power(M, p, r) == 0


def test_plateau_profiles():
    prof = order_lift_profile(ARNOLD, 2, 6)
    assert (prof.s, prof.shape, prof.orders) == (2, "initial-plateau", (3, 3, 6, 12, 24, 48))
    prof = order_lift_profile(ARNOLD, 5, 4)
    assert (prof.s, prof.shape) == (1, "no-plateau")
    prof = order_lift_profile([[3, 2], [2, 1]], 2, 5)  # det -1, s = 1 at p = 2
    assert prof.shape in ("no-plateau", "p2-delayed") and prof.s == 1


@given(int_matrices(2, -9, 9), st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]))
def test_plateau_shapes_never_unexpected(M, p):
    assume(int_det(M) % p and not is_finite_order(M) and abs(M[0][0] + M[1][1]) > 2)
    prof = order_lift_profile(M, p, 5)
    assert prof.shape in ("no-plateau", "initial-plateau", "p2-delayed")


def test_profile_rejects_finite_order():
    with pytest.raises(PreconditionError):
        order_lift_profile([[0, -1], [1, 0]], 3, 3)
    assert is_finite_order([[0, -1], [1, 1]])
    assert not is_finite_order(ARNOLD)


def test_sequence_period_examples():
    assert sequence_period(FIB, 2) == 3
    assert sequence_period(FIB, 10) == 60
    assert sequence_period(CharPolyCoeffs(2, (3, -1)), 5) == 10
    with pytest.raises(NotInvertibleError):
        sequence_period(CharPolyCoeffs(2, (1, -2)), 4)


def test_mgcd_and_invariants():
    assert mgcd(ARNOLD) == 1
    assert mgcd([[5, 0], [0, 5]]) == 0
    inv = invariants_2x2([[3, 2], [4, 5]], 8)
    assert (inv.T, inv.D, inv.mgcd, inv.N_n) == (8, 7, 2, 4)


def test_order_via_mgcd_examples():
    assert order_via_mgcd(ARNOLD, 5) == 10
    assert order_via_mgcd([[2, 0], [0, 2]], 7) == 3
    M = [[3, 2], [4, 5]]
    assert order_via_mgcd(M, 8) == naive_order(ResidueMatrix.of(M, 8)) == sequence_period(CharPolyCoeffs(2, (8, -7)), 4)


def test_order_via_mgcd_scalar_at_period():
    # u vanishes mod N_n = 8 after 2 steps but M^2 is only a scalar (9) mod 16
    M = [[7, 4], [14, 1]]
    assert sequence_period(CharPolyCoeffs.from_matrix(M), 8) == 2
    assert order_via_mgcd(M, 16) == naive_order(ResidueMatrix.of(M, 16)) == 4


@given(int_matrices(2, -30, 30), st.integers(2, 100))
def test_order_via_mgcd_matches(M, n):
    assume(math.gcd(int_det(M), n) == 1)
    o = matrix_order(ResidueMatrix.of(M, n))
    assert order_via_mgcd(M, n) == o
    inv = invariants_2x2(M)
    assert sequence_period(CharPolyCoeffs(2, (inv.T, -inv.D)), n) % o == 0
