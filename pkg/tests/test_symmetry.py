import itertools
import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import int_matrices

from toral_orbits.census import orbit_counts
from toral_orbits.errors import CapExceededError, NotInvertibleError, PreconditionError
from toral_orbits.order import mgcd
from toral_orbits.ring import ResidueMatrix, int_det
from toral_orbits.symmetry import (
    brute_force_conjugate,
    brute_force_reversible,
    brute_force_symmetries,
    build_reversor,
    classify_gl2_fp,
    conjugate_mod_n,
    gl2_conjugacy_classes,
    primitive_root_matrix,
    reversible_mod_n,
    scalar_cyclic_split,
    symmetry_group,
)

ARNOLD = ((2, 1), (1, 1))
BRW = ((4, 9), (7, 16))


def is_reversor(M, R, n):
    Mn, Rn = ResidueMatrix.of(M, n), ResidueMatrix.of(R.entries if hasattr(R, "entries") else R, n)
    return Rn.is_unit() and Rn @ Mn == Mn.inverse() @ Rn


def test_mgcd_examples():
    assert mgcd(ARNOLD) == 1 and mgcd(BRW) == 1 and mgcd([[3, 0], [0, 3]]) == 0


def test_conjugacy_examples():
    assert not conjugate_mod_n(ARNOLD, [[1, 1], [1, 0]], 5).verdict
    res = conjugate_mod_n(ARNOLD, ARNOLD, 12, witness=True)
    assert res.verdict and (res.witness @ ResidueMatrix.of(ARNOLD, 12)) == (ResidueMatrix.of(ARNOLD, 12) @ res.witness)
    inv = [[1, -1], [-1, 2]]
    for n in range(2, 20):
        assert conjugate_mod_n(ARNOLD, inv, n).verdict


@given(int_matrices(2, -6, 6), int_matrices(2, -6, 6), st.integers(2, 12))
def test_conjugacy_matches_brute_force(A, B, n):
    assume(math.gcd(int_det(A), n) == 1)
    res = conjugate_mod_n(A, B, n, witness=True)
    assert res.verdict == brute_force_conjugate(A, B, n)
    if res.verdict:
        P = res.witness
        assert P.is_unit() and P @ ResidueMatrix.of(B, n) == ResidueMatrix.of(A, n) @ P


@pytest.mark.parametrize("M,n", [(BRW, 7), (ARNOLD, 5), ([[3, 4], [2, 3]], 8), ([[3, 4], [2, 3]], 24), ([[1, 1], [0, 1]], 9)])
def test_build_reversor_examples(M, n):
    R = build_reversor(M, n)
    assert (R @ R).is_identity() and is_reversor(M, R, n)


def test_build_reversor_preconditions():
    with pytest.raises(PreconditionError):
        build_reversor([[2, 0], [0, 3]], 7)
    with pytest.raises(PreconditionError):
        build_reversor([[1, 0], [0, 1]], 7)


def sl2_from(a, b, k):
    """[[a, b], [c, d]] with ad - bc = 1, from the extended gcd of a and b."""
    x0, x1, y0, y1, u, v = 1, 0, 0, 1, a, b
    while v:
        q = u // v
        u, v, x0, x1, y0, y1 = v, u - q * v, x1, x0 - q * x1, y1, y0 - q * y1
    if u < 0:
        x0, y0 = -x0, -y0
    # a x0 + b y0 = 1, so d = x0, c = -y0
    return [[a, b], [-y0 + k * a, x0 + k * b]]


@given(st.integers(-15, 15), st.integers(-15, 15), st.integers(-3, 3), st.integers(2, 64))
def test_build_reversor_property(a, b, k, n):
    assume(math.gcd(a, b) == 1)
    M = sl2_from(a, b, k)
    assert int_det(M) == 1
    assume(mgcd(M) != 0)
    R = build_reversor(M, n)
    assert (R @ R).is_identity() and is_reversor(M, R, n)


def test_reversibility_table():
    M = [[0, -4], [1, 0]]
    expect = {3: True, 9: False, 15: True, 45: False, 5: True}
    for n, verdict in expect.items():
        rep = reversible_mod_n(M, n, exhaustive=True)
        assert rep.verdict is verdict and rep.exhaustive_check is verdict
        if verdict:
            assert is_reversor(M, rep.reversor, n)
    reasons = {pp.q: pp.reason for pp in reversible_mod_n(M, 45).per_prime_power}
    assert reasons == {9: "necessary-condition-failed", 5: "involution"}


def test_brw_matrix_reversible_everywhere():
    for n in range(2, 51):
        rep = reversible_mod_n(BRW, n)
        assert rep.verdict and is_reversor(BRW, rep.reversor, n)


def test_two_power_direct_witness():
    M = [[0, -3], [1, 0]]
    rep = reversible_mod_n(M, 8)
    assert rep.verdict and rep.per_prime_power[0].reason in ("direct-witness", "involution", "det=1")
    assert is_reversor(M, rep.reversor, 8)
    assert is_reversor(M, [[0, 1], [1, 0]], 8)


def test_reversibility_errors():
    with pytest.raises(NotInvertibleError):
        reversible_mod_n([[2, 0], [0, 1]], 4)
    with pytest.raises(CapExceededError):
        reversible_mod_n(ARNOLD, 40, exhaustive=True, max_group=1000)


@given(int_matrices(2, -9, 9), st.integers(2, 16))
def test_reversibility_matches_exhaustive_scan(A, n):
    assume(math.gcd(int_det(A), n) == 1)
    rep = reversible_mod_n(A, n, exhaustive=True)  # raises if the two routes disagree
    if rep.verdict:
        assert (int_det(A) ** 2 - 1) % n == 0
        assert is_reversor(A, rep.reversor, n)


def test_classify_examples():
    c = classify_gl2_fp(ARNOLD, 5)
    assert (c.class_tag, c.parameters["a"], c.reversible) == ("II", 4, True)
    assert c.orbit_data == ((2, 2), (10, 2))
    c = classify_gl2_fp([[1, 1], [1, 0]], 2)
    assert c.class_tag == "IV" and c.sym_order == 3 and c.reversible
    c = classify_gl2_fp([[2, 0], [0, 3]], 7)
    assert c.class_tag == "III" and not c.reversible and c.reversor is None
    with pytest.raises(NotInvertibleError):
        classify_gl2_fp([[1, 2], [2, 4]], 3)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_classification_exhaustive(p):
    for e in itertools.product(range(p), repeat=4):
        rows = (e[:2], e[2:])
        Mp = ResidueMatrix.of(rows, p)
        if not Mp.is_unit():
            continue
        c = classify_gl2_fp(rows, p)
        assert c.reversible == ((Mp @ Mp).is_identity() or Mp.det() == 1)
        if c.reversor is not None:
            assert (c.reversor @ c.reversor).is_identity() and is_reversor(rows, c.reversor, p)
        census = orbit_counts(Mp)
        nonzero = tuple((m, k - (m == 1)) for m, k in census.cycles if (m, k) != (1, 1))
        assert c.orbit_data == nonzero
        assert c.basis_change.inverse() @ Mp @ c.basis_change == c.normal_form


@pytest.mark.parametrize("p", [3, 5])
def test_class_sizes(p):
    classes = gl2_conjugacy_classes(p)
    sizes = sorted(len(c) for c in classes)
    assert sum(sizes) == p * (p - 1) ** 2 * (p + 1)
    expected = sorted([1] * (p - 1) + [p * p - 1] * (p - 1) + [p * p + p] * ((p - 1) * (p - 2) // 2)
                      + [p * p - p] * (p * (p - 1) // 2))
    assert sizes == expected


@pytest.mark.parametrize("p", [3, 5])
def test_brute_force_reversibility_law(p):
    for e in itertools.product(range(p), repeat=4):
        Mp = ResidueMatrix.of((e[:2], e[2:]), p)
        if Mp.is_unit():
            assert brute_force_reversible(Mp.entries, p) == ((Mp @ Mp).is_identity() or Mp.det() == 1)


def test_symmetry_group_examples():
    g = symmetry_group(ResidueMatrix.of([[4, 4], [1, 4]], 8))
    assert (g.order, g.invariant_factors, g.determinant_spectrum, g.det_one_invariant_factors) == (
        32, (8, 2, 2), (1, 5), (4, 2, 2))
    g = symmetry_group(ResidueMatrix.of([[1, 1], [1, 0]], 2))
    assert g.order == 3
    g = symmetry_group(ResidueMatrix.of([[0, 2], [1, 0]], 5))  # z^2 - 2 is irreducible mod 5
    assert g.order == 24 and g.method == "cyclic-algebra"
    g = symmetry_group(ResidueMatrix.of([[3, 0], [0, 3]], 7))
    assert g.order == 48 * 42 and g.method == "full-GL"


@given(int_matrices(2, -9, 9), st.integers(2, 10))
def test_symmetry_group_matches_brute_force(A, n):
    M = ResidueMatrix.of(A, n)
    g = symmetry_group(M)
    assert g.order == brute_force_symmetries(M)
    for G in g.generators:
        assert G @ M == M @ G
    if g.abelian:
        assert math.prod(g.invariant_factors) == g.order


def test_symmetry_cap():
    with pytest.raises(CapExceededError):
        symmetry_group(ResidueMatrix.of([[1, 2], [3, 4]], 12), max_group=100)


def test_primitive_roots():
    r = primitive_root_matrix([[1, 1], [1, 0]], 2)
    assert r.already_primitive and r.order_W == 3
    r = primitive_root_matrix([[0, 2], [1, 0]], 3)
    assert r.W.entries == ((1, 1), (2, 1)) and r.exponent == 2 and r.order_W == 8
    assert r.W**2 == ResidueMatrix.of([[0, 2], [1, 0]], 3)
    with pytest.raises(PreconditionError):
        primitive_root_matrix([[1, 0], [0, 2]], 3)


def test_scalar_cyclic_split():
    s = scalar_cyclic_split([[1, 3], [3, 4]], 3, 2)
    assert (s.ell, s.d_scalar, s.C, s.period_bound) == (1, 1, ((0, 1), (1, 1)), 3)
    assert s.max_period <= s.period_bound
    s = scalar_cyclic_split(ARNOLD, 3, 2)
    assert s.ell == 0 and s.C == ARNOLD
    s = scalar_cyclic_split([[5, 0], [0, 5]], 3, 2)
    assert s.ell == 2 and s.C is None


@given(int_matrices(2, -9, 9), st.sampled_from([3, 5, 7]), st.integers(1, 3))
def test_scalar_cyclic_reassembles(A, p, r):
    s = scalar_cyclic_split(A, p, r, verify=False)
    q = p**r
    if s.C is not None:
        rebuilt = [[s.d_scalar * (i == j) + p**s.ell * s.C[i][j] for j in range(2)] for i in range(2)]
        assert ResidueMatrix.of(rebuilt, q) == ResidueMatrix.of(A, q)
