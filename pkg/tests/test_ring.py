import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import int_matrices, moduli

from toral_orbits import kernels
from toral_orbits.errors import DimensionError, MatrixParseError, ModulusMismatchError
from toral_orbits.ring import (
    LatticeSpec,
    ResidueMatrix,
    format_matrix,
    gl_order,
    image_size,
    int_det,
    int_matmul,
    kernel_generators,
    kernel_size,
    parse_matrix,
    reduce,
    smith_decomposition,
    smith_normal_form,
    span_points,
)


def brute_kernel(M: ResidueMatrix) -> int:
    pts = kernels.decode_indices(np.arange(M.spec.size), M.n, M.d)
    return int(np.all((pts @ M.array().T) % M.n == 0, axis=1).sum())


def brute_image(G, n) -> int:
    G = np.array(G, dtype=np.int64)
    k = G.shape[1]
    ys = kernels.decode_indices(np.arange(n**k), n, k)
    return len({tuple(r) for r in ((ys @ G.T) % n).tolist()})


def test_smith_examples():
    assert smith_normal_form([[4, 0], [1, 4]]).diagonal == (1, 16)
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == (2, 6, 12)
    assert smith_normal_form([[0, 0], [0, 0]]).diagonal == (0, 0)


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_smith_decomposition_identity(rows, cols, data):
    A = data.draw(
        st.lists(st.lists(st.integers(-30, 30), min_size=cols, max_size=cols), min_size=rows, max_size=rows)
    )
    S, U, V = smith_decomposition(A)
    assert [list(r) for r in int_matmul(int_matmul(U, A), V)] == S
    assert abs(int_det(U)) == 1 and abs(int_det(V)) == 1
    diag = [S[i][i] for i in range(min(rows, cols))]
    assert all(S[i][j] == 0 for i in range(rows) for j in range(cols) if i != j)
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz) and all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_kernel_size_examples():
    assert kernel_size(ResidueMatrix.of([[4, 4], [1, 4]], 8)) == 4
    assert kernel_size(ResidueMatrix.of([[0, 12], [1, 6]], 15)) == 3
    assert kernel_size(ResidueMatrix.of([[0, 0], [0, 0]], 7)) == 49
    assert kernel_size(ResidueMatrix.of([[2, 1], [1, 1]], 9)) == 1


@given(st.integers(1, 3).flatmap(lambda d: int_matrices(d)), st.integers(2, 12))
def test_kernel_size_matches_enumeration(A, n):
    M = ResidueMatrix.of(A, n)
    assume(M.spec.size <= 2000)
    assert kernel_size(M) == brute_kernel(M)


@given(int_matrices(2), moduli)
def test_kernel_generators_span_the_kernel(A, n):
    M = ResidueMatrix.of(A, n)
    pts = span_points(kernel_generators(M.entries, n), n, 2)
    assert len(pts) == kernel_size(M)
    assert not ((pts @ M.array().T) % n).any()


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=2, max_size=2), st.integers(2, 9))
def test_image_size_rectangular(G, n):
    assert image_size(G, n) == brute_image(G, n)


@given(int_matrices(2), moduli)
def test_image_times_kernel_is_lattice(A, n):
    M = ResidueMatrix.of(A, n)
    assert image_size(M.entries, n) * kernel_size(M) == n * n


def test_residue_arithmetic():
    A = ResidueMatrix.of([[2, 1], [1, 1]], 10)
    assert (A @ A).entries == ((5, 3), (3, 2))
    assert (A**-1 @ A).is_identity()
    assert (A + (-A)).is_zero()
    assert A.scale(3).entries == ((6, 3), (3, 3))
    assert (A**0).is_identity()
    assert A.det() == 1 and A.trace() == 3
    assert ResidueMatrix.scalar(4, 2, 10).is_scalar()
    assert A.apply((1, 2)) == (4, 3)


def test_inverse_is_none_for_non_units():
    assert ResidueMatrix.of([[2, 0], [0, 1]], 4).inverse() is None


@given(st.integers(2, 3).flatmap(lambda d: int_matrices(d)), moduli)
def test_inverse_roundtrip(A, n):
    M = ResidueMatrix.of(A, n)
    inv = M.inverse()
    assert (inv is not None) == M.is_unit()
    if inv is not None:
        assert (M @ inv).is_identity() and (inv @ M).is_identity()


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatchError):
        ResidueMatrix.of([[1, 0], [0, 1]], 5) @ ResidueMatrix.of([[1, 0], [0, 1]], 7)


def test_reduce_and_dimension_errors():
    M = reduce([[7, -1], [12, 5]], LatticeSpec(2, 5))
    assert M.entries == ((2, 4), (2, 0))
    with pytest.raises(DimensionError):
        reduce([[1, 2, 3]], LatticeSpec(2, 5))
    with pytest.raises(DimensionError):
        LatticeSpec(0, 5)


def test_gl_order():
    assert gl_order(2, 2) == 6
    assert gl_order(2, 12) == 4608
    for n in (2, 3, 4, 6):
        count = sum(
            1
            for e in itertools.product(range(n), repeat=4)
            if np.gcd((e[0] * e[3] - e[1] * e[2]) % n, n) == 1
        )
        assert gl_order(2, n) == count


def test_parse_and_format():
    assert parse_matrix(" 2, 1 ; 1 ,1") == ((2, 1), (1, 1))
    assert parse_matrix("-1,0;0,-1") == ((-1, 0), (0, -1))
    assert format_matrix(((2, 1), (1, 1))) == "2,1;1,1"


@pytest.mark.parametrize("text", ["", "1,2;3", "1,2,3;4,5,6", "a,b;c,d", "1,,2;3,4", "1--2,0;0,1"])
def test_parse_errors(text):
    with pytest.raises(MatrixParseError) as info:
        parse_matrix(text)
    assert info.value.position is not None
