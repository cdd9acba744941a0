import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import int_matrices

from toral_orbits.census import (
    CyclePolynomial,
    OrbitCensus,
    enumerate_functional_graph,
    fixed_point_count,
    mobius_invert,
    orbit_counts,
)
from toral_orbits.errors import CapExceededError, InconsistencyError, PreconditionError
from toral_orbits.numtheory import divisors
from toral_orbits.ring import LatticeSpec, ResidueMatrix


def test_polynomial_format_and_parse():
    poly = CyclePolynomial.from_pairs([(2, 1), (1, 1), (2, 1), (4, 5)])
    assert str(poly) == "(1-t)(1-t^2)^2(1-t^4)^5"
    assert CyclePolynomial.parse(str(poly)) == poly
    assert poly.degree == 1 + 4 + 20
    assert str(CyclePolynomial.from_pairs([])) == "1"
    with pytest.raises(ValueError):
        CyclePolynomial.parse("(1+t)")


def test_polynomial_expand():
    assert CyclePolynomial.from_pairs([(1, 2)]).expand() == [1, -2, 1]
    assert CyclePolynomial.from_pairs([(1, 1), (2, 1)]).expand() == [1, -1, -1, 1]


def test_census_figure_two():
    c = orbit_counts(ResidueMatrix.of([[0, 12], [1, 6]], 15))
    assert c.cycles == ((1, 1), (2, 2), (4, 5))
    assert c.eventually_periodic_count == 200
    assert str(c.zeta()) == "(1-t)(1-t^2)^2(1-t^4)^5"


def test_census_figure_one():
    c = orbit_counts(ResidueMatrix.of([[4, 0], [1, 4]], 6))
    assert c.cycles == ((1, 3), (3, 2))
    assert c.eventually_periodic_count == 27


def test_nilpotent_census():
    c = orbit_counts(ResidueMatrix.of([[4, 4], [1, 4]], 8))
    assert c.cycles == ((1, 1),) and c.eventually_periodic_count == 63


def test_fixed_points_from_census():
    M = ResidueMatrix.of([[2, 1], [1, 1]], 12)
    c = orbit_counts(M)
    for m in range(1, 30):
        assert c.fixed_points(m) == fixed_point_count(M, m)


def test_m_max_must_cover_cycle_lengths():
    M = ResidueMatrix.of([[2, 1], [1, 1]], 5)  # order 10
    assert orbit_counts(M, 20).cycles == orbit_counts(M).cycles
    with pytest.raises(PreconditionError):
        orbit_counts(M, 5)


def test_census_validation():
    with pytest.raises(InconsistencyError):
        OrbitCensus(LatticeSpec(2, 3), ((1, 1), (2, 3)), 0)
    with pytest.raises(InconsistencyError):
        mobius_invert({1: 2, 2: 3}, 2)


@given(st.integers(1, 3).flatmap(lambda d: int_matrices(d)), st.integers(2, 16))
def test_census_routes_agree(A, n):
    M = ResidueMatrix.of(A, n)
    assume(M.spec.size <= 5000)
    assert orbit_counts(M) == enumerate_functional_graph(M).census


@given(st.dictionaries(st.integers(1, 24), st.integers(0, 30), min_size=1))
def test_mobius_roundtrip(counts):
    counts = {m: c for m, c in counts.items() if c}
    assume(counts)
    k = int(np.lcm.reduce(list(counts)))
    a = {e: sum(m * c for m, c in counts.items() if e % m == 0) for e in divisors(k)}
    assert mobius_invert(a, k) == counts


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_functional_graph_structure(backend):
    M = ResidueMatrix.of([[4, 0], [1, 4]], 6)
    g = enumerate_functional_graph(M, backend=backend)
    assert g.m == 2 and g.k == 3 and g.pretail_count == 27
    # every point maps along its successor; predecessors invert that
    for idx in range(36):
        assert idx in g.predecessors(int(g.succ[idx])).tolist()
    assert g.points(0).tolist() == [[0, 0]]


def test_enumeration_cap():
    with pytest.raises(CapExceededError) as info:
        enumerate_functional_graph(ResidueMatrix.of([[1, 1], [0, 1]], 100), max_points=50)
    assert info.value.required == 10000 and "at least 10000" in str(info.value)
