"""Periodic-orbit census of M on (Z/nZ)^d.

Counts come from fixed-point numbers a_m = |ker(M^m - 1)| and Moebius
inversion; full enumeration of the functional graph is kept as an
independent route (and is what the pretail code builds on).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import kernels
from .errors import CapExceededError, InconsistencyError, PreconditionError
from .numtheory import divisors, lcm, mobius
from .ring import LatticeSpec, ResidueMatrix, kernel_size

DEFAULT_MAX_POINTS = 10**7


# --------------------------------------------------------------------------
# the cycle polynomial prod (1 - t^m)^{c_m}


@dataclass(frozen=True)
class CyclePolynomial:
    """Factored polynomial prod_m (1 - t^m)^{e_m}, kept as sorted (m, e_m) pairs."""

    factors: tuple[tuple[int, int], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "CyclePolynomial":
        merged: Counter[int] = Counter()
        for m, e in pairs:
            if m < 1 or e < 0:
                raise ValueError(f"bad factor (1-t^{m})^{e}")
            merged[m] += e
        return cls(tuple(sorted((m, e) for m, e in merged.items() if e)))

    _FACTOR = re.compile(r"\(1-t(?:\^(\d+))?\)(?:\^(\d+))?")

    @classmethod
    def parse(cls, text: str) -> "CyclePolynomial":
        text = text.replace(" ", "")
        pairs, pos = [], 0
        while pos < len(text):
            match = cls._FACTOR.match(text, pos)
            if not match:
                raise ValueError(f"cannot parse cycle polynomial at position {pos}: {text!r}")
            pairs.append((int(match.group(1) or 1), int(match.group(2) or 1)))
            pos = match.end()
        return cls.from_pairs(pairs)

    def __str__(self) -> str:
        parts = []
        for m, e in self.factors:
            base = "(1-t)" if m == 1 else f"(1-t^{m})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "".join(parts) if parts else "1"

    @property
    def degree(self) -> int:
        return sum(m * e for m, e in self.factors)

    def expand(self) -> list[int]:
        """Integer coefficients, constant term first."""
        coeffs = [1]
        for m, e in self.factors:
            for _ in range(e):
                nxt = coeffs + [0] * m
                for i, c in enumerate(coeffs):
                    nxt[i + m] -= c
                coeffs = nxt
        return coeffs


# --------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class OrbitCensus:
    spec: LatticeSpec
    cycles: tuple[tuple[int, int], ...]
    eventually_periodic_count: int

    def __post_init__(self):
        if self.periodic_count + self.eventually_periodic_count != self.spec.size:
            raise InconsistencyError("cycle points and pretail points do not fill the lattice")
        if not self.cycles or self.cycles[0][0] != 1:
            raise InconsistencyError("0 must be a fixed point")

    @property
    def periodic_count(self) -> int:
        return sum(m * c for m, c in self.cycles)

    @property
    def counts(self) -> dict[int, int]:
        return dict(self.cycles)

    @property
    def orbit_count(self) -> int:
        return sum(c for _, c in self.cycles)

    @property
    def period_lcm(self) -> int:
        return lcm(*(m for m, _ in self.cycles))

    def fixed_points(self, m: int) -> int:
        """a_m rebuilt from the census: sum over e | m of e * c_e."""
        return sum(e * c for e, c in self.cycles if m % e == 0)

    def zeta(self) -> CyclePolynomial:
        return CyclePolynomial.from_pairs(self.cycles)


def zeta_polynomial(census: OrbitCensus) -> CyclePolynomial:
    return census.zeta()


def fixed_point_count(M: ResidueMatrix, m: int) -> int:
    """a_m = |ker(M^m - 1)|."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return kernel_size(M**m - ResidueMatrix.identity(M.d, M.n))


def mobius_invert(a: dict[int, int], k: int) -> dict[int, int]:
    """c_m = (1/m) sum_{e | m} mu(m/e) a_e for every m | k (zero counts dropped)."""
    counts = {}
    for m in divisors(k):
        total = sum(mobius(m // e) * a[e] for e in divisors(m))
        c, rest = divmod(total, m)
        if rest:
            raise InconsistencyError(f"Moebius sum {total} for m = {m} is not divisible by {m}")
        if c < 0:
            raise InconsistencyError(f"negative orbit count for m = {m}")
        if c:
            counts[m] = c
    return counts


def periodic_exponent(M: ResidueMatrix) -> int:
    """A multiple of every cycle length of M (the order on the periodic part)."""
    from .order import matrix_order

    if M.is_unit():
        return matrix_order(M)
    from .pretail import periodic_order

    return periodic_order(M)


def orbit_counts(M: ResidueMatrix, m_max: int | None = None) -> OrbitCensus:
    """Census by Moebius inversion of a_e over the divisors e of ``m_max``.

    ``m_max`` must be a multiple of every cycle length; by default it is the
    order of M on its periodic part. A wrong value is caught because a_{m_max}
    must then count every periodic point.
    """
    k = m_max if m_max is not None else periodic_exponent(M)
    if k < 1:
        raise ValueError("m_max must be positive")
    ident = ResidueMatrix.identity(M.d, M.n)
    a = {e: kernel_size(M**e - ident) for e in divisors(k)}
    stable = kernel_size(M ** (M.d * max(1, M.n.bit_length())))  # ker(M^j) for j past stabilisation
    periodic = M.spec.size // stable
    if a[k] != periodic:
        raise PreconditionError(f"{k} is not a multiple of every cycle length")
    counts = mobius_invert(a, k)
    return OrbitCensus(M.spec, tuple(sorted(counts.items())), M.spec.size - periodic)


# --------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class FunctionalGraph:
    """Every lattice point with its successor, cycle length and pretail depth."""

    matrix: ResidueMatrix
    succ: np.ndarray = field(repr=False)
    period: np.ndarray = field(repr=False)
    depth: np.ndarray = field(repr=False)
    anchor: np.ndarray = field(repr=False)
    cycle_id: np.ndarray = field(repr=False)
    census: OrbitCensus

    @property
    def m(self) -> int:
        """Longest pretail length."""
        return int(self.depth.max())

    @property
    def k(self) -> int:
        return self.census.period_lcm

    @property
    def pretail_count(self) -> int:
        return self.census.eventually_periodic_count

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.succ, kind="stable")
        starts = np.searchsorted(self.succ[order], np.arange(self.succ.size + 1))
        return order, starts

    def predecessors(self, idx: int) -> np.ndarray:
        """Indices x with Mx = idx, in increasing order."""
        order, starts = self._csr
        return order[starts[idx] : starts[idx + 1]]

    def points(self, idx) -> np.ndarray:
        return kernels.decode_indices(np.atleast_1d(idx), self.matrix.n, self.matrix.d)


def enumerate_functional_graph(
    M: ResidueMatrix, max_points: int = DEFAULT_MAX_POINTS, backend: str | None = None
) -> FunctionalGraph:
    size = M.spec.size
    if size > max_points:
        raise CapExceededError("enumerating the lattice", size, max_points)
    succ = kernels.successor_map(M.entries, M.n)
    period, depth, anchor, cycle_id = kernels.walk_functional_graph(succ, backend=backend)
    cyc = depth == 0
    lengths = period[cyc]
    # each cycle of length m contributes m periodic points
    per_length = np.bincount(lengths)
    cycles = tuple((int(m), int(c) // int(m)) for m, c in enumerate(per_length) if c)
    census = OrbitCensus(M.spec, cycles, int(size - cyc.sum()))
    return FunctionalGraph(M, succ, period, depth, anchor, cycle_id, census)
