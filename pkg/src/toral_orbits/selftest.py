"""Quick cross-checks of every computation against an independent route."""

from __future__ import annotations

import itertools
import sys
from typing import Callable, TextIO

import numpy as np

from . import kernels
from .catmap import MAPS, catmap_closed_form
from .census import enumerate_functional_graph, orbit_counts
from .order import matrix_order, naive_order, order_via_mgcd
from .pretail import kernel_chain, pretail_tree
from .ring import ResidueMatrix, kernel_size
from .symmetry import build_reversor, classify_gl2_fp, reversible_mod_n


def _brute_kernel(M: ResidueMatrix) -> int:
    pts = kernels.decode_indices(np.arange(M.spec.size), M.n, M.d)
    return int(np.sum(np.all((pts @ M.array().T) % M.n == 0, axis=1)))


def _checks(max_points: int) -> list[tuple[str, Callable[[], bool]]]:
    rng = np.random.default_rng(20240601)
    samples = [
        ResidueMatrix.of(rng.integers(-20, 21, size=(2, 2)).tolist(), int(n)) for n in rng.integers(2, 25, size=25)
    ]

    def kernels_agree():
        return all(kernel_size(M) == _brute_kernel(M) for M in samples)

    def census_routes_agree():
        return all(
            orbit_counts(M) == enumerate_functional_graph(M, max_points).census
            for M in samples
            if M.spec.size <= max_points
        )

    def orders_agree():
        return all(
            matrix_order(M) == naive_order(M) == order_via_mgcd(M.entries, M.n) for M in samples if M.is_unit()
        )

    def walk_backends_agree():
        if "numba" not in kernels.BACKENDS or not kernels._accel.HAVE_NUMBA:
            return True
        for M in samples[:8]:
            succ = kernels.successor_map(M.entries, M.n)
            a = kernels.walk_functional_graph(succ, backend="numba")
            b = kernels.walk_functional_graph(succ, backend="numpy")
            if not all(np.array_equal(x, y) for x, y in zip(a, b)):
                return False
        return True

    def trees_consistent():
        for M in samples:
            chain = kernel_chain(M)
            tree = pretail_tree(M, max_points)
            if sum(tree.v) != chain.stable_size:
                return False
        return True

    def closed_forms():
        return all(
            catmap_closed_form(name, p, r).polynomial
            == enumerate_functional_graph(ResidueMatrix.of(MAPS[name], p**r), max_points).census.zeta()
            for name, p, r in itertools.product(MAPS, (2, 3, 5, 7), (1, 2))
        )

    def reversors():
        M = [[4, 9], [7, 16]]
        for n in range(2, 30):
            R = build_reversor(M, n)
            Mn = ResidueMatrix.of(M, n)
            if not (R @ R).is_identity() or R @ Mn != Mn.inverse() @ R:
                return False
        return True

    def gl2_law():
        p = 3
        for entries in itertools.product(range(p), repeat=4):
            rows = (entries[:2], entries[2:])
            Mp = ResidueMatrix.of(rows, p)
            if not Mp.is_unit():
                continue
            expected = (Mp @ Mp).is_identity() or Mp.det() == 1
            if classify_gl2_fp(rows, p).reversible != expected:
                return False
            if reversible_mod_n(rows, p, exhaustive=True).verdict != expected:
                return False
        return True

    return [
        ("kernel sizes: Smith form vs enumeration", kernels_agree),
        ("census: Moebius inversion vs enumeration", census_routes_agree),
        ("orders: lifting vs naive vs mgcd shortcut", orders_agree),
        ("functional-graph walk: numba vs numpy", walk_backends_agree),
        ("pretail tree levels vs kernel chain", trees_consistent),
        ("cat-map product formulas vs enumeration", closed_forms),
        ("involutory reversors mod n", reversors),
        ("GL(2,F_3) reversibility law", gl2_law),
    ]


def run_selftest(stream: TextIO = sys.stdout, max_points: int = 10**5) -> bool:
    ok = True
    for name, check in _checks(max_points):
        try:
            passed = bool(check())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}", file=stream)
    return ok
