"""Pretails: kernel chains, the periodic/nilpotent splitting, and the tree at 0.

The tree at 0 lives on the stable kernel K = ker(M^m): every point of K
points to its image, and 0 is the root. Isomorphic copies of this tree hang
off every periodic point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .census import DEFAULT_MAX_POINTS, FunctionalGraph, enumerate_functional_graph
from .errors import CapExceededError, InconsistencyError, PreconditionError
from .numtheory import crt_split, lcm
from .order import order_mod_prime_power
from .ring import (
    IntRows,
    LatticeSpec,
    ResidueMatrix,
    as_int_rows,
    image_size,
    int_identity,
    int_matmul,
    int_matpow,
    kernel_generators,
    kernel_size,
    smith_decomposition,
    span_points,
)


# --------------------------------------------------------------------------
# kernel chain and the direct sum Mper + ker(M^m)


@dataclass(frozen=True)
class KernelChain:
    sizes: tuple[int, ...]  # |ker(M^j)| for j = 0..m_stable
    m_stable: int

    @property
    def stable_size(self) -> int:
        return self.sizes[-1]

    def size(self, j: int) -> int:
        return self.sizes[min(j, self.m_stable)]


def kernel_chain(M: ResidueMatrix) -> KernelChain:
    sizes = [1]
    P = ResidueMatrix.identity(M.d, M.n)
    while True:
        P = P @ M
        s = kernel_size(P)
        if s == sizes[-1]:
            break
        if s < sizes[-1] or s % sizes[-1]:
            raise InconsistencyError(f"kernel sizes {sizes + [s]} do not form a chain")
        sizes.append(s)
    return KernelChain(tuple(sizes), len(sizes) - 1)


@dataclass(frozen=True)
class PeriodicDecomposition:
    spec: LatticeSpec
    m: int  # longest pretail
    k: int  # lcm of cycle lengths
    mper_size: int
    kernel_size: int
    mper_generators: tuple[tuple[int, ...], ...]
    kernel_generators: tuple[tuple[int, ...], ...]
    mper_points: np.ndarray | None = field(default=None, repr=False)
    kernel_points: np.ndarray | None = field(default=None, repr=False)


def periodic_decomposition(
    M: ResidueMatrix, with_points: bool = False, max_points: int = DEFAULT_MAX_POINTS
) -> PeriodicDecomposition:
    """Split (Z/nZ)^d = Mper + ker(M^m) with Mper = M^m (Z/nZ)^d."""
    chain = kernel_chain(M)
    m = chain.m_stable
    Pm = M**m
    n, d = M.n, M.d
    mper_gens = tuple(tuple(Pm.entries[i][j] for i in range(d)) for j in range(d))
    ker_gens = tuple(kernel_generators(Pm.entries, n))
    mper_size = image_size(Pm.entries, n)
    ksize = chain.stable_size
    if mper_size * ksize != M.spec.size:
        raise InconsistencyError("|Mper| * |ker(M^m)| differs from n^d")
    # |Mper + K| = |Mper| |K| / |Mper cap K|, so a full sum means a trivial intersection
    both = [list(col) for col in zip(*(mper_gens + ker_gens))] if (mper_gens + ker_gens) else [[0] * d]
    if image_size(both, n) != M.spec.size:
        raise InconsistencyError("Mper and ker(M^m) intersect nontrivially")
    k = periodic_order(M)
    mper_pts = ker_pts = None
    if with_points:
        if max(mper_size, ksize) > max_points:
            raise CapExceededError("listing Mper and ker(M^m)", max(mper_size, ksize), max_points)
        mper_pts = span_points(mper_gens, n, d)
        ker_pts = span_points(ker_gens, n, d)
    return PeriodicDecomposition(M.spec, m, k, mper_size, ksize, mper_gens, ker_gens, mper_pts, ker_pts)


# --------------------------------------------------------------------------
# block diagonal form over Z/p^r


@dataclass(frozen=True)
class BlockDecomposition:
    p: int
    r: int
    d_prime: int
    basis_change: ResidueMatrix
    A: IntRows  # invertible block on Mper
    B: IntRows  # nilpotent block on the stable kernel
    nil_degree: int

    @property
    def mper_size(self) -> int:
        return self.p ** (self.r * self.d_prime)


def _nil_degree(B: IntRows, q: int) -> int:
    if not B:
        return 0
    P = tuple(tuple(x % q for x in row) for row in int_identity(len(B)))
    s = 0
    while any(any(row) for row in P):
        P = int_matmul(P, B, q)
        s += 1
        if s > len(B) * q.bit_length() + 1:
            raise InconsistencyError("kernel block is not nilpotent")
    return s


def block_decompose(M, p: int, r: int, _check_rank: bool = True) -> BlockDecomposition:
    """Conjugate M over Z/p^r into diag(A, B), A invertible and B nilpotent.

    With U X V = S the Smith form of X = M^m, the columns of U^{-1} whose
    invariant is a unit span Mper and the columns of V whose invariant is
    divisible by p^r span the stable kernel.
    """
    rows = as_int_rows(M)
    d = len(rows)
    q = p**r
    Mq = ResidueMatrix.of(rows, q)
    m = kernel_chain(Mq).m_stable
    X = int_matpow(rows, m, q)
    S, U, V = smith_decomposition(X)
    diag = [S[i][i] % q for i in range(d)]
    unit = [i for i in range(d) if diag[i] % p]
    null = [i for i in range(d) if diag[i] == 0]
    if len(unit) + len(null) != d:
        raise InconsistencyError(f"Mper is not free over Z/{q}: Smith invariants {diag}")
    d_prime = len(unit)
    if d_prime in (0, d):
        P = ResidueMatrix.identity(d, q)
    else:
        Uinv = ResidueMatrix.of(U, q).inverse()
        if Uinv is None:
            raise InconsistencyError("Smith transform is not unimodular")
        cols = [[Uinv.entries[k][i] for k in range(d)] for i in unit]
        cols += [[V[k][i] % q for k in range(d)] for i in null]
        P = ResidueMatrix.of([list(x) for x in zip(*cols)], q)
    Pinv = P.inverse()
    if Pinv is None:
        raise InconsistencyError("assembled basis of Mper + kernel is not a unit")
    C = (Pinv @ Mq @ P).entries
    if any(C[i][j] for i in range(d_prime) for j in range(d_prime, d)) or any(
        C[i][j] for i in range(d_prime, d) for j in range(d_prime)
    ):
        raise InconsistencyError("conjugated matrix is not block diagonal")
    A = tuple(tuple(C[i][j] for j in range(d_prime)) for i in range(d_prime))
    B = tuple(tuple(C[i][j] for j in range(d_prime, d)) for i in range(d_prime, d))
    if A and math.gcd(ResidueMatrix.of(A, q).det(), p) != 1:
        raise InconsistencyError("periodic block is not invertible")
    if _check_rank and r > 1 and block_decompose(rows, p, 1, _check_rank=False).d_prime != d_prime:
        raise InconsistencyError("rank of Mper changes with r")
    return BlockDecomposition(p, r, d_prime, P, A, B, _nil_degree(B, q))


def periodic_order(M: ResidueMatrix) -> int:
    """lcm of all cycle lengths: the order of M on Mper, assembled over prime powers."""
    orders = [1]
    for p, r in crt_split(M.n):
        blocks = block_decompose(M.entries, p, r)
        if blocks.d_prime:
            orders.append(order_mod_prime_power(blocks.A, p, r))
    return lcm(*orders)


# --------------------------------------------------------------------------
# the pretail tree at 0


@dataclass(frozen=True)
class PretailTree:
    spec: LatticeSpec
    nodes: np.ndarray = field(repr=False)  # (N, d) points of ker(M^m), lexicographic
    parent: np.ndarray = field(repr=False)  # row index of Mx, -1 for the root
    level: np.ndarray = field(repr=False)
    v: tuple[int, ...]
    w: tuple[int, ...]
    height: int

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> int:
        return int(np.flatnonzero(self.level == 0)[0])

    def children(self) -> list[list[int]]:
        """Children of each node, in lexicographic order of coordinates."""
        out: list[list[int]] = [[] for _ in range(self.size)]
        for i, par in enumerate(self.parent.tolist()):
            if par >= 0:
                out[par].append(i)
        return out

    def canonical_code(self) -> str:
        return _ahu_code(self.children(), self.root, self.level)


def _ahu_code(children: Sequence[Sequence[int]], root: int, level: np.ndarray) -> str:
    """Sorted nested-parenthesis code; equal codes iff isomorphic rooted trees."""
    code: dict[int, str] = {}
    for node in sorted(range(len(children)), key=lambda i: -int(level[i])):
        code[node] = "(" + "".join(sorted(code[c] for c in children[node])) + ")"
    return code[root]


def _tree_from_points(M: ResidueMatrix, pts: np.ndarray) -> PretailTree:
    n = M.n
    idx = kernels.encode_points(pts, n)
    order = np.argsort(idx)
    pts, idx = pts[order], idx[order]
    images = (pts @ np.asarray(M.entries, dtype=np.int64).T) % n
    img_idx = kernels.encode_points(images, n)
    parent = np.searchsorted(idx, img_idx)
    if np.any(parent >= len(idx)) or np.any(idx[np.minimum(parent, len(idx) - 1)] != img_idx):
        raise InconsistencyError("stable kernel is not closed under M")
    root = int(np.searchsorted(idx, 0))
    parent[root] = -1
    level = np.full(len(idx), -1, dtype=np.int64)
    level[root] = 0
    depth = 0
    while np.any(level < 0):
        fresh = (level < 0) & (parent >= 0)
        fresh &= level[np.maximum(parent, 0)] == depth
        if not fresh.any():
            raise InconsistencyError("stable kernel contains a point that never reaches 0")
        depth += 1
        level[fresh] = depth
    height = int(level.max())
    v = np.bincount(level, minlength=height + 1)
    has_child = np.zeros(len(idx), dtype=bool)
    has_child[parent[parent >= 0]] = True
    w = np.bincount(level[has_child], minlength=height + 1) if has_child.any() else np.zeros(height + 1, int)
    return PretailTree(M.spec, pts, parent, level, tuple(int(x) for x in v), tuple(int(x) for x in w), height)


def pretail_tree(M: ResidueMatrix, max_points: int = DEFAULT_MAX_POINTS) -> PretailTree:
    chain = kernel_chain(M)
    if chain.stable_size > max_points:
        raise CapExceededError("building the pretail tree", chain.stable_size, max_points)
    gens = kernel_generators((M**chain.m_stable).entries, M.n)
    pts = span_points(gens, M.n, M.d, cap=max_points)
    if len(pts) != chain.stable_size:
        raise InconsistencyError("enumerated stable kernel has the wrong size")
    tree = _tree_from_points(M, pts)
    check_tree_equations(tree, chain, kernel_size(M))
    return tree


def check_tree_equations(tree: PretailTree, chain: KernelChain, ker1: int) -> None:
    """Verify the level/kernel identities; raise InconsistencyError on any mismatch."""
    v, w = tree.v, tree.w
    for j in range(tree.height + 2):
        if sum(v[: j + 1]) != chain.size(j):
            raise InconsistencyError(f"sum of v_0..v_{j} differs from |ker(M^{j})|")
        if j >= 1:
            vj = v[j] if j < len(v) else 0
            if vj != chain.size(j) - chain.size(j - 1):
                raise InconsistencyError(f"v_{j} differs from the kernel increment")
    w_at = lambda i: w[i] if i < len(w) else 0  # noqa: E731
    v_at = lambda i: v[i] if i < len(v) else 0  # noqa: E731
    for i in range(tree.height + 1):
        if v_at(i + 1) != w_at(0) * (w_at(i) * ker1 - (i == 0)):
            raise InconsistencyError(f"level {i + 1} count does not match w_{i} * |ker M|")
        if w_at(0) == 1 and chain.size(i + 1) != sum(w[: i + 1]) * ker1:
            raise InconsistencyError(f"|ker(M^{i + 1})| differs from (w_0+...+w_{i}) |ker M|")


@dataclass(frozen=True)
class UniformDepthReport:
    holds: bool
    all_leaves_at_height: bool
    profile_condition: bool
    kernel_condition: bool
    witnesses: dict


def uniform_depth_check(tree: PretailTree, chain: KernelChain) -> UniformDepthReport:
    """Evaluate the three equivalent 'all maximal pretails have length m' tests."""
    m = tree.height
    children = tree.children()
    leaf_levels = sorted({int(tree.level[i]) for i in range(tree.size) if not children[i]})
    if m == 0:
        cond_i = True
    else:
        cond_i = leaf_levels == [m]
    cond_ii = all(tree.v[i] == tree.w[i] != 0 for i in range(m)) and all(x == 0 for x in tree.w[m:])
    ker1 = chain.size(1)
    cond_iii = all(chain.size(i + 1) == ker1 ** (i + 1) for i in range(m))
    if not (cond_i == cond_ii == cond_iii):
        raise InconsistencyError(
            f"uniform depth tests disagree: leaves {cond_i}, profile {cond_ii}, kernels {cond_iii}"
        )
    witnesses = {"leaf_levels": leaf_levels, "v": tree.v, "w": tree.w, "kernel_sizes": chain.sizes}
    return UniformDepthReport(cond_i, cond_i, cond_ii, cond_iii, witnesses)


def hanging_tree_codes(graph: FunctionalGraph) -> dict[int, str]:
    """Canonical code of the in-tree hanging off each periodic point (by index)."""
    succ, depth = graph.succ, graph.depth
    size = succ.size
    children: list[list[int]] = [[] for _ in range(size)]
    for x in np.flatnonzero(depth > 0).tolist():
        children[int(succ[x])].append(x)
    codes = {}
    for y in np.flatnonzero(depth == 0).tolist():
        codes[y] = _ahu_code(children, y, depth)
    return codes


# --------------------------------------------------------------------------
# minimal polynomial over F_p and nilpotent shapes


def _solve_mod_p(columns: list[list[int]], target: list[int], p: int) -> list[int] | None:
    """Coefficients x with sum x_j columns[j] = target mod p, or None."""
    k = len(columns)
    rows = [[columns[j][i] % p for j in range(k)] + [target[i] % p] for i in range(len(target))]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[k] for row in rows[r:]):
        return None
    x = [0] * k
    for i, c in enumerate(pivots):
        x[c] = rows[i][k]
    return x


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    """a mod f over F_p; coefficient lists are constant-term first, f monic."""
    a = [x % p for x in a]
    df = len(f) - 1
    while len(a) - 1 >= df and any(a):
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - df
            for i, c in enumerate(f):
                a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    return a + [0] * (df - len(a)) if df else []


@dataclass(frozen=True)
class MinPolySplit:
    p: int
    mu: tuple[int, ...]  # constant term first, monic
    s: int
    f: tuple[int, ...]
    ord_f: int


def minimal_poly_split(M, p: int) -> MinPolySplit:
    rows = as_int_rows(M)
    d = len(rows)
    powers = [int_identity(d)]
    while True:
        P = int_matmul(powers[-1], rows, p)
        flat = [x for row in P for x in row]
        sol = _solve_mod_p([[x for row in Q for x in row] for Q in powers], flat, p)
        if sol is not None:
            break
        powers.append(P)
    mu = [(-c) % p for c in sol] + [1]
    s = next(i for i, c in enumerate(mu) if c)
    f = mu[s:]
    deg = len(f) - 1
    ord_f = 1
    if deg:
        one = [1] + [0] * (deg - 1)
        cur = _poly_mod([0, 1], f, p)
        while cur != one:
            cur = _poly_mod([0] + cur, f, p)
            ord_f += 1
            if ord_f >= p**deg:
                raise InconsistencyError("x has no finite order modulo the cofactor")
    return MinPolySplit(p, tuple(mu), s, tuple(f), ord_f)


def nilpotent_jordan_profile(M, p: int) -> tuple[int, ...]:
    """Block sizes (descending) of the nilpotent matrix M over F_p."""
    rows = as_int_rows(M)
    d = len(rows)
    if any(any(x % p for x in row) for row in int_matpow(rows, d, p)):
        raise PreconditionError(f"M is not nilpotent mod {p}")
    dims = [0]
    j = 1
    while dims[-1] < d:
        ks = kernel_size(ResidueMatrix.of(int_matpow(rows, j, p), p))
        dims.append(round(math.log(ks, p)))
        j += 1
    at_least = [dims[j] - dims[j - 1] for j in range(1, len(dims))]  # blocks of size >= j
    sizes = []
    for j, cnt in enumerate(at_least, start=1):
        exact = cnt - (at_least[j] if j < len(at_least) else 0)
        sizes += [j] * exact
    return tuple(sorted(sizes, reverse=True))


def shift_block_tree_profile(d: int, n: int) -> dict:
    """Predicted tree at 0 for a single d x d shift block on (Z/nZ)^d.

    The root has n - 1 children and every other internal node has n, so level
    i holds (n - 1) n^{i-1} nodes, all internal below the last level.
    """
    v = (1,) + tuple((n - 1) * n ** (i - 1) for i in range(1, d + 1))
    w = (1,) + tuple((n - 1) * n ** (i - 1) for i in range(1, d)) + (0,)
    return {"v": v, "w": w, "height": d, "root_children": n - 1, "branching": n}


# --------------------------------------------------------------------------
# DOT export


def _node_id(pt) -> str:
    return "_".join(str(int(x)) for x in pt)


def _node_label(pt) -> str:
    return "(" + ",".join(str(int(x)) for x in pt) + ")"


def functional_graph_dot(M: ResidueMatrix, max_points: int = DEFAULT_MAX_POINTS, name: str = "G") -> str:
    """Whole functional graph: every point with one edge x -> Mx."""
    graph = enumerate_functional_graph(M, max_points)
    pts = kernels.decode_indices(np.arange(M.spec.size), M.n, M.d)
    lines = [f"digraph {name} {{"]
    for pt in pts:
        lines.append(f'  {_node_id(pt)} [label="{_node_label(pt)}"];')
    for x, pt in enumerate(pts):
        lines.append(f"  {_node_id(pt)} -> {_node_id(pts[graph.succ[x]])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_dot(tree: PretailTree, name: str = "T") -> str:
    """The tree at 0 with edges child -> parent (x -> Mx); the root loop is omitted."""
    lines = [f"digraph {name} {{"]
    for pt in tree.nodes:
        lines.append(f'  {_node_id(pt)} [label="{_node_label(pt)}"];')
    for pt, par in zip(tree.nodes, tree.parent.tolist()):
        if par >= 0:
            lines.append(f"  {_node_id(pt)} -> {_node_id(tree.nodes[par])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
