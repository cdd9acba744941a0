"""Conjugacy, symmetries and reversing symmetries of integer matrices mod n.

Most searches here run over solution modules {P : P B = A P mod n}, which
the Smith form hands us as a direct sum of cyclic pieces; exhaustive scans
over all of GL(2, Z/nZ) are kept for cross-checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from sympy.ntheory import sqrt_mod

from . import kernels
from .census import orbit_counts
from .errors import (
    CapExceededError,
    DimensionError,
    InconsistencyError,
    NotInvertibleError,
    PreconditionError,
)
from .numtheory import crt_combine, crt_split, factorize, is_prime, legendre, multiplicative_order, p_adic_valuation
from .order import matrix_order, mgcd
from .ring import IntRows, ResidueMatrix, as_int_rows, gl_order, int_det, kernel_generators

DEFAULT_MAX_GROUP = 10**7

__all__ = [
    "ConjugacyResult",
    "Gl2FpClass",
    "PrimitiveRoot",
    "ReversibilityReport",
    "ScalarCyclicSplit",
    "SymmetryGroupReport",
    "build_reversor",
    "classify_gl2_fp",
    "conjugate_mod_n",
    "gl2_conjugacy_classes",
    "intertwiner_module",
    "mgcd",
    "primitive_root_matrix",
    "reversible_mod_n",
    "scalar_cyclic_split",
    "symmetry_group",
]


def _two_by_two(M) -> IntRows:
    rows = as_int_rows(M)
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise DimensionError("a 2x2 matrix is required")
    return rows


# --------------------------------------------------------------------------
# batched matrix arithmetic on (N, d, d) int64 arrays


def _bmul(X: np.ndarray, Y: np.ndarray, n: int) -> np.ndarray:
    return np.einsum("nij,njk->nik", X, Y) % n


def _bdet2(X: np.ndarray, n: int) -> np.ndarray:
    return (X[:, 0, 0] * X[:, 1, 1] - X[:, 0, 1] * X[:, 1, 0]) % n


def _bdet(X: np.ndarray, n: int) -> np.ndarray:
    if X.shape[1] == 2:
        return _bdet2(X, n)
    return np.array([int_det(x.tolist()) % n for x in X], dtype=np.int64)


def _encode(X: np.ndarray, n: int) -> np.ndarray:
    flat = X.reshape(len(X), -1)
    return kernels.encode_points(flat, n)


# --------------------------------------------------------------------------
# solution modules {P : P B = A P}


@dataclass(frozen=True)
class IntertwinerModule:
    n: int
    d: int
    generators: tuple[tuple[int, ...], ...]  # flattened d x d matrices
    orders: tuple[int, ...]

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def chunks(self, chunk: int = 1 << 15) -> Iterator[np.ndarray]:
        """All elements as (N, d, d) arrays; each element appears exactly once."""
        n, d = self.n, self.d
        if not self.generators:
            yield np.zeros((1, d, d), dtype=np.int64)
            return
        G = np.array(self.generators, dtype=np.int64)
        orders = np.array(self.orders, dtype=np.int64)
        total = self.size
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            coeffs = np.empty((len(idx), len(orders)), dtype=np.int64)
            rest = idx
            for j in range(len(orders)):
                coeffs[:, j] = rest % orders[j]
                rest = rest // orders[j]
            flat = (coeffs @ G) % n
            yield flat.reshape(-1, d, d)


def intertwiner_module(A, B, n: int) -> IntertwinerModule:
    """{P in Mat(d, Z/nZ) : P B = A P}, as a direct sum of cyclic submodules."""
    A, B = as_int_rows(A), as_int_rows(B)
    d = len(A)
    # unknown P_{kl} sits at position k*d + l; equation (i, j) reads
    # sum_l P_{il} B_{lj} - sum_k A_{ik} P_{kj} = 0
    L = [[0] * (d * d) for _ in range(d * d)]
    for i in range(d):
        for j in range(d):
            row = L[i * d + j]
            for l in range(d):
                row[i * d + l] += B[l][j]
            for k in range(d):
                row[k * d + j] -= A[i][k]
    gens = kernel_generators(L, n)
    orders = []
    for g in gens:
        orders.append(n // math.gcd(n, *g) if any(g) else 1)
    keep = [(g, o) for g, o in zip(gens, orders) if o > 1]
    return IntertwinerModule(n, d, tuple(g for g, _ in keep), tuple(o for _, o in keep))


def _first_unit(module: IntertwinerModule, limit: int) -> tuple[np.ndarray | None, bool]:
    """First unit-determinant element among the first ``limit`` elements.

    Returns ``(P, exhausted)`` where ``exhausted`` says the whole module was seen.
    """
    seen = 0
    for block in module.chunks():
        take = block[: max(0, limit - seen)]
        if len(take):
            units = np.gcd(_bdet(take, module.n), module.n) == 1
            hit = np.flatnonzero(units)
            if hit.size:
                return take[hit[0]], True
        seen += len(block)
        if seen >= limit:
            return None, seen >= module.size
    return None, True


def _crt_matrices(parts: dict[int, np.ndarray | IntRows], n: int, d: int) -> ResidueMatrix:
    rows = tuple(
        tuple(crt_combine({q: int(np.asarray(P)[i][j]) for q, P in parts.items()}) for j in range(d))
        for i in range(d)
    )
    return ResidueMatrix.of(rows, n)


# --------------------------------------------------------------------------
# conjugacy


@dataclass(frozen=True)
class ConjugacyResult:
    n: int
    verdict: bool
    method: str
    witness: ResidueMatrix | None = None  # P with P M' P^{-1} = M
    detail: dict = field(default_factory=dict)


def _local_conjugate(M: IntRows, M2: IntRows, p: int, r: int) -> bool:
    """Exact GL(2, Z/p^r) conjugacy test for 2x2 matrices."""
    q = p**r

    def ell(X):
        v = p_adic_valuation(mgcd(X) % q, p)
        return r if v == math.inf else min(int(v), r)

    l1, l2 = ell(M), ell(M2)
    if l1 != l2:
        return False
    a, a2 = M[0][0], M2[0][0]
    if (a - a2) % p**l1:
        return False
    if l1 == r:
        return True
    pl = p**l1
    qq = p ** (r - l1)

    def reduced(X):
        return [[(X[i][j] - a * (i == j)) // pl for j in range(2)] for i in range(2)]

    C, C2 = reduced(M), reduced(M2)
    same_trace = (C[0][0] + C[1][1] - C2[0][0] - C2[1][1]) % qq == 0
    same_det = (int_det(C) - int_det(C2)) % qq == 0
    return same_trace and same_det


def conjugate_mod_n(
    M, M2, n: int, witness: bool = False, max_group: int = DEFAULT_MAX_GROUP
) -> ConjugacyResult:
    """Whether M and M2 are conjugate in GL(2, Z/nZ).

    Equal trace, determinant and mgcd over Z settle it for every n at once.
    Otherwise each prime power p^r is decided from the p-part of the mgcd,
    the scalar residue and the trace/determinant of the cyclic remainder.
    """
    M, M2 = _two_by_two(M), _two_by_two(M2)
    T1, D1, g1 = M[0][0] + M[1][1], int_det(M), mgcd(M)
    T2, D2, g2 = M2[0][0] + M2[1][1], int_det(M2), mgcd(M2)
    if n == 1:
        verdict, method = True, "trivial"
    elif (T1, D1, g1) == (T2, D2, g2):
        verdict, method = True, "integer-invariants"
    elif (T1 - T2) % n or (D1 - D2) % n:
        verdict, method = False, "trace-determinant"
    else:
        verdict = all(_local_conjugate(M, M2, p, r) for p, r in crt_split(n))
        method = "local-invariants"
    P = None
    if witness and verdict:
        parts = {}
        for p, r in crt_split(n):
            q = p**r
            module = intertwiner_module(M, M2, q)
            found, _ = _first_unit(module, max_group)
            if found is None:
                raise CapExceededError(f"conjugating-matrix search mod {q}", module.size, max_group)
            parts[q] = found
        P = _crt_matrices(parts, n, 2) if parts else ResidueMatrix.identity(2, n)
        Mn, M2n = ResidueMatrix.of(M, n), ResidueMatrix.of(M2, n)
        if P @ M2n != Mn @ P or not P.is_unit():
            raise InconsistencyError("conjugating witness fails verification")
    return ConjugacyResult(n, verdict, method, P, {"T": (T1, T2), "D": (D1, D2), "mgcd": (g1, g2)})


def brute_force_conjugate(M, M2, n: int, backend: str | None = None) -> bool:
    """Scan all 2x2 matrices mod n for a unit P with P M2 = M P."""
    _, total = kernels.scan_intertwiners(M, M2, n, first_only=True, backend=backend)
    return total > 0


# --------------------------------------------------------------------------
# reversors


def _reversor_basis_vector(M: IntRows, n: int) -> tuple[int, int]:
    """x with det[x | Kx] a unit mod n, K = (M - a)/mgcd."""
    (a, b), (c, d) = M
    r = mgcd(M)
    beta, gamma, delta = b // r, c // r, (d - a) // r
    residues_x1, residues_x2 = {}, {}
    for p, e in crt_split(n):
        for x in ((1, 0), (0, 1), (1, 1)):
            if (gamma * x[0] ** 2 + delta * x[0] * x[1] - beta * x[1] ** 2) % p:
                break
        else:  # pragma: no cover - the form is primitive
            raise InconsistencyError("no unit value of the binary form mod p")
        residues_x1[p**e], residues_x2[p**e] = x
    return crt_combine(residues_x1), crt_combine(residues_x2)


def build_reversor(M, n: int) -> ResidueMatrix:
    """Involutory R with R M R^{-1} = M^{-1} mod n, for det M = 1 mod n and mgcd(M) != 0.

    With r = mgcd, K = (M - a)/r and P = [x | Kx] one has P N = M P for
    N = [[a, bc/r], [r, d]], whose involutory reversor is [[1, (d-a)/r], [0, -1]];
    x is chosen (prime by prime) so that det P is a unit.
    """
    M = _two_by_two(M)
    (a, b), (c, d) = M
    if n < 1:
        raise PreconditionError("n must be positive")
    if (int_det(M) - 1) % n:
        raise PreconditionError(f"det M = {int_det(M)} is not 1 mod {n}")
    r = mgcd(M)
    if r == 0:
        raise PreconditionError("M is scalar (mgcd = 0)")
    if n == 1:
        return ResidueMatrix.identity(2, 1)
    beta, gamma, delta = b // r, c // r, (d - a) // r
    x1, x2 = _reversor_basis_vector(M, n)
    K = ((0, beta), (gamma, delta))
    Kx = (K[0][0] * x1 + K[0][1] * x2, K[1][0] * x1 + K[1][1] * x2)
    P = ResidueMatrix.of(((x1, Kx[0]), (x2, Kx[1])), n)
    Pinv = P.inverse()
    if Pinv is None:
        raise InconsistencyError("basis matrix is not a unit")
    N = ResidueMatrix.of(((a, beta * c), (r, d)), n)
    Mn = ResidueMatrix.of(M, n)
    if P @ N != Mn @ P:
        raise InconsistencyError("basis matrix does not intertwine M with its normal form")
    CA = ResidueMatrix.of(((1, delta), (0, -1)), n)
    R = P @ CA @ Pinv
    _verify_reversor(Mn, R, involutory=True)
    return R


def _verify_reversor(M: ResidueMatrix, R: ResidueMatrix, involutory: bool = False) -> None:
    Minv = M.inverse()
    if Minv is None or not R.is_unit() or R @ M != Minv @ R:
        raise InconsistencyError("reversor fails R M R^{-1} = M^{-1}")
    if involutory and not (R @ R).is_identity():
        raise InconsistencyError("reversor is not an involution")


@dataclass(frozen=True)
class PrimePowerVerdict:
    q: int
    p: int
    r: int
    verdict: bool | None
    reason: str  # involution | det=1 | direct-witness | necessary-condition-failed | exhaustive-search | undecided-cap
    witness: ResidueMatrix | None = None


@dataclass(frozen=True)
class ReversibilityReport:
    n: int
    verdict: bool | None
    per_prime_power: tuple[PrimePowerVerdict, ...]
    reversor: ResidueMatrix | None = None
    exhaustive_check: bool | None = None


def _local_reversibility(M: IntRows, p: int, r: int, max_group: int) -> PrimePowerVerdict:
    q = p**r
    Mq = ResidueMatrix.of(M, q)
    D = Mq.det()
    if (Mq @ Mq).is_identity():
        return PrimePowerVerdict(q, p, r, True, "involution", ResidueMatrix.identity(2, q))
    if D == 1 % q:
        return PrimePowerVerdict(q, p, r, True, "det=1", build_reversor(M, q))
    if p != 2:
        return PrimePowerVerdict(q, p, r, False, "necessary-condition-failed")
    half = 2 ** (r - 1)
    ok = (D * D - 1) % q == 0 and ((D - 1) % half == 0 or (D + 1) % half == 0)
    if ok and (D + 1) % half == 0 and (D - 1) % half != 0:
        quarter = 2 ** max(r - 2, 0)
        ok = all(x % quarter == 0 for row in (Mq @ Mq - ResidueMatrix.identity(2, q)).entries for x in row)
    if not ok:
        return PrimePowerVerdict(q, p, r, False, "necessary-condition-failed")
    Minv = Mq.inverse()
    module = intertwiner_module(Minv.entries, M, q)
    found, exhausted = _first_unit(module, max_group)
    if found is not None:
        R = ResidueMatrix.of(found.tolist(), q)
        _verify_reversor(Mq, R)
        return PrimePowerVerdict(q, p, r, True, "direct-witness", R)
    if exhausted:
        return PrimePowerVerdict(q, p, r, False, "exhaustive-search")
    return PrimePowerVerdict(q, p, r, None, "undecided-cap")


def reversible_mod_n(
    M,
    n: int,
    max_group: int = DEFAULT_MAX_GROUP,
    exhaustive: bool = False,
    backend: str | None = None,
) -> ReversibilityReport:
    """Is M conjugate to M^{-1} in GL(2, Z/nZ)? Decided prime power by prime power.

    With ``exhaustive`` the verdict is confirmed by scanning all n^4 matrices
    (refused when n^4 exceeds ``max_group``).
    """
    M = _two_by_two(M)
    if math.gcd(int_det(M), n) != 1:
        raise NotInvertibleError(f"det M = {int_det(M)} is not a unit mod {n}")
    parts = tuple(_local_reversibility(M, p, r, max_group) for p, r in crt_split(n))
    if any(pp.verdict is False for pp in parts):
        verdict: bool | None = False
    elif any(pp.verdict is None for pp in parts):
        verdict = None
    else:
        verdict = True
    R = None
    if verdict:
        R = _crt_matrices({pp.q: pp.witness.entries for pp in parts}, n, 2) if parts else ResidueMatrix.identity(2, n)
        if n > 1:
            _verify_reversor(ResidueMatrix.of(M, n), R)
    checked = None
    if exhaustive:
        if n**4 > max_group:
            raise CapExceededError("exhaustive reversor scan", n**4, max_group)
        Minv = ResidueMatrix.of(M, n).inverse()
        _, total = kernels.scan_intertwiners(Minv.entries, M, n, first_only=True, backend=backend)
        checked = total > 0
        if verdict is not None and checked != verdict:
            raise InconsistencyError(f"scan says {checked} but the prime-power analysis says {verdict}")
        verdict = checked
    return ReversibilityReport(n, verdict, parts, R, checked)


# --------------------------------------------------------------------------
# GL(2, F_p) classification


@dataclass(frozen=True)
class Gl2FpClass:
    p: int
    class_tag: str
    parameters: dict
    normal_form: ResidueMatrix
    basis_change: ResidueMatrix  # B with B^{-1} M B = normal_form
    sym_structure: str
    sym_order: int
    reversible: bool
    reversor: ResidueMatrix | None
    orbit_data: tuple[tuple[int, int], ...]  # (length, count) over nonzero points


def _null_vector(X: IntRows, p: int) -> tuple[int, int]:
    (a, b), (c, d) = ((x % p for x in row) for row in X)
    for v in ((b, -a), (d, -c)):
        if v[0] % p or v[1] % p:
            return (v[0] % p, v[1] % p)
    return (1, 0)


def _merge(pairs) -> tuple[tuple[int, int], ...]:
    acc: dict[int, int] = {}
    for length, count in pairs:
        if count:
            acc[length] = acc.get(length, 0) + count
    return tuple(sorted(acc.items()))


def classify_gl2_fp(M, p: int) -> Gl2FpClass:
    M = _two_by_two(M)
    Mp = ResidueMatrix.of(M, p)
    D, T = Mp.det(), Mp.trace()
    if D == 0:
        raise NotInvertibleError(f"{p} divides det M")
    ident = ResidueMatrix.identity(2, p)
    swap = ResidueMatrix.of(((0, 1), (1, 0)), p)
    flip = ResidueMatrix.of(((1, 0), (0, -1)), p)
    glp = gl_order(2, p)
    if Mp.is_scalar():
        a = Mp.entries[0][0]
        o = multiplicative_order(a, p)
        tag, params, normal, B = "I", {"a": a}, Mp, ident
        sym, sym_order = "GL(2,F_p)", glp
        orbits = _merge([(o, (p * p - 1) // o)])
        special = None
    else:
        if p == 2:
            kind = "repeated" if T == 0 else "irreducible"
            roots = (1, 1) if T == 0 else None
        else:
            disc = (T * T - 4 * D) % p
            if disc == 0:
                kind, roots = "repeated", (T * pow(2, -1, p) % p,) * 2
            elif legendre(disc, p) == 1:
                s = sqrt_mod(disc, p)
                inv2 = pow(2, -1, p)
                roots = tuple(sorted(((T + s) * inv2 % p, (T - s) * inv2 % p)))
                kind = "split"
            else:
                kind, roots = "irreducible", None
        if kind == "repeated":
            a = roots[0]
            N = (Mp - ident.scale(a)).entries
            w = (1, 0) if (N[0][0], N[1][0]) != (0, 0) else (0, 1)
            v = ((N[0][0] * w[0] + N[0][1] * w[1]) % p, (N[1][0] * w[0] + N[1][1] * w[1]) % p)
            B = ResidueMatrix.of(((v[0], w[0]), (v[1], w[1])), p)
            tag, params = "II", {"a": a}
            normal = ResidueMatrix.of(((a, 1), (0, a)), p)
            sym, sym_order = "C_p x C_{p-1}", p * (p - 1)
            o = multiplicative_order(a, p)
            orbits = _merge([(o, (p - 1) // o), (p * o, (p - 1) // o)])
            special = flip if D == 1 else None
        elif kind == "split":
            a, b = roots
            va = _null_vector((Mp - ident.scale(a)).entries, p)
            vb = _null_vector((Mp - ident.scale(b)).entries, p)
            B = ResidueMatrix.of(((va[0], vb[0]), (va[1], vb[1])), p)
            tag, params = "III", {"a": a, "b": b}
            normal = ResidueMatrix.of(((a, 0), (0, b)), p)
            sym, sym_order = "C_{p-1}^2", (p - 1) ** 2
            oa, ob = multiplicative_order(a, p), multiplicative_order(b, p)
            ol = math.lcm(oa, ob)
            orbits = _merge([(oa, (p - 1) // oa), (ob, (p - 1) // ob), (ol, (p - 1) ** 2 // ol)])
            special = swap if a * b % p == 1 else None
        else:
            x = (1, 0)
            Mx = Mp.apply(x)
            B = ResidueMatrix.of(((x[0], Mx[0]), (x[1], Mx[1])), p)
            tag, params = "IV", {"T": T, "D": D}
            normal = ResidueMatrix.of(((0, -D), (1, T)), p)
            sym, sym_order = "C_{p^2-1}", p * p - 1
            o = matrix_order(Mp)
            orbits = _merge([(o, (p * p - 1) // o)])
            special = swap if D == 1 else None
        Binv = B.inverse()
        if Binv is None or Binv @ Mp @ B != normal:
            raise InconsistencyError(f"change of basis does not produce the class {tag} normal form")
    involution = (Mp @ Mp).is_identity()
    reversible = involution or D == 1
    reversor = None
    if involution:
        reversor = ident
    elif reversible:
        if Mp.is_scalar():  # a = +-1 is caught above, so this cannot happen
            raise InconsistencyError("scalar matrix with det 1 that is not an involution")
        reversor = B @ special @ B.inverse()
    if reversor is not None:
        _verify_reversor(Mp, reversor, involutory=True)
    return Gl2FpClass(p, tag, params, normal, B, sym, sym_order, reversible, reversor, orbits)


def gl2_elements(p: int) -> np.ndarray:
    """All of GL(2, Z/pZ) (p need not be prime) as an (N, 2, 2) array, lexicographic."""
    r = np.arange(p, dtype=np.int64)
    grid = np.stack(np.meshgrid(r, r, r, r, indexing="ij"), axis=-1).reshape(-1, 2, 2)
    return grid[np.gcd(_bdet2(grid, p), p) == 1]


def gl2_conjugacy_classes(p: int) -> list[np.ndarray]:
    """Exhaustive partition of GL(2, Z/pZ) into conjugacy classes (each sorted)."""
    G = gl2_elements(p)
    Ginv = np.array([ResidueMatrix.of(g.tolist(), p).inverse().entries for g in G], dtype=np.int64)
    codes = _encode(G, p)
    position = {int(c): i for i, c in enumerate(codes)}
    assigned = np.full(len(G), -1, dtype=np.int64)
    classes = []
    for i in range(len(G)):
        if assigned[i] >= 0:
            continue
        X = np.broadcast_to(G[i], G.shape)
        conj = _bmul(_bmul(G, X, p), Ginv, p)
        members = np.unique(_encode(conj, p))
        idx = np.array([position[int(c)] for c in members], dtype=np.int64)
        assigned[idx] = len(classes)
        classes.append(G[idx])
    return classes


def brute_force_reversible(M, p: int, backend: str | None = None) -> bool:
    Minv = ResidueMatrix.of(M, p).inverse()
    if Minv is None:
        raise NotInvertibleError("M is not a unit")
    _, total = kernels.scan_intertwiners(Minv.entries, M, p, first_only=True, backend=backend)
    return total > 0


# --------------------------------------------------------------------------
# symmetry groups


@dataclass(frozen=True)
class SymmetryGroupReport:
    n: int
    order: int
    method: str  # full-GL | cyclic-algebra | exhaustive
    generators: tuple[ResidueMatrix, ...]
    abelian: bool
    invariant_factors: tuple[int, ...] | None
    determinant_spectrum: tuple[int, ...]
    det_one_invariant_factors: tuple[int, ...] | None = None
    elements: np.ndarray | None = field(default=None, repr=False)


def _powers_order(X: np.ndarray, n: int) -> np.ndarray:
    """Order of every matrix in the batch X (all units)."""
    d = X.shape[1]
    ident = np.eye(d, dtype=np.int64)
    P = X.copy()
    orders = np.zeros(len(X), dtype=np.int64)
    k = 1
    todo = np.arange(len(X))
    while todo.size:
        done = np.all(P[todo] == ident, axis=(1, 2))
        orders[todo[done]] = k
        todo = todo[~done]
        if todo.size:
            P[todo] = _bmul(P[todo], X[todo], n)
            k += 1
    return orders


def abelian_invariant_factors(elements: np.ndarray, n: int) -> tuple[int, ...]:
    """Invariant factors m_1 | m_2 | ... of a finite abelian matrix group, largest first."""
    size = len(elements)
    if size == 1:
        return ()
    orders = _powers_order(elements, n)
    by_prime: dict[int, list[int]] = {}
    for q in factorize(size):
        # N_j = #{x : x^{q^j} = 1} = q^{sum_i min(e_i, j)}
        logs = [0]
        j = 1
        while logs[-1] < p_adic_valuation(size, q):
            cnt = int(np.sum(q**j % orders == 0))
            logs.append(round(math.log(cnt, q)))
            j += 1
        ge = [logs[j] - logs[j - 1] for j in range(1, len(logs))]  # #factors with exponent >= j
        exps = []
        for j, c in enumerate(ge, start=1):
            nxt = ge[j] if j < len(ge) else 0
            exps += [j] * (c - nxt)
        by_prime[q] = sorted(exps, reverse=True)
    width = max(len(v) for v in by_prime.values())
    factors = []
    for i in range(width):
        f = 1
        for q, exps in by_prime.items():
            if i < len(exps):
                f *= q ** exps[i]
        factors.append(f)
    if math.prod(factors) != size:
        raise InconsistencyError("invariant factors do not multiply to the group order")
    return tuple(factors)


def _greedy_generators(elements: np.ndarray, n: int) -> list[np.ndarray]:
    """Generators picked in lexicographic order, each outside the span of the earlier ones."""
    d = elements.shape[1]
    ident = np.eye(d, dtype=np.int64)[None]
    span = ident.copy()
    span_codes = set(_encode(span, n).tolist())
    gens = []
    target = len(elements)
    for g in elements:
        if len(span_codes) == target:
            break
        if int(_encode(g[None], n)[0]) in span_codes:
            continue
        gens.append(g)
        frontier = span
        while len(frontier):
            new_parts = []
            for h in gens:
                prod = _bmul(frontier, np.broadcast_to(h, frontier.shape), n)
                codes = _encode(prod, n)
                fresh = [i for i, c in enumerate(codes.tolist()) if c not in span_codes]
                for i in fresh:
                    span_codes.add(int(codes[i]))
                if fresh:
                    new_parts.append(prod[fresh])
            frontier = np.unique(np.concatenate(new_parts), axis=0) if new_parts else frontier[:0]
            if len(frontier):
                span = np.concatenate([span, frontier])
    return gens


def _is_abelian(gens: Sequence[np.ndarray], n: int) -> bool:
    for g, h in itertools.combinations(gens, 2):
        if not np.array_equal((g @ h) % n, (h @ g) % n):
            return False
    return True


def _group_report(elements: np.ndarray, n: int, method: str) -> SymmetryGroupReport:
    elements = elements[np.argsort(_encode(elements, n))]
    gens = _greedy_generators(elements, n)
    abelian = _is_abelian(gens, n)
    dets = _bdet(elements, n)
    inv = det1 = None
    if abelian:
        inv = abelian_invariant_factors(elements, n)
        det1 = abelian_invariant_factors(elements[dets == 1 % n], n)
    return SymmetryGroupReport(
        n,
        len(elements),
        method,
        tuple(ResidueMatrix.of(g.tolist(), n) for g in gens),
        abelian,
        inv,
        tuple(sorted(set(int(x) for x in dets))),
        det1,
        elements,
    )


def symmetry_group(M: ResidueMatrix, max_group: int = DEFAULT_MAX_GROUP) -> SymmetryGroupReport:
    """S(M) = {G in GL(d, Z/nZ) : G M = M G}."""
    n, d = M.n, M.d
    if n == 1:
        return _group_report(np.zeros((1, d, d), dtype=np.int64), 1, "exhaustive")
    if is_prime(n) and d == 2:
        if M.is_scalar():
            units = tuple(range(1, n))
            return SymmetryGroupReport(n, gl_order(2, n), "full-GL", (), False, None, units)
        ident = np.eye(2, dtype=np.int64)
        A = np.asarray(M.entries, dtype=np.int64)
        al, ga = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        X = (al.reshape(-1, 1, 1) * ident + ga.reshape(-1, 1, 1) * A) % n
        X = X[_bdet2(X, n) != 0]
        return _group_report(X, n, "cyclic-algebra")
    module = intertwiner_module(M.entries, M.entries, n)
    if module.size > max_group:
        raise CapExceededError("enumerating the commutant", module.size, max_group)
    blocks = [b[np.gcd(_bdet(b, n), n) == 1] for b in module.chunks()]
    return _group_report(np.concatenate(blocks), n, "exhaustive")


def brute_force_symmetries(M: ResidueMatrix, backend: str | None = None) -> int:
    _, total = kernels.scan_intertwiners(M.entries, M.entries, M.n, backend=backend, limit=1)
    return total


# --------------------------------------------------------------------------
# roots over F_p


@dataclass(frozen=True)
class PrimitiveRoot:
    p: int
    W: ResidueMatrix
    exponent: int  # W^exponent = M
    order_W: int
    already_primitive: bool


def primitive_root_matrix(M, p: int) -> PrimitiveRoot:
    """W generating F_p[M]^x (order p^2 - 1) with W^n = M, n = (p^2 - 1)/ord(M)."""
    M = _two_by_two(M)
    cls = classify_gl2_fp(M, p)
    if cls.class_tag != "IV":
        raise PreconditionError(f"characteristic polynomial of M is reducible mod {p}")
    Mp = ResidueMatrix.of(M, p)
    full = p * p - 1
    o = matrix_order(Mp)
    if o == full:
        W, expo, primitive = Mp, 1, True
    else:
        expo = full // o
        ident = ResidueMatrix.identity(2, p)
        W = None
        for alpha in range(p):
            for gamma in range(p):
                cand = ident.scale(alpha) + Mp.scale(gamma)
                if cand.is_unit() and matrix_order(cand) == full and cand**expo == Mp:
                    W = cand
                    break
            if W is not None:
                break
        if W is None:
            raise InconsistencyError("no primitive root found in F_p[M]")
        primitive = False
    # <W> must exhaust F_p[M] minus 0
    powers = set()
    P = ResidueMatrix.identity(2, p)
    for _ in range(full):
        P = P @ W
        powers.add(P.entries)
    algebra = {
        (ResidueMatrix.identity(2, p).scale(a) + Mp.scale(g)).entries
        for a in range(p)
        for g in range(p)
        if (a, g) != (0, 0)
    }
    if powers != algebra:
        raise InconsistencyError("powers of W do not fill F_p[M] minus 0")
    return PrimitiveRoot(p, W, expo, matrix_order(W), primitive)


# --------------------------------------------------------------------------
# scalar + cyclic split over Z/p^r


@dataclass(frozen=True)
class ScalarCyclicSplit:
    p: int
    r: int
    ell: int
    d_scalar: int
    C: IntRows | None  # over Z/p^{r-ell}; None when M is scalar mod p^r
    period_bound: int | None  # ord(d, p^r) p^{r-ell} for 1 <= ell <= r
    max_period: int | None = None  # measured from the census when verified


def scalar_cyclic_split(M, p: int, r: int, verify: bool = True) -> ScalarCyclicSplit:
    """M = d + p^ell C mod p^r with ell = min(v_p(mgcd), r) and C cyclic mod p."""
    M = _two_by_two(M)
    q = p**r
    v = p_adic_valuation(mgcd(M) % q, p)
    ell = r if v == math.inf else min(int(v), r)
    pl = p**ell
    d_scalar = M[0][0] % pl
    C = None
    if ell < r:
        qq = p ** (r - ell)
        C = tuple(tuple(((M[i][j] - d_scalar * (i == j)) // pl) % qq for j in range(2)) for i in range(2))
        if ResidueMatrix.of(C, p).is_scalar():
            raise InconsistencyError("cyclic part is scalar mod p")
    bound = None
    measured = None
    if ell >= 1 and d_scalar % p:
        bound = multiplicative_order(d_scalar, q) * p ** (r - ell)
        if verify:
            census = orbit_counts(ResidueMatrix.of(M, q))
            measured = max(m for m, _ in census.cycles)
            if measured > bound:
                raise InconsistencyError(f"cycle of length {measured} exceeds the bound {bound}")
    return ScalarCyclicSplit(p, r, ell, d_scalar, C, bound, measured)
