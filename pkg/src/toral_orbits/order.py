"""Matrix orders mod n, lifting profiles over p^r, and the u_m recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from sympy import Matrix

from . import kernels
from .errors import DimensionError, InconsistencyError, NotInvertibleError, PreconditionError
from .numtheory import INFINITY, crt_split, factorize, lcm, multiplicative_order, p_adic_valuation
from .ring import IntRows, ResidueMatrix, as_int_rows, gl_order_prime, int_det, int_identity, int_matmul, int_matpow

# Integer matrices of finite order in dimension <= 6 have order at most 30
# (d <= 4: at most 12), so M^k != 1 for k up to these bounds rules it out.
FINITE_ORDER_BOUND_SMALL = 12
FINITE_ORDER_BOUND = 60


# --------------------------------------------------------------------------
# characteristic polynomial and the u_m recursion


@dataclass(frozen=True)
class CharPolyCoeffs:
    """P(z) = z^d - c_1 z^(d-1) - ... - c_d."""

    d: int
    c: tuple[int, ...]

    def __post_init__(self):
        if len(self.c) != self.d:
            raise DimensionError(f"expected {self.d} coefficients, got {len(self.c)}")

    @classmethod
    def from_matrix(cls, M) -> "CharPolyCoeffs":
        rows = as_int_rows(M)
        d = len(rows)
        monic = Matrix(rows).charpoly().all_coeffs()  # [1, a_1, ..., a_d]
        coeffs = cls(d, tuple(-int(a) for a in monic[1:]))
        if coeffs.c[-1] != (-1) ** (d + 1) * int_det(rows):
            raise InconsistencyError("c_d does not match the determinant")
        return coeffs

    def c_at(self, i: int) -> int:
        """c_i for 1 <= i <= d (1-based like the recursion)."""
        return self.c[i - 1]


@dataclass(frozen=True)
class RecursionSequence:
    coeffs: CharPolyCoeffs
    modulus: int | None
    values: tuple[int, ...]


def _recursion(coeffs: CharPolyCoeffs, m_max: int, n: int | None) -> list[int]:
    d = coeffs.d
    u = [0] * (d - 1) + [1]
    while len(u) <= m_max:
        m = len(u)
        nxt = sum(coeffs.c_at(i) * u[m - i] for i in range(1, d + 1))
        u.append(nxt % n if n is not None else nxt)
    u = u[: m_max + 1]
    return [x % n for x in u] if n is not None else u


def recursion_values(coeffs: CharPolyCoeffs, n: int | None, m_max: int) -> RecursionSequence:
    """u_0 ... u_{m_max}; reduced mod n unless n is None (exact integers)."""
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    return RecursionSequence(coeffs, n, tuple(_recursion(coeffs, m_max, n)))


def power_coefficients(coeffs: CharPolyCoeffs, m: int, method: str = "recursion") -> tuple[int, ...]:
    """(gamma_0, ..., gamma_{d-1}) with M^m = sum_l gamma_l M^l.

    ``method`` selects how they are produced: "recursion" steps
    gamma^(k+1)_l = c_{d-l} gamma^(k)_{d-1} + gamma^(k)_{l-1}; "u-sum" and
    "u-tail" are the two closed expressions in the u_m sequence.
    """
    d = coeffs.d
    if m < 0:
        raise ValueError("negative exponent")
    if m < d:
        return tuple(int(l == m) for l in range(d))
    if method == "recursion":
        g = [int(l == d - 1) for l in range(d)]
        for _ in range(d - 1, m):
            top = g[d - 1]
            g = [coeffs.c_at(d - l) * top + (g[l - 1] if l else 0) for l in range(d)]
        return tuple(g)
    u = _recursion(coeffs, m + d, None)
    if method == "u-sum":
        return tuple(sum(coeffs.c_at(d - i) * u[m - l - 1 + i] for i in range(l + 1)) for l in range(d))
    if method == "u-tail":
        return tuple(
            u[m + d - l - 1] - sum(coeffs.c_at(d - l - i) * u[m - 1 + i] for i in range(1, d - l)) for l in range(d)
        )
    raise ValueError(f"unknown method {method!r}")


def expand_power(M, m: int, n: int | None = None) -> IntRows:
    """M^m assembled from the gamma coefficients (an independent route to M^m)."""
    rows = as_int_rows(M)
    gam = power_coefficients(CharPolyCoeffs.from_matrix(rows), m)
    d = len(rows)
    acc = [[0] * d for _ in range(d)]
    power = int_identity(d)
    for l, g in enumerate(gam):
        for i in range(d):
            for j in range(d):
                acc[i][j] += g * power[i][j]
        power = int_matmul(power, rows)
    if n is not None:
        return tuple(tuple(x % n for x in row) for row in acc)
    return tuple(tuple(row) for row in acc)


# --------------------------------------------------------------------------
# orders


def naive_order(M: ResidueMatrix, bound: int | None = None) -> int:
    """Least m >= 1 with M^m = 1 by repeated multiplication (0 if not a unit)."""
    if not M.is_unit():
        return 0
    ident = ResidueMatrix.identity(M.d, M.n)
    P = M
    m = 1
    limit = bound if bound is not None else M.n ** (M.d * M.d)
    while P != ident:
        P = P @ M
        m += 1
        if m > limit:
            raise InconsistencyError(f"no order found up to {limit}")
    return m


def _is_identity_mod(rows: IntRows, q: int) -> bool:
    return all((e - (i == j)) % q == 0 for i, row in enumerate(rows) for j, e in enumerate(row))


def order_mod_prime(M, p: int) -> int:
    """ord(M, p), found among the divisors of |GL(d, F_p)|."""
    rows = as_int_rows(M)
    d = len(rows)
    if int_det(rows) % p == 0:
        return 0
    N = gl_order_prime(d, p)
    for q in factorize(N):
        while N % q == 0 and _is_identity_mod(int_matpow(rows, N // q, p), p):
            N //= q
    return N


def order_mod_prime_power(M, p: int, r: int) -> int:
    """ord(M, p^r) by lifting: each step keeps the order or multiplies it by p."""
    o = order_mod_prime(M, p)
    if o == 0 or r == 1:
        return o
    rows = as_int_rows(M)
    for i in range(2, r + 1):
        q = p**i
        if not _is_identity_mod(int_matpow(rows, o, q), q):
            o *= p
    return o


def matrix_order(M: ResidueMatrix) -> int:
    """ord(M, n): least m >= 1 with M^m = 1 mod n, or 0 if M is not a unit."""
    if not M.is_unit():
        return 0
    return lcm(*(order_mod_prime_power(M.entries, p, r) for p, r in crt_split(M.n)))


def is_finite_order(M) -> bool:
    """Whether the integer matrix M has finite order in GL(d, Z)."""
    rows = as_int_rows(M)
    d = len(rows)
    if abs(int_det(rows)) != 1:
        return False
    bound = FINITE_ORDER_BOUND_SMALL if d <= 4 else FINITE_ORDER_BOUND
    ident = int_identity(d)
    P = rows
    for _ in range(bound):
        if P == ident:
            return True
        P = int_matmul(P, rows)
    return False


@dataclass(frozen=True)
class PlateauProfile:
    p: int
    base_order: int
    s: int
    orders: tuple[int, ...]
    shape: str  # "no-plateau" | "initial-plateau" | "p2-delayed"
    t: int | None = None  # only for p = 2, s = 1


def _offset_valuation(rows: IntRows, k: int, p: int) -> int:
    """v_p of M^k - 1 over Z (M^k != 1 assumed); computed modulo growing p^R."""
    R = 8
    while True:
        q = p**R
        P = int_matpow(rows, k, q)
        v = min(
            p_adic_valuation((e - (i == j)) % q, p) for i, row in enumerate(P) for j, e in enumerate(row)
        )
        if v != INFINITY and v < R:
            return int(v)
        R *= 2


def order_lift_profile(M, p: int, r_max: int) -> PlateauProfile:
    """Orders ord(M, p^i), i = 1..r_max, classified by their lifting pattern.

    With M^{ord(M,p)} = 1 + p^s B (B != 0 mod p) the orders stay constant up to
    i = s and then gain a factor p per step; for p = 2 and s = 1 the second
    valuation t (from M^{ord(M,4)}) decides whether a plateau follows i = 2.
    """
    rows = as_int_rows(M)
    if int_det(rows) % p == 0:
        raise PreconditionError(f"p = {p} divides det M")
    if is_finite_order(rows):
        raise PreconditionError("M has finite order; its p-adic orders never grow")
    orders = tuple(order_mod_prime_power(rows, p, i) for i in range(1, r_max + 1))
    o = order_mod_prime(rows, p)
    s = _offset_valuation(rows, o, p)
    t = None
    if p != 2 or s >= 2:
        shape = "no-plateau" if s == 1 else "initial-plateau"
        predicted = [o * p ** max(0, i - s) for i in range(1, r_max + 1)]
    else:
        t = _offset_valuation(rows, 2 * o, 2)
        shape = "no-plateau" if t == 2 else "p2-delayed"
        predicted = [o] + [2 * o * 2 ** max(0, i - t) for i in range(2, r_max + 1)]
    if list(orders) != predicted:
        raise InconsistencyError(f"orders {orders} do not follow the lifting pattern {predicted}")
    return PlateauProfile(p, o, s, orders, shape, t)


# --------------------------------------------------------------------------
# 2x2 shortcut through the mgcd


def mgcd(M) -> int:
    """gcd(b, c, d - a) for M = [[a, b], [c, d]]; 0 for scalar matrices."""
    (a, b), (c, d) = as_int_rows(M)
    return math.gcd(b, c, d - a)


@dataclass(frozen=True)
class Invariant2x2:
    T: int
    D: int
    mgcd: int
    N_n: int | None = None


def invariants_2x2(M, n: int | None = None) -> Invariant2x2:
    rows = as_int_rows(M)
    if len(rows) != 2:
        raise DimensionError("2x2 matrix required")
    g = mgcd(rows)
    N = n // math.gcd(n, g) if n is not None else None
    return Invariant2x2(rows[0][0] + rows[1][1], int_det(rows), g, N)


def sequence_period(coeffs: CharPolyCoeffs, n: int) -> int:
    """Period of (u_m) mod n for d = 2: least k >= 1 with u_k = 0, u_{k+1} = 1."""
    if coeffs.d != 2:
        raise DimensionError("sequence_period is defined for d = 2")
    D = -coeffs.c[1]
    if math.gcd(D, n) != 1:
        raise NotInvertibleError(f"determinant {D} is not a unit mod {n}")
    return kernels.recurrence_period(coeffs.c[0], coeffs.c[1], n)


def order_via_mgcd(M, n: int) -> int:
    """ord(M, n) for 2x2 M through the u_m period mod N_n = n / gcd(n, mgcd).

    M^m = 1 mod n forces u_m = 0 and u_{m+1} = 1 mod N_n, so ord(M, n) is a
    multiple of k = per(N_n). At m = k one only gets M^k = lam * 1 mod n
    (u_k kills M - a*1 mod n), and lam need not be 1 mod n: [[7,4],[14,1]]
    mod 16 has per(8) = 2 but order 4. Hence ord(M, n) = k * ord(lam, n).
    """
    rows = as_int_rows(M)
    inv = invariants_2x2(rows, n)
    if math.gcd(inv.D, n) != 1:
        raise NotInvertibleError(f"det M = {inv.D} is not a unit mod {n}")
    if n == 1:
        return 1
    if inv.N_n == 1:
        return multiplicative_order(rows[0][0], n)
    k = sequence_period(CharPolyCoeffs(2, (inv.T, -inv.D)), inv.N_n)
    # companion power [[u_{k+1}, -D u_k], [u_k, -D u_{k-1}]]
    comp = int_matpow(((inv.T, -inv.D), (1, 0)), k, n)
    lam = (comp[1][0] * rows[0][0] + comp[1][1]) % n
    return k * multiplicative_order(lam, n)


def order_summary(M: ResidueMatrix) -> dict:
    """Orders of M mod n and per prime power; used by the CLI."""
    out = {"order": matrix_order(M), "prime_powers": []}
    for p, r in crt_split(M.n):
        out["prime_powers"].append({"p": p, "r": r, "order": order_mod_prime_power(M.entries, p, r)})
    if M.d == 2 and M.is_unit() and M.n > 1:
        out["order_via_mgcd"] = order_via_mgcd(M.entries, M.n)
    return out


def orders_up_to(M: Sequence[Sequence[int]], p: int, r_max: int) -> list[int]:
    return [order_mod_prime_power(M, p, i) for i in range(1, r_max + 1)]
