"""Exact arithmetic for d x d matrices over Z/nZ.

All entries are Python integers, so nothing overflows. A ``ResidueMatrix``
always holds canonical residues in ``range(n)``; equality is structural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InconsistencyError, MatrixParseError, ModulusMismatchError
from .numtheory import crt_combine, crt_split

IntRows = tuple[tuple[int, ...], ...]


# --------------------------------------------------------------------------
# plain integer matrix helpers


def _as_rows(raw) -> IntRows:
    if isinstance(raw, ResidueMatrix):
        return raw.entries
    if isinstance(raw, np.ndarray):
        raw = raw.tolist()
    return tuple(tuple(int(e) for e in row) for row in raw)


def int_identity(d: int) -> IntRows:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def int_matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], n: int | None = None) -> IntRows:
    cols = list(zip(*B))
    if n is None:
        return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) % n for col in cols) for row in A)


def int_matpow(A: Sequence[Sequence[int]], k: int, n: int | None = None) -> IntRows:
    """A**k by repeated squaring, reduced mod n when n is given."""
    if k < 0:
        raise ValueError("negative exponent")
    result = int_identity(len(A))
    if n is not None:
        result = tuple(tuple(e % n for e in row) for row in result)
    base = _as_rows(A)
    while k:
        if k & 1:
            result = int_matmul(result, base, n)
        k >>= 1
        if k:
            base = int_matmul(base, base, n)
    return result


def int_det(A: Sequence[Sequence[int]]) -> int:
    """Determinant over Z (fraction-free Bareiss elimination)."""
    M = [list(row) for row in A]
    d = len(M)
    if d == 0:
        return 1
    sign, prev = 1, 1
    for k in range(d - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, d) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[d - 1][d - 1]


def int_trace(A: Sequence[Sequence[int]]) -> int:
    return sum(A[i][i] for i in range(len(A)))


# --------------------------------------------------------------------------
# Smith normal form over Z


@dataclass(frozen=True)
class SmithProfile:
    """Invariant factors d_1 | d_2 | ... (zeros, if any, come last)."""

    diagonal: tuple[int, ...]

    def __post_init__(self):
        diag = self.diagonal
        for i, (a, b) in enumerate(zip(diag, diag[1:])):
            if a == 0 and b != 0:
                raise InconsistencyError(f"zero before nonzero in Smith diagonal {diag}")
            if a != 0 and b % a != 0:
                raise InconsistencyError(f"divisibility chain broken at {i} in {diag}")

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x)


def smith_decomposition(A: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(S, U, V)`` with ``U @ A @ V == S`` and U, V unimodular.

    A may be rectangular. S is diagonal with non-negative entries forming a
    divisibility chain.
    """
    S = [list(row) for row in A]
    m = len(S)
    ncols = len(S[0]) if m else 0
    U = [list(r) for r in int_identity(m)]
    V = [list(r) for r in int_identity(ncols)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (S, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, q):
        for M in (S, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, ncols)):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, ncols) if S[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
            for j in range(t + 1, ncols):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
            rest = [(abs(S[i][t]), i, "r") for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), j, "c") for j in range(t + 1, ncols) if S[t][j]]
            if rest:
                _, k, kind = min(rest)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, ncols) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithProfile:
    S, _, _ = smith_decomposition(_as_rows(A))
    k = min(len(S), len(S[0]) if S else 0)
    return SmithProfile(tuple(S[i][i] for i in range(k)))


# --------------------------------------------------------------------------
# lattices and residue matrices


@dataclass(frozen=True)
class LatticeSpec:
    """The lattice (Z/nZ)^d with n^d points."""

    d: int
    n: int

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise DimensionError(f"need d >= 1 and n >= 1, got d={self.d}, n={self.n}")

    @property
    def size(self) -> int:
        return self.n**self.d


@dataclass(frozen=True)
class ResidueMatrix:
    spec: LatticeSpec
    entries: IntRows = field()

    def __post_init__(self):
        d, n = self.spec.d, self.spec.n
        rows = self.entries
        if len(rows) != d or any(len(r) != d for r in rows):
            raise DimensionError(f"expected a {d}x{d} matrix")
        object.__setattr__(self, "entries", tuple(tuple(int(e) % n for e in r) for r in rows))

    # constructors -----------------------------------------------------
    @classmethod
    def of(cls, raw, n: int) -> "ResidueMatrix":
        rows = _as_rows(raw)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise DimensionError("matrix must be square and non-empty")
        return cls(LatticeSpec(len(rows), n), rows)

    @classmethod
    def identity(cls, d: int, n: int) -> "ResidueMatrix":
        return cls(LatticeSpec(d, n), int_identity(d))

    @classmethod
    def scalar(cls, alpha: int, d: int, n: int) -> "ResidueMatrix":
        return cls(LatticeSpec(d, n), tuple(tuple(alpha * (i == j) for j in range(d)) for i in range(d)))

    # basic accessors ----------------------------------------------------
    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def n(self) -> int:
        return self.spec.n

    def lift(self) -> IntRows:
        return self.entries

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def __repr__(self):
        body = ";".join(",".join(str(e) for e in r) for r in self.entries)
        return f"ResidueMatrix([{body}] mod {self.n})"

    def _check(self, other: "ResidueMatrix"):
        if self.spec != other.spec:
            raise ModulusMismatchError(f"{self.spec} vs {other.spec}")

    # arithmetic -----------------------------------------------------------
    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        return ResidueMatrix(self.spec, int_matmul(self.entries, other.entries, self.n))

    def __add__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        return ResidueMatrix(
            self.spec, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        return ResidueMatrix(
            self.spec, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __neg__(self) -> "ResidueMatrix":
        return ResidueMatrix(self.spec, tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, alpha: int) -> "ResidueMatrix":
        return ResidueMatrix(self.spec, tuple(tuple(alpha * a for a in r) for r in self.entries))

    def __pow__(self, k: int) -> "ResidueMatrix":
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise ValueError("negative power of a non-unit")
            return inv ** (-k)
        return ResidueMatrix(self.spec, int_matpow(self.entries, k, self.n))

    def det(self) -> int:
        return int_det(self.entries) % self.n

    def trace(self) -> int:
        return int_trace(self.entries) % self.n

    def is_unit(self) -> bool:
        return math.gcd(self.det(), self.n) == 1

    def is_identity(self) -> bool:
        return self == ResidueMatrix.identity(self.d, self.n)

    def is_zero(self) -> bool:
        return all(e == 0 for r in self.entries for e in r)

    def is_scalar(self) -> bool:
        a = self.entries[0][0]
        return all(e == (a if i == j else 0) for i, r in enumerate(self.entries) for j, e in enumerate(r))

    def reduce_mod(self, k: int) -> "ResidueMatrix":
        if self.n % k:
            raise ModulusMismatchError(f"{k} does not divide {self.n}")
        return ResidueMatrix(LatticeSpec(self.d, k), self.entries)

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, x)) % self.n for row in self.entries)

    def inverse(self) -> "ResidueMatrix | None":
        """Inverse mod n, or ``None`` when det is not a unit."""
        n = self.n
        det = self.det()
        if math.gcd(det, n) != 1:
            return None
        if n == 1:
            return self
        if self.d == 2:
            (a, b), (c, d) = self.entries
            inv = pow(det, -1, n)
            return ResidueMatrix(self.spec, ((d * inv, -b * inv), (-c * inv, a * inv)))
        parts = {p**r: _inverse_local(self.entries, p, p**r) for p, r in crt_split(n)}
        rows = tuple(
            tuple(crt_combine({q: parts[q][i][j] for q in parts}) for j in range(self.d)) for i in range(self.d)
        )
        return ResidueMatrix(self.spec, rows)


def _inverse_local(A: IntRows, p: int, q: int) -> IntRows:
    """Gauss-Jordan over Z/qZ, q = p^r, using unit pivots (always available)."""
    d = len(A)
    M = [[x % q for x in row] + [int(i == j) for j in range(d)] for i, row in enumerate(A)]
    for col in range(d):
        piv = next((i for i in range(col, d) if M[i][col] % p), None)
        if piv is None:
            raise InconsistencyError("no unit pivot although det is a unit")
        M[col], M[piv] = M[piv], M[col]
        inv = pow(M[col][col], -1, q)
        M[col] = [x * inv % q for x in M[col]]
        for i in range(d):
            if i != col and M[i][col]:
                f = M[i][col]
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[col])]
    return tuple(tuple(row[d:]) for row in M)


def reduce(raw_entries, spec: LatticeSpec) -> ResidueMatrix:
    """Reduce an integer matrix entrywise into ``spec``."""
    rows = _as_rows(raw_entries)
    if len(rows) != spec.d or any(len(r) != spec.d for r in rows):
        raise DimensionError(f"raw entries are not {spec.d}x{spec.d}")
    return ResidueMatrix(spec, rows)


# --------------------------------------------------------------------------
# kernels and images


def image_size(G: Sequence[Sequence[int]], n: int) -> int:
    """Size of the Z/nZ-span of the columns of the (rectangular) integer matrix G."""
    rows = _as_rows(G)
    if not rows or not rows[0]:
        return 1
    prof = smith_normal_form(rows)
    size = 1
    for s in prof.diagonal:
        size *= n // math.gcd(s, n)
    return size


def kernel_size(A: ResidueMatrix) -> int:
    """|{x in (Z/nZ)^d : A x = 0}| from the Smith invariants of a lift of A."""
    size = 1
    for s in smith_normal_form(A.entries).diagonal:
        size *= math.gcd(s, A.n)
    return size


def kernel_generators(A: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Generators of the solution module {x : A x = 0 mod n} (A may be rectangular).

    With ``U A V = S`` the solutions are ``x = V y`` where ``y_i`` runs over
    multiples of ``n / gcd(s_i, n)`` (free coordinates beyond the diagonal).
    """
    rows = _as_rows(A)
    ncols = len(rows[0])
    S, _, V = smith_decomposition(rows)
    gens = []
    for i in range(ncols):
        s = S[i][i] if i < len(S) else 0
        step = n // math.gcd(s, n)
        if step == n:
            continue
        gens.append(tuple((V[k][i] * step) % n for k in range(ncols)))
    return gens


def span_points(gens: Sequence[Sequence[int]], n: int, d: int, cap: int | None = None) -> np.ndarray:
    """All points of the Z/nZ-span of ``gens`` as a sorted (N, d) int64 array."""
    from .errors import CapExceededError

    pts = np.zeros((1, d), dtype=np.int64)
    for g in gens:
        g = np.asarray(g, dtype=np.int64) % n
        order = n // math.gcd(n, *[int(x) for x in g]) if any(g) else 1
        if order == 1:
            continue
        multiples = (np.arange(order, dtype=np.int64)[:, None] * g[None, :]) % n
        pts = ((pts[:, None, :] + multiples[None, :, :]) % n).reshape(-1, d)
        pts = np.unique(pts, axis=0)
        if cap is not None and len(pts) > cap:
            raise CapExceededError("submodule enumeration", len(pts), cap)
    return np.unique(pts, axis=0)


# --------------------------------------------------------------------------
# group orders


def gl_order_prime(d: int, p: int) -> int:
    out = 1
    for i in range(d):
        out *= p**d - p**i
    return out


def gl_order(d: int, n: int) -> int:
    """|GL(d, Z/nZ)|."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    out = n ** (d * d)
    for p, _ in crt_split(n):
        out = out * gl_order_prime(d, p) // p ** (d * d)
    return out


# --------------------------------------------------------------------------
# text format "2,1;1,1"


def parse_matrix(text: str) -> IntRows:
    text = text.strip()
    if not text:
        raise MatrixParseError("empty matrix", 0)
    rows: list[tuple[int, ...]] = []
    pos = 0
    for row_text in text.split(";"):
        row = []
        for entry in row_text.split(","):
            stripped = entry.strip()
            try:
                if not stripped or not stripped.lstrip("-").isdigit() or stripped.count("-") > 1:
                    raise ValueError
                row.append(int(stripped))
            except ValueError:
                raise MatrixParseError(f"bad entry {entry!r}", pos) from None
            pos += len(entry) + 1
        if rows and len(row) != len(rows[0]):
            raise MatrixParseError(f"ragged row {len(rows) + 1}: {len(row)} entries, expected {len(rows[0])}", pos)
        rows.append(tuple(row))
    if len(rows) != len(rows[0]):
        raise MatrixParseError(f"matrix is {len(rows)}x{len(rows[0])}, not square", pos)
    return tuple(rows)


def format_matrix(A) -> str:
    return ";".join(",".join(str(e) for e in row) for row in _as_rows(A))


def as_int_rows(raw: Iterable) -> IntRows:
    return _as_rows(raw)
