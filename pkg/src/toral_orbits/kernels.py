"""Hot loops: successor maps, functional-graph walks, intertwiner scans, recurrence periods.

Each public kernel dispatches to a numba implementation or a pure numpy one.
The choice follows ``_accel.USE_NUMBA`` unless ``backend`` is passed
explicitly ("numba" or "numpy"); both must give identical results.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit
from .errors import CapExceededError, InconsistencyError

BACKENDS = ("numba", "numpy")


def _pick(backend: str | None) -> str:
    if backend is None:
        return "numba" if _accel.USE_NUMBA else "numpy"
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _accel.HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def active_backend() -> str:
    return _pick(None)


# --------------------------------------------------------------------------
# lattice encoding


def encode_points(points: np.ndarray, n: int) -> np.ndarray:
    """Mixed-radix index sum_i x_i n^(d-1-i) for each row of ``points``."""
    points = np.asarray(points, dtype=np.int64)
    idx = np.zeros(points.shape[0], dtype=np.int64)
    for i in range(points.shape[1]):
        idx = idx * n + points[:, i]
    return idx


def decode_indices(idx: np.ndarray, n: int, d: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64).copy()
    out = np.empty((idx.shape[0], d), dtype=np.int64)
    for i in range(d - 1, -1, -1):
        out[:, i] = idx % n
        idx //= n
    return out


def successor_map(entries, n: int) -> np.ndarray:
    """succ[idx(x)] = idx(Mx mod n) for every lattice point, as an int64 array."""
    M = np.asarray(entries, dtype=np.int64) % n
    d = M.shape[0]
    size = n**d
    # digits of every index, most significant first
    digits = []
    rest = np.arange(size, dtype=np.int64)
    for _ in range(d):
        digits.append(rest % n)
        rest = rest // n
    digits.reverse()
    succ = np.zeros(size, dtype=np.int64)
    for i in range(d):
        row = np.zeros(size, dtype=np.int64)
        for j in range(d):
            if M[i, j]:
                row = (row + M[i, j] * digits[j]) % n
        succ = succ * n + row
    return succ


# --------------------------------------------------------------------------
# functional-graph walk


@njit(cache=True)
def _walk_numba(succ):
    size = succ.shape[0]
    state = np.zeros(size, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    period = np.zeros(size, dtype=np.int64)
    depth = np.zeros(size, dtype=np.int64)
    anchor = np.zeros(size, dtype=np.int64)
    cycle_id = np.zeros(size, dtype=np.int64)
    path = np.empty(size, dtype=np.int64)
    for start in range(size):
        if state[start] != 0:
            continue
        length = 0
        x = start
        while state[x] == 0:
            state[x] = 1
            path[length] = x
            length += 1
            x = succ[x]
        if state[x] == 1:
            # closed a new cycle; it starts at x on the path
            pos = length - 1
            while path[pos] != x:
                pos -= 1
            clen = length - pos
            cmin = x
            for t in range(pos, length):
                if path[t] < cmin:
                    cmin = path[t]
            for t in range(pos, length):
                y = path[t]
                state[y] = 2
                period[y] = clen
                depth[y] = 0
                anchor[y] = y
                cycle_id[y] = cmin
            length = pos
        # unwind the tail onto whatever x resolved to
        for t in range(length - 1, -1, -1):
            y = path[t]
            z = succ[y]
            state[y] = 2
            period[y] = period[z]
            depth[y] = depth[z] + 1
            anchor[y] = anchor[z] if depth[z] > 0 else z
            cycle_id[y] = cycle_id[z]
    return period, depth, anchor, cycle_id


def _walk_numpy(succ):
    size = succ.shape[0]
    # succ^(2^K) with 2^K >= size lands every point on its cycle
    g = succ.copy()
    steps = 1
    while steps < size:
        g = g[g]
        steps *= 2
    periodic = np.zeros(size, dtype=bool)
    periodic[g] = True

    # cycle ids: minimum index along each cycle by pointer doubling
    label = np.where(periodic, np.arange(size, dtype=np.int64), size)
    h = succ.copy()
    steps = 1
    while steps < size:
        label = np.minimum(label, label[h])
        h = h[h]
        steps *= 2
    cyc = np.flatnonzero(periodic)
    counts = np.bincount(label[cyc], minlength=size)

    period = np.zeros(size, dtype=np.int64)
    depth = np.full(size, -1, dtype=np.int64)
    anchor = np.zeros(size, dtype=np.int64)
    cycle_id = np.zeros(size, dtype=np.int64)
    period[cyc] = counts[label[cyc]]
    depth[cyc] = 0
    anchor[cyc] = cyc
    cycle_id[cyc] = label[cyc]

    level = 0
    todo = np.flatnonzero(~periodic)
    while todo.size:
        nxt = succ[todo]
        ready = depth[nxt] == level
        if not ready.any():
            raise InconsistencyError("pretail walk made no progress")
        xs, ys = todo[ready], nxt[ready]
        depth[xs] = level + 1
        period[xs] = period[ys]
        cycle_id[xs] = cycle_id[ys]
        anchor[xs] = np.where(depth[ys] == 0, ys, anchor[ys])
        todo = todo[~ready]
        level += 1
    return period, depth, anchor, cycle_id


def walk_functional_graph(succ: np.ndarray, backend: str | None = None):
    """Decompose the functional graph of ``succ``.

    Returns int64 arrays ``(period, depth, anchor, cycle_id)``: the length of
    the cycle each point falls into, its distance to that cycle, the first
    periodic point reached, and the smallest index on that cycle.
    """
    succ = np.ascontiguousarray(succ, dtype=np.int64)
    if _pick(backend) == "numba":
        return _walk_numba(succ)
    return _walk_numpy(succ)


# --------------------------------------------------------------------------
# brute-force intertwiner scan over all 2x2 matrices


@njit(cache=True)
def _scan_numba(A, B, n, require_unit, first_only, limit):
    out = np.empty((limit, 4), dtype=np.int64)
    found = 0
    a00, a01, a10, a11 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    b00, b01, b10, b11 = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    for p00 in range(n):
        for p01 in range(n):
            for p10 in range(n):
                # entry (0,0) of P B - A P does not involve p11
                if (p00 * b00 + p01 * b10 - a00 * p00 - a01 * p10) % n:
                    continue
                for p11 in range(n):
                    if (p00 * b01 + p01 * b11 - a00 * p01 - a01 * p11) % n:
                        continue
                    if (p10 * b00 + p11 * b10 - a10 * p00 - a11 * p10) % n:
                        continue
                    if (p10 * b01 + p11 * b11 - a10 * p01 - a11 * p11) % n:
                        continue
                    if require_unit:
                        det = (p00 * p11 - p01 * p10) % n
                        a, b = det, n
                        while b:
                            a, b = b, a % b
                        if a != 1:
                            continue
                    if found < limit:
                        out[found, 0] = p00
                        out[found, 1] = p01
                        out[found, 2] = p10
                        out[found, 3] = p11
                    found += 1
                    if first_only:
                        return out[:1], found
    return out[: min(found, limit)], found


def _scan_numpy(A, B, n, require_unit, first_only, limit):
    a00, a01, a10, a11 = (int(v) for v in A.ravel())
    b00, b01, b10, b11 = (int(v) for v in B.ravel())
    r = np.arange(n, dtype=np.int64)
    p10, p11 = np.meshgrid(r, r, indexing="ij")
    p10, p11 = p10.ravel(), p11.ravel()
    chunks = []
    found = 0
    for p00 in range(n):
        for p01 in range(n):
            ok = (p00 * b00 + p01 * b10 - a00 * p00 - a01 * p10) % n == 0
            ok &= (p00 * b01 + p01 * b11 - a00 * p01 - a01 * p11) % n == 0
            ok &= (p10 * b00 + p11 * b10 - a10 * p00 - a11 * p10) % n == 0
            ok &= (p10 * b01 + p11 * b11 - a10 * p01 - a11 * p11) % n == 0
            if require_unit:
                ok &= np.gcd((p00 * p11 - p01 * p10) % n, n) == 1
            hits = np.flatnonzero(ok)
            if hits.size == 0:
                continue
            block = np.stack(
                [np.full(hits.size, p00), np.full(hits.size, p01), p10[hits], p11[hits]], axis=1
            ).astype(np.int64)
            if first_only:
                return block[:1], 1
            found += hits.size
            if sum(len(c) for c in chunks) < limit:
                chunks.append(block)
    if not chunks:
        return np.empty((0, 4), dtype=np.int64), found
    return np.concatenate(chunks)[:limit], found


def scan_intertwiners(
    A,
    B,
    n: int,
    *,
    require_unit: bool = True,
    first_only: bool = False,
    limit: int = 1 << 20,
    backend: str | None = None,
) -> tuple[np.ndarray, int]:
    """All 2x2 P mod n with ``P B = A P`` (optionally with unit determinant).

    Returns ``(rows, total)`` where rows holds up to ``limit`` solutions as
    ``(p00, p01, p10, p11)`` in lexicographic order and ``total`` counts all of
    them (with ``first_only`` the scan stops at the first hit).
    """
    A = np.ascontiguousarray(np.asarray(A, dtype=np.int64) % n)
    B = np.ascontiguousarray(np.asarray(B, dtype=np.int64) % n)
    if A.shape != (2, 2) or B.shape != (2, 2):
        raise ValueError("intertwiner scan is for 2x2 matrices")
    if _pick(backend) == "numba":
        rows, total = _scan_numba(A, B, n, require_unit, first_only, limit)
    else:
        rows, total = _scan_numpy(A, B, n, require_unit, first_only, limit)
    return np.asarray(rows), int(total)


# --------------------------------------------------------------------------
# period of u_{m+1} = c1 u_m + c2 u_{m-1}, u_0 = 0, u_1 = 1


_MAX_SCAN_MODULUS = 2**31


@njit(cache=True)
def _period_numba(c1, c2, n, bound):
    if n == 1:
        return 1
    u0, u1 = 0, 1
    for k in range(1, bound + 1):
        u0, u1 = u1, (c1 * u1 + c2 * u0) % n
        if u0 == 0 and u1 == 1:
            return k
    return -1


def _period_python(c1, c2, n, bound):
    if n == 1:
        return 1
    u0, u1 = 0, 1
    for k in range(1, bound + 1):
        u0, u1 = u1, (c1 * u1 + c2 * u0) % n
        if u0 == 0 and u1 == 1:
            return k
    return -1


def recurrence_period(c1: int, c2: int, n: int, backend: str | None = None) -> int:
    """Least k >= 1 with (u_k, u_{k+1}) = (0, 1) mod n.

    The caller guarantees c2 is a unit mod n, so the pair map is a
    permutation of at most n^2 states and the scan terminates.
    """
    c1, c2 = c1 % n, c2 % n
    bound = n * n
    if n > _MAX_SCAN_MODULUS:  # keeps c1*u + c2*v inside int64
        raise CapExceededError("recurrence scan modulus", n, _MAX_SCAN_MODULUS)
    if _pick(backend) == "numba":
        k = int(_period_numba(np.int64(c1), np.int64(c2), np.int64(n), np.int64(bound)))
    else:
        k = _period_python(c1, c2, n, bound)
    if k < 0:
        raise InconsistencyError(f"no period found within {bound} steps")
    return k
