"""The Arnold and Fibonacci cat maps: periods, characteristic integers, product formulas."""

from __future__ import annotations

from dataclasses import dataclass

from .census import CyclePolynomial, orbit_counts
from .errors import InconsistencyError, PlateauError, PreconditionError
from .numtheory import is_prime, legendre
from .order import matrix_order, order_lift_profile
from .ring import ResidueMatrix

ARNOLD = ((2, 1), (1, 1))
FIBONACCI = ((1, 1), (1, 0))
MAPS = {"arnold": ARNOLD, "fibonacci": FIBONACCI}


def _matrix(name: str):
    try:
        return MAPS[name]
    except KeyError:
        raise ValueError(f"unknown cat map {name!r}; choose from {sorted(MAPS)}") from None


def period(name: str, n: int) -> int:
    """ord(M, n) for the named map."""
    return matrix_order(ResidueMatrix.of(_matrix(name), n))


@dataclass(frozen=True)
class CatMapConstants:
    p: int
    per_A: int
    per_F: int
    chi: int | None  # Legendre symbol (5/p), odd p only
    m_p: int | None  # odd p != 5
    n_p: int | None  # odd p != 5


def catmap_constants(p: int) -> CatMapConstants:
    """Measured per_A(p), per_F(p) and the characteristic integers m_p, n_p.

    m_p solves per_A(p) = (p - chi) / (2 m_p - (1 - chi)/2). n_p is half the
    number of Fibonacci orbits of length per_F(p)/2 on the p-lattice (those
    orbits enter the product formula with exponent 2 n_p).
    """
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    per_a, per_f = period("arnold", p), period("fibonacci", p)
    if p in (2, 5):
        return CatMapConstants(p, per_a, per_f, None, None, None)
    chi = legendre(5, p)
    num = (p - chi) + per_a * (1 - chi) // 2
    if num % (2 * per_a):
        raise InconsistencyError(f"per_A({p}) = {per_a} gives no integer m_p")
    m_p = num // (2 * per_a)
    if per_f % 2:
        raise InconsistencyError(f"per_F({p}) = {per_f} is odd")
    census = orbit_counts(ResidueMatrix.of(FIBONACCI, p))
    half = census.counts.get(per_f // 2, 0)
    if half % 2:
        raise InconsistencyError(f"{half} orbits of length {per_f // 2}: not an even count")
    return CatMapConstants(p, per_a, per_f, chi, m_p, half // 2)


@dataclass(frozen=True)
class ClosedForm:
    name: str
    p: int
    r: int
    factors: tuple[tuple[int, int], ...]  # in formula order, one entry per factor

    @property
    def polynomial(self) -> CyclePolynomial:
        return CyclePolynomial.from_pairs(self.factors)

    def unmerged_text(self) -> str:
        parts = []
        for m, e in self.factors:
            if e == 0:
                continue
            base = "(1-t)" if m == 1 else f"(1-t^{m})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "".join(parts)

    def __str__(self) -> str:
        return str(self.polynomial)


def _require_plateau_free(M, p: int, r: int) -> None:
    profile = order_lift_profile(M, p, r)
    if profile.shape != "no-plateau":
        raise PlateauError(
            f"orders mod {p}^i show a plateau ({profile.orders}); the generic product formula needs none"
        )


def catmap_closed_form(name: str, p: int, r: int) -> ClosedForm:
    """Product formula for Z_{p^r}(t) with every constant measured, not assumed."""
    M = _matrix(name)
    if not is_prime(p) or r < 1:
        raise PreconditionError(f"need a prime p and r >= 1, got p={p}, r={r}")
    factors: list[tuple[int, int]] = [(1, 1)]
    if name == "arnold":
        if p == 2:
            factors.append((3, 1))
            factors += [(3 * 2**l, 4 * 2**l) for l in range(r - 1)]
        elif p == 5:
            for l in range(r):
                factors += [(2 * 5**l, 2 * 5**l), (10 * 5**l, 2 * 5**l)]
        else:
            _require_plateau_free(M, p, r)
            per = period("arnold", p)
            for l in range(r):
                factors.append((per * p**l, (p * p - 1) // per * p**l))
    else:
        if p == 2:
            factors += [(3 * 2**l, 2**l) for l in range(r)]
        elif p == 5:
            for l in range(r):
                factors += [(4 * 5**l, 5**l), (20 * 5**l, 5**l)]
        else:
            _require_plateau_free(M, p, r)
            const = catmap_constants(p)
            per, n_p = const.per_F, const.n_p
            for l in range(r):
                factors.append((per // 2 * p**l, 2 * n_p))
                factors.append((per * p**l, (p * p - 1) // per * p**l - n_p))
    form = ClosedForm(name, p, r, tuple(factors))
    if form.polynomial.degree != p ** (2 * r):
        raise InconsistencyError(f"closed form has degree {form.polynomial.degree}, expected {p ** (2 * r)}")
    return form
