"""Elementary number theory on Python integers.

Factorisation, Moebius and Legendre symbols come from sympy; everything here
returns plain ``int`` so that callers never see sympy number types.
"""

from __future__ import annotations

import math
from functools import reduce

from sympy import divisors as _divisors
from sympy import factorint, isprime, n_order
from sympy.functions.combinatorial.numbers import legendre_symbol, mobius as _mobius

INFINITY = math.inf

__all__ = [
    "INFINITY",
    "crt_combine",
    "crt_split",
    "divisors",
    "euler_phi",
    "factorize",
    "is_prime",
    "lcm",
    "legendre",
    "mobius",
    "multiplicative_order",
    "p_adic_valuation",
    "parse_prime_power",
]


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"cannot factorise {n}")
    return {int(p): int(e) for p, e in factorint(n).items()}


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def divisors(n: int) -> list[int]:
    return [int(x) for x in _divisors(n)]


def mobius(n: int) -> int:
    return int(_mobius(n))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    return int(legendre_symbol(a % p, p))


def lcm(*values: int) -> int:
    return reduce(math.lcm, values, 1)


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result = result // p * (p - 1)
    return result


def crt_split(n: int) -> list[tuple[int, int]]:
    """Prime-power decomposition of n as ``[(p, r), ...]`` sorted by p.

    ``crt_split(1)`` is empty.
    """
    return sorted(factorize(n).items()) if n > 1 else []


def crt_combine(residues: dict[int, int] | list[tuple[int, int]]) -> int:
    """Combine ``{modulus: residue}`` for pairwise coprime moduli into one residue."""
    items = residues.items() if isinstance(residues, dict) else residues
    x, m = 0, 1
    for mod, r in items:
        if math.gcd(m, mod) != 1:
            raise ValueError(f"moduli {m} and {mod} are not coprime")
        # x + m*t = r (mod mod)
        t = ((r - x) * pow(m, -1, mod)) % mod if mod > 1 else 0
        x += m * t
        m *= mod
    return x % m


def p_adic_valuation(x: int, p: int) -> int | float:
    """v_p(x); returns ``INFINITY`` for x == 0."""
    if x == 0:
        return INFINITY
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def multiplicative_order(a: int, n: int) -> int:
    """Order of a in (Z/nZ)^x; 1 when n == 1. Raises if a is not a unit."""
    if n == 1:
        return 1
    a %= n
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    return int(n_order(a, n))


def parse_prime_power(text: str) -> tuple[int, int]:
    """Parse ``"p^r"`` (or a bare prime ``"p"``) into ``(p, r)``."""
    base, _, exp = text.strip().partition("^")
    try:
        p = int(base)
        r = int(exp) if exp else 1
    except ValueError:
        raise ValueError(f"not a prime power: {text!r}") from None
    if r < 1 or not is_prime(p):
        raise ValueError(f"not a prime power: {text!r}")
    return p, r
