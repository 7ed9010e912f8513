"""Integer helpers. Inputs are small, so everything is done by trial division."""
from functools import lru_cache
from typing import Dict


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> Dict[int, int]:
    """Prime factorisation of n >= 1 as {prime: exponent}."""
    factors: Dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def least_quadratic_nonresidue(p: int) -> int:
    if p == 2:
        raise ValueError("there are no quadratic non-residues mod 2")
    for e in range(2, p):
        if pow(e, (p - 1) // 2, p) == p - 1:
            return e
    raise ValueError(f"{p} is not an odd prime")


@lru_cache(maxsize=None)
def least_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    order = p - 1
    primes = list(factorize(order))
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in primes):
            return g
    raise ValueError(f"{p} is not prime")
