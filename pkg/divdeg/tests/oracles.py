"""
Brute-force references for the tests.

Nothing here shares code with the package: subgroups of (Z/m)^2 come from
Hermite normal forms of the lattices between mZ^2 and Z^2, and group
orders from listing every invertible matrix.
"""
import random
from math import gcd


def invertible_matrices(p, N):
    m = p ** N
    return [
        (a, b, c, d)
        for a in range(m) for b in range(m) for c in range(m) for d in range(m)
        if (a * d - b * c) % p != 0
    ]


def point_order(x, y, m):
    return m // gcd(m, gcd(x, y))


def all_subgroups(p, N):
    """
    Every subgroup of (Z/p^N)^2 as a frozenset of (x, y) pairs.

    A lattice between mZ^2 and Z^2 has a unique basis (a, b), (0, d) with
    a | m, d | m, 0 <= b < d, and contains (m, 0) iff d divides (m/a) b.
    """
    m = p ** N
    divisors = [p ** k for k in range(N + 1)]
    subgroups = []
    for a in divisors:
        for d in divisors:
            for b in range(d):
                if (m // a) * b % d:
                    continue
                elements = frozenset(
                    ((i * a) % m, (i * b + j * d) % m)
                    for i in range(m // a) for j in range(m // d)
                )
                subgroups.append(elements)
    return subgroups


def subgroups_of_type(p, s, N):
    """Subgroups isomorphic to Z/p^s + Z/p^N."""
    m = p ** N
    return [
        H for H in all_subgroups(p, N)
        if len(H) == p ** (N + s) and any(point_order(x, y, m) == m for x, y in H)
    ]


def subgroup_key(H, m):
    return tuple(sorted(x * m + y for x, y in H))


def stabilizer_order(elements, points, m):
    """Number of matrices among `elements` fixing every point."""
    count = 0
    for a, b, c, d in elements:
        if all((a * x + b * y) % m == x and (c * x + d * y) % m == y for x, y in points):
            count += 1
    return count


def random_invertible(p, N, rng: random.Random):
    m = p ** N
    while True:
        a, b, c, d = (rng.randrange(m) for _ in range(4))
        if (a * d - b * c) % p:
            return a, b, c, d
