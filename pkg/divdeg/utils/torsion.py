"""
Torsion subgroups of type Z/p^s + Z/p^N inside (Z/p^N Z)^2 and their
pointwise stabilizers.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import FrozenSet, List, Tuple

import numpy as np

from divdeg.exceptions import ArgumentError, ResourceCapExceeded, StructuralError
from divdeg.utils.config_loader import get_closure_cap
from divdeg.utils.gl2 import MatrixGroup, PrimePower, in_sorted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorsionPoint:
    x: int
    y: int
    context: PrimePower

    def __post_init__(self):
        m = self.context.modulus
        object.__setattr__(self, 'x', int(self.x) % m)
        object.__setattr__(self, 'y', int(self.y) % m)

    @property
    def key(self) -> int:
        return self.x * self.context.modulus + self.y

    def __str__(self):
        return f"({self.x},{self.y})"


def point_order(v: TorsionPoint) -> int:
    m = v.context.modulus
    return m // gcd(m, gcd(v.x, v.y))


def _subgroup_keys(context: PrimePower, s: int, x: int, y: int) -> Tuple[int, ...]:
    """Sorted keys of E[p^s] + <(x, y)>."""
    m = context.modulus
    step = context.p ** (context.exponent - s)
    torsion = [(i * step, j * step) for i in range(context.p ** s) for j in range(context.p ** s)]
    keys = set()
    for k in range(m):
        px, py = k * x % m, k * y % m
        for tx, ty in torsion:
            keys.add((px + tx) % m * m + (py + ty) % m)
    return tuple(sorted(keys))


@dataclass(frozen=True)
class TorsionSubgroup:
    """
    The subgroup E[p^s] + <P> of (Z/p^N Z)^2, with P of exact order p^N.

    Two instances compare equal exactly when their element sets agree;
    the witness does not take part in comparisons.
    """
    context: PrimePower
    s: int
    witness: TorsionPoint = field(compare=False)
    canonical_key: Tuple[int, ...] = field(repr=False)

    @property
    def N(self) -> int:
        return self.context.exponent

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.s, self.N)

    @property
    def order(self) -> int:
        return len(self.canonical_key)

    @cached_property
    def elements(self) -> FrozenSet[TorsionPoint]:
        m = self.context.modulus
        return frozenset(TorsionPoint(k // m, k % m, self.context) for k in self.canonical_key)

    def contains(self, v: TorsionPoint) -> bool:
        keys = self.canonical_key
        pos = np.searchsorted(keys, v.key)
        return pos < len(keys) and keys[pos] == v.key

    @property
    def label(self) -> str:
        return subgroup_label(self.context.p, self.s, self.witness.x, self.witness.y)

    def __str__(self):
        return self.label


def subgroup_label(p: int, s: int, x: int, y: int) -> str:
    """E[p^s]+<(x,y)>, or <(x,y)> when s = 0."""
    point = f"<({x},{y})>"
    if s == 0:
        return point
    return f"E[{p}^{s}]+{point}"


def make_torsion_subgroup(context: PrimePower, s: int, witness) -> TorsionSubgroup:
    if not 0 <= s <= context.exponent:
        raise ArgumentError(f"s = {s} is outside 0..{context.exponent}")
    if not isinstance(witness, TorsionPoint):
        witness = TorsionPoint(witness[0], witness[1], context)
    if witness.context != context:
        raise StructuralError(f"point {witness} does not live over {context}")
    if point_order(witness) != context.modulus:
        raise ArgumentError(f"point {witness} does not have exact order {context.modulus}")
    return TorsionSubgroup(context, s, witness, _subgroup_keys(context, s, witness.x, witness.y))


@lru_cache(maxsize=256)
def _enumerate(context: PrimePower, s: int) -> Tuple[TorsionSubgroup, ...]:
    m, p = context.modulus, context.p
    found = []
    covered = set()
    for x in range(m):
        for y in range(m):
            if x % p == 0 and y % p == 0:
                continue
            key = x * m + y
            if key in covered:
                continue
            subgroup = make_torsion_subgroup(context, s, TorsionPoint(x, y, context))
            covered.update(subgroup.canonical_key)
            found.append(subgroup)
    found.sort(key=lambda t: t.canonical_key)
    logger.debug(f"Found {len(found)} subgroups of shape ({s}, {context.exponent}) over {context}")
    return tuple(found)


def enumerate_torsion_subgroups(context: PrimePower, s: int) -> List[TorsionSubgroup]:
    """
    One representative for every subgroup of type Z/p^s + Z/p^N.

    Witnesses are scanned in lexicographic order and the first witness of
    each subgroup is kept. The result is sorted by canonical key.
    """
    if not 0 <= s <= context.exponent:
        raise ArgumentError(f"s = {s} is outside 0..{context.exponent}")
    return list(_enumerate(context, s))


def subgroup_count(p: int, s: int, N: int) -> int:
    """Number of subgroups of type Z/p^s + Z/p^N in (Z/p^N Z)^2."""
    if s == N:
        return 1
    return (p + 1) * p ** (N - s - 1)


def truncate_subgroup(T: TorsionSubgroup, d: int) -> TorsionSubgroup:
    """
    T_d = T intersected with E[p^d], written at level d.

    E[p^d] is identified with (Z/p^d Z)^2 by dividing by p^(N-d), so T_d
    becomes E[p^min(s,d)] + <P mod p^d>.
    """
    if not 1 <= d <= T.N:
        raise ArgumentError(f"cannot truncate a level-{T.N} subgroup to level {d}")
    if d == T.N:
        return T
    target = T.context.at_level(d)
    return make_torsion_subgroup(target, min(T.s, d), (T.witness.x, T.witness.y))


def pointwise_stabilizer(G: MatrixGroup, T: TorsionSubgroup) -> MatrixGroup:
    """The matrices of G fixing every point of T: M P = P and M = Id mod p^s."""
    if G.context != T.context:
        raise StructuralError(f"group over {G.context} cannot act on a subgroup over {T.context}")
    rows = G.rows
    m = G.context.modulus
    x, y = T.witness.x, T.witness.y
    mask = ((rows[:, 0] * x + rows[:, 1] * y) % m == x) & ((rows[:, 2] * x + rows[:, 3] * y) % m == y)
    if T.s > 0:
        q = G.p ** T.s
        reduced = rows % q
        mask &= (reduced[:, 0] == 1 % q) & (reduced[:, 1] == 0) & (reduced[:, 2] == 0) & (reduced[:, 3] == 1 % q)
    return MatrixGroup.from_rows(G.context, rows[mask])


def orbit_index(G: MatrixGroup, T: TorsionSubgroup) -> int:
    """
    |G| / |H_T| computed as the orbit size of (P, Id mod p^s) under G.

    Does not enumerate G, so it works for groups above the closure cap as
    long as the orbit itself fits.
    """
    if G.context != T.context:
        raise StructuralError(f"group over {G.context} cannot act on a subgroup over {T.context}")
    m = G.context.modulus
    q = G.p ** T.s
    if (m * m) * q ** 4 >= 2 ** 63:
        raise ArgumentError(f"orbit states over {G.context} with s = {T.s} do not fit 64-bit keys")

    def pack(states):
        point = states[:, 0] * m + states[:, 1]
        matrix = ((states[:, 2] * q + states[:, 3]) * q + states[:, 4]) * q + states[:, 5]
        return point * q ** 4 + matrix

    cap = get_closure_cap()
    gens = [np.array(g.entries(), dtype=np.int64) for g in G.generators]
    start = np.array([[T.witness.x, T.witness.y, 1 % q, 0, 0, 1 % q]], dtype=np.int64)
    seen = pack(start)
    frontier = start
    while frontier.shape[0]:
        layer = []
        layer_keys = np.empty(0, dtype=np.int64)
        for a, b, c, d in gens:
            out = np.empty_like(frontier)
            out[:, 0] = (a * frontier[:, 0] + b * frontier[:, 1]) % m
            out[:, 1] = (c * frontier[:, 0] + d * frontier[:, 1]) % m
            out[:, 2] = (a * frontier[:, 2] + b * frontier[:, 4]) % q
            out[:, 3] = (a * frontier[:, 3] + b * frontier[:, 5]) % q
            out[:, 4] = (c * frontier[:, 2] + d * frontier[:, 4]) % q
            out[:, 5] = (c * frontier[:, 3] + d * frontier[:, 5]) % q
            keys, first = np.unique(pack(out), return_index=True)
            fresh = ~in_sorted(keys, seen) & ~in_sorted(keys, layer_keys)
            if fresh.any():
                layer.append(out[first[fresh]])
                layer_keys = np.sort(np.concatenate([layer_keys, keys[fresh]]))
        if not layer:
            break
        frontier = np.concatenate(layer)
        seen = np.sort(np.concatenate([seen, layer_keys]))
        if seen.size > cap:
            raise ResourceCapExceeded(cap, projected=int(seen.size), what="orbit enumeration")
    return int(seen.size)


def degree_index(G: MatrixGroup, T: TorsionSubgroup) -> int:
    """
    The degree [K(T):K] = |G| / |H_T|.

    Falls back to orbit enumeration when G itself is too large to enumerate.
    """
    try:
        order = G.order
    except ResourceCapExceeded as e:
        logger.warning(f"{e}; computing the index of {T.label} by orbit enumeration")
        return orbit_index(G, T)
    return order // pointwise_stabilizer(G, T).order
