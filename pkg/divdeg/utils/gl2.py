"""
Arithmetic in GL2(Z/p^N Z)

This module provides the exact matrix arithmetic and the group-theoretic
primitives everything else is built on: closure of a generating set,
reduction and lifting between levels, the order formulas, and the
level-of-definition check.

Matrices act on column vectors from the left. Group elements are held as an
int64 numpy array of shape (n, 4) with rows (a, b, c, d), and membership is
answered through a sorted array of packed keys ((a*m + b)*m + c)*m + d.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np

from divdeg.exceptions import ArgumentError, ResourceCapExceeded, StructuralError
from divdeg.utils.arithmetic import factorize, is_prime, least_primitive_root
from divdeg.utils.config_loader import get_closure_cap

logger = logging.getLogger(__name__)

MAX_MODULUS = 2 ** 31
# m**4 must fit a signed 64-bit key
MAX_ENUMERABLE_MODULUS = 55108


@dataclass(frozen=True)
class PrimePower:
    """The ring Z/p^N Z, identified by (p, N)."""
    p: int
    exponent: int
    modulus: int = field(init=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ArgumentError(f"{self.p} is not prime")
        if self.exponent < 1:
            raise ArgumentError(f"exponent must be at least 1, got {self.exponent}")
        modulus = self.p ** min(self.exponent, MAX_MODULUS.bit_length())
        if modulus > MAX_MODULUS:
            raise ArgumentError(f"modulus {self.p}^{self.exponent} exceeds 2^31")
        object.__setattr__(self, 'modulus', modulus)

    def at_level(self, k: int) -> 'PrimePower':
        return PrimePower(self.p, k)

    def __str__(self):
        return f"Z/{self.p}^{self.exponent}"


@dataclass(frozen=True)
class ResidueMatrix:
    """An invertible matrix [[a, b], [c, d]] over Z/p^N Z."""
    a: int
    b: int
    c: int
    d: int
    context: PrimePower

    def __post_init__(self):
        m = self.context.modulus
        for name in ('a', 'b', 'c', 'd'):
            object.__setattr__(self, name, int(getattr(self, name)) % m)
        if self.det % self.context.p == 0:
            raise ArgumentError(
                f"matrix {self.rows()} is not invertible mod {m} (determinant {self.det})"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], context: PrimePower) -> 'ResidueMatrix':
        (a, b), (c, d) = rows
        return cls(a, b, c, d, context)

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.context.modulus

    @property
    def key(self) -> int:
        m = self.context.modulus
        return ((self.a * m + self.b) * m + self.c) * m + self.d

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]

    def is_identity(self) -> bool:
        return self.entries() == (1, 0, 0, 1)

    def __matmul__(self, other: 'ResidueMatrix') -> 'ResidueMatrix':
        return mat_mul(self, other)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.context.modulus}"


def _check_same_context(*matrices: ResidueMatrix) -> PrimePower:
    context = matrices[0].context
    for matrix in matrices[1:]:
        if matrix.context != context:
            raise StructuralError(f"cannot combine matrices over {context} and {matrix.context}")
    return context


def identity(context: PrimePower) -> ResidueMatrix:
    return ResidueMatrix(1, 0, 0, 1, context)


def mat_mul(A: ResidueMatrix, B: ResidueMatrix) -> ResidueMatrix:
    context = _check_same_context(A, B)
    return ResidueMatrix(
        A.a * B.a + A.b * B.c,
        A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c,
        A.c * B.b + A.d * B.d,
        context,
    )


def mat_inv(A: ResidueMatrix) -> ResidueMatrix:
    m = A.context.modulus
    inv_det = pow(A.det, -1, m)
    return ResidueMatrix(A.d * inv_det, -A.b * inv_det, -A.c * inv_det, A.a * inv_det, A.context)


def mat_pow(A: ResidueMatrix, e: int) -> ResidueMatrix:
    if e < 0:
        A, e = mat_inv(A), -e
    result = identity(A.context)
    base = A
    while e:
        if e & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        e >>= 1
    return result


def transpose(A: ResidueMatrix) -> ResidueMatrix:
    return ResidueMatrix(A.a, A.c, A.b, A.d, A.context)


def reduce_matrix(A: ResidueMatrix, k: int) -> ResidueMatrix:
    if not 1 <= k <= A.context.exponent:
        raise ArgumentError(f"cannot reduce a matrix over {A.context} to level {k}")
    return ResidueMatrix(A.a, A.b, A.c, A.d, A.context.at_level(k))


def lift_matrix(A: ResidueMatrix, N: int) -> ResidueMatrix:
    """The entry-wise lift of A to level N (entries are kept as integers in [0, p^k))."""
    if N < A.context.exponent:
        raise ArgumentError(f"cannot lift a matrix over {A.context} to the lower level {N}")
    return ResidueMatrix(A.a, A.b, A.c, A.d, A.context.at_level(N))


# Vectorized helpers over (n, 4) int64 arrays

def _as_row(A: ResidueMatrix) -> np.ndarray:
    return np.array(A.entries(), dtype=np.int64)


def pack_rows(rows: np.ndarray, m: int) -> np.ndarray:
    return ((rows[:, 0] * m + rows[:, 1]) * m + rows[:, 2]) * m + rows[:, 3]


def left_multiply_rows(g: np.ndarray, rows: np.ndarray, m: int) -> np.ndarray:
    a, b, c, d = (int(x) for x in g)
    out = np.empty_like(rows)
    out[:, 0] = (a * rows[:, 0] + b * rows[:, 2]) % m
    out[:, 1] = (a * rows[:, 1] + b * rows[:, 3]) % m
    out[:, 2] = (c * rows[:, 0] + d * rows[:, 2]) % m
    out[:, 3] = (c * rows[:, 1] + d * rows[:, 3]) % m
    return out


def in_sorted(keys: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    if sorted_keys.size == 0:
        return np.zeros(keys.shape, dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos = np.minimum(pos, sorted_keys.size - 1)
    return sorted_keys[pos] == keys


def _closure_rows(generators: Sequence[ResidueMatrix], cap: int):
    """
    Breadth-first closure of the generators from the identity.

    Returns:
        (rows, sorted_keys): the elements in insertion order and their
        sorted packed keys
    """
    context = generators[0].context
    m = context.modulus
    if m > MAX_ENUMERABLE_MODULUS:
        raise ArgumentError(f"modulus {m} is too large to enumerate group elements")

    gen_rows = [_as_row(g) for g in generators]
    start = np.array([[1 % m, 0, 0, 1 % m]], dtype=np.int64)
    seen = pack_rows(start, m)
    chunks = [start]
    frontier = start
    total = 1

    while frontier.shape[0]:
        layer_rows = []
        layer_keys = np.empty(0, dtype=np.int64)
        for g in gen_rows:
            products = left_multiply_rows(g, frontier, m)
            keys, first = np.unique(pack_rows(products, m), return_index=True)
            fresh = ~in_sorted(keys, seen) & ~in_sorted(keys, layer_keys)
            if not fresh.any():
                continue
            layer_rows.append(products[first[fresh]])
            layer_keys = np.sort(np.concatenate([layer_keys, keys[fresh]]))
            if total + layer_keys.size > cap:
                raise ResourceCapExceeded(cap, projected=total + layer_keys.size)

        if not layer_rows:
            break
        frontier = np.concatenate(layer_rows)
        # deterministic order inside a layer
        frontier = frontier[np.argsort(pack_rows(frontier, m), kind='stable')]
        chunks.append(frontier)
        total += frontier.shape[0]
        seen = np.sort(np.concatenate([seen, layer_keys]))
        logger.debug(f"Closure layer added {frontier.shape[0]} elements ({total} so far)")

    return np.concatenate(chunks), seen


class MatrixGroup:
    """
    A subgroup of GL2(Z/p^N Z).

    The element set is enumerated on first use. A group built from rows
    alone (a stabilizer, a reduction) derives a generating set on demand.
    """

    def __init__(self, context: PrimePower, generators: Optional[Sequence[ResidueMatrix]] = None,
                 declared_level: Optional[int] = None, rows: Optional[np.ndarray] = None):
        if generators is None and rows is None:
            raise ArgumentError("a matrix group needs generators or an element set")
        if generators is not None:
            if not generators:
                raise ArgumentError("generator list is empty")
            for g in generators:
                if g.context != context:
                    raise StructuralError(f"generator {g} does not live over {context}")
            generators = list(generators)
        if declared_level is None:
            declared_level = context.exponent
        if not 1 <= declared_level <= context.exponent:
            raise ArgumentError(
                f"declared level {declared_level} is outside 1..{context.exponent}"
            )
        self.context = context
        self.declared_level = declared_level
        self._generators = generators
        self._rows = None
        self._keys = None
        if rows is not None:
            rows = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
            self._rows = rows
            self._keys = np.sort(pack_rows(rows, context.modulus))

    @classmethod
    def from_rows(cls, context: PrimePower, rows: np.ndarray, declared_level: Optional[int] = None,
                  generators: Optional[Sequence[ResidueMatrix]] = None) -> 'MatrixGroup':
        return cls(context, generators=generators, declared_level=declared_level, rows=rows)

    @property
    def level(self) -> int:
        return self.context.exponent

    @property
    def p(self) -> int:
        return self.context.p

    @property
    def is_enumerated(self) -> bool:
        return self._rows is not None

    def enumerate(self) -> 'MatrixGroup':
        if self._rows is None:
            self._rows, self._keys = _closure_rows(self._generators, get_closure_cap())
            logger.info(
                f"Enumerated group of order {self._rows.shape[0]} over {self.context} "
                f"from {len(self._generators)} generators"
            )
        return self

    @property
    def rows(self) -> np.ndarray:
        return self.enumerate()._rows

    @property
    def keys(self) -> np.ndarray:
        return self.enumerate()._keys

    @property
    def order(self) -> int:
        return int(self.rows.shape[0])

    @property
    def generators(self) -> List[ResidueMatrix]:
        if self._generators is None:
            self._generators = self._derive_generators()
        return self._generators

    def _derive_generators(self) -> List[ResidueMatrix]:
        # Greedy: add any element outside the subgroup generated so far.
        cap = get_closure_cap()
        found: List[ResidueMatrix] = []
        covered = np.empty(0, dtype=np.int64)
        for row, key in zip(self._rows, pack_rows(self._rows, self.context.modulus)):
            if covered.size >= self._rows.shape[0]:
                break
            if in_sorted(np.array([key]), covered)[0]:
                continue
            found.append(self._matrix(row))
            covered = _closure_rows(found, cap)[1]
        return found or [identity(self.context)]

    def _matrix(self, row) -> ResidueMatrix:
        return ResidueMatrix(*(int(x) for x in row), self.context)

    def contains(self, A: ResidueMatrix) -> bool:
        if A.context != self.context:
            raise StructuralError(f"{A} does not live over {self.context}")
        if A.entries() == identity(self.context).entries():
            return True
        if self._rows is None and self._generators and any(A == g for g in self._generators):
            return True
        return bool(in_sorted(np.array([A.key], dtype=np.int64), self.keys)[0])

    def __contains__(self, A: ResidueMatrix) -> bool:
        return self.contains(A)

    def elements(self) -> Iterator[ResidueMatrix]:
        for row in self.rows:
            yield self._matrix(row)

    def same_elements(self, other: 'MatrixGroup') -> bool:
        return self.context == other.context and np.array_equal(self.keys, other.keys)

    def __repr__(self):
        order = self.order if self.is_enumerated else '?'
        return f"<MatrixGroup over {self.context}, level {self.declared_level}, order {order}>"


def group_closure(gens: Sequence[ResidueMatrix], declared_level: Optional[int] = None) -> MatrixGroup:
    """
    Enumerate the group generated by gens.

    Args:
        gens: Nonempty list of matrices over one context
        declared_level: Level at which the group is asserted to be defined

    Returns:
        An enumerated MatrixGroup

    Raises:
        ResourceCapExceeded: If the closure grows past the configured cap
    """
    if not gens:
        raise ArgumentError("cannot close an empty generator list")
    context = _check_same_context(*gens)
    return MatrixGroup(context, gens, declared_level=declared_level).enumerate()


def _unique_matrices(matrices: Iterable[ResidueMatrix]) -> List[ResidueMatrix]:
    seen = set()
    out = []
    for A in matrices:
        if A.key not in seen:
            seen.add(A.key)
            out.append(A)
    return out


def reduce_group(G: MatrixGroup, k: int) -> MatrixGroup:
    if not 1 <= k <= G.level:
        raise ArgumentError(f"cannot reduce a group over {G.context} to level {k}")
    if k == G.level:
        return G
    target = G.context.at_level(k)
    generators = _unique_matrices(reduce_matrix(g, k) for g in G.generators)
    declared = min(G.declared_level, k)
    if not G.is_enumerated:
        return MatrixGroup(target, generators, declared_level=declared)
    reduced = G.rows % target.modulus
    _, first = np.unique(pack_rows(reduced, target.modulus), return_index=True)
    return MatrixGroup.from_rows(target, reduced[first], declared_level=declared, generators=generators)


def kernel_generators(context: PrimePower, d: int) -> List[ResidueMatrix]:
    """
    Generators of the kernel of reduction GL2(Z/p^N) -> GL2(Z/p^d).

    Returns Id + p^j E for d <= j < N and E each of the four matrix units.
    """
    if not 1 <= d < context.exponent:
        raise ArgumentError(f"kernel level {d} must satisfy 1 <= d < {context.exponent}")
    out = []
    for j in range(d, context.exponent):
        q = context.p ** j
        out += [
            ResidueMatrix(1, q, 0, 1, context),
            ResidueMatrix(1, 0, q, 1, context),
            ResidueMatrix(1 + q, 0, 0, 1, context),
            ResidueMatrix(1, 0, 0, 1 + q, context),
        ]
    return out


def lift_group(G: MatrixGroup, N: int) -> MatrixGroup:
    """
    The full inverse image of G under reduction GL2(Z/p^N) -> GL2(Z/p^k).

    Args:
        G: Group at level k
        N: Target level, N >= k

    Raises:
        ResourceCapExceeded: If |G| * p^(4(N-k)) exceeds the closure cap
    """
    k = G.level
    if N < k:
        raise ArgumentError(f"cannot lift a group at level {k} to level {N}")
    if N == k:
        return G
    projected = G.order * G.p ** (4 * (N - k))
    cap = get_closure_cap()
    if projected > cap:
        raise ResourceCapExceeded(cap, projected=projected, what=f"lift to level {N}")
    target = G.context.at_level(N)
    generators = [lift_matrix(g, N) for g in G.generators] + kernel_generators(target, k)
    return MatrixGroup(target, generators, declared_level=G.declared_level)


def gl2_order(p: int, N: int) -> int:
    return (p - 1) * (p * p - 1) * p ** (4 * N - 3)


def gl2_order_composite(M: int) -> int:
    if M < 1:
        raise ArgumentError(f"modulus must be positive, got {M}")
    order = 1
    for p, e in factorize(M).items():
        order *= gl2_order(p, e)
    return order


def check_defined_at_level(G: MatrixGroup, n: int) -> bool:
    """
    Whether G, given at level n+1, contains the kernel of reduction to level n.

    For odd p this decides whether the p-adic group is defined at level n.
    For p = 2 the answer is advisory only.
    """
    if G.level != n + 1:
        raise ArgumentError(f"group must be given at level {n + 1}, got level {G.level}")
    return all(G.contains(x) for x in kernel_generators(G.context, n))


def minimal_defining_level(G: MatrixGroup) -> int:
    """Least k such that G (at its own level) contains the kernel of reduction to level k."""
    for k in range(1, G.level):
        if all(G.contains(x) for x in kernel_generators(G.context, k)):
            return k
    return G.level


def standard_gl2_generators(context: PrimePower) -> List[ResidueMatrix]:
    zeta = least_primitive_root(context.p)
    gens = [
        ResidueMatrix(1, 1, 0, 1, context),
        ResidueMatrix(1, 0, 1, 1, context),
    ]
    if zeta != 1:
        gens.append(ResidueMatrix(zeta, 0, 0, 1, context))
    if context.exponent > 1:
        gens += kernel_generators(context, 1)
    return gens


def full_gl2(context: PrimePower) -> MatrixGroup:
    return MatrixGroup(context, standard_gl2_generators(context), declared_level=1)


def conjugate_group(G: MatrixGroup, g: ResidueMatrix) -> MatrixGroup:
    """The group g G g^-1."""
    g_inv = mat_inv(g)
    generators = [mat_mul(mat_mul(g, h), g_inv) for h in G.generators]
    if not G.is_enumerated:
        return MatrixGroup(G.context, generators, declared_level=G.declared_level)
    m = G.context.modulus
    rows = left_multiply_rows(_as_row(g), G.rows, m)
    # right multiplication by g_inv, via transposes
    t = rows[:, [0, 2, 1, 3]]
    t = left_multiply_rows(_as_row(transpose(g_inv)), t, m)
    rows = t[:, [0, 2, 1, 3]]
    return MatrixGroup.from_rows(G.context, rows, declared_level=G.declared_level, generators=generators)
