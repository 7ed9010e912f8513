"""
Degree calculus

Degrees of definition of torsion subgroups, computed either directly from
stabilizers or by the level-reduction formulas for groups defined at a
lower level, together with the g/m constants, their aggregation over an
image catalog, and the divisibility bounds derived from them.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from divdeg.exceptions import ArgumentError, TableEntryMissing
from divdeg.utils.arithmetic import is_prime, valuation
from divdeg.utils.gl2 import MatrixGroup, lift_group, reduce_group
from divdeg.utils.torsion import (
    TorsionSubgroup,
    degree_index,
    enumerate_torsion_subgroups,
    subgroup_count,
    subgroup_label,
)

logger = logging.getLogger(__name__)

Shape = Tuple[int, int]


@dataclass(frozen=True)
class LevelConfig:
    """The prime p, the uniform level bound n(K, p) and a label for K."""
    p: int
    n: int
    base_field_label: str = 'Q'

    def __post_init__(self):
        if not is_prime(self.p):
            raise ArgumentError(f"{self.p} is not prime")
        if self.n < 1:
            raise ArgumentError(f"level bound must be at least 1, got {self.n}")


@dataclass
class CaseBreakdown:
    """
    Indices keyed by the subgroup they were computed for, at the given level.

    Above the declared level d each key T_d stands for every subgroup of
    shape (s, N) with that p^d-torsion; rows are labelled by the level-N
    subgroup generated by the same witness.
    """
    case: str
    level: int
    indices: Dict[TorsionSubgroup, int]
    s: int
    N: int

    def row_label(self, T: TorsionSubgroup) -> str:
        return subgroup_label(T.context.p, self.s, T.witness.x, T.witness.y)

    @property
    def subgroups_per_row(self) -> int:
        p = next(iter(self.indices)).context.p
        return subgroup_count(p, self.s, self.N) // len(self.indices)

    def rows(self) -> List[Tuple[str, int]]:
        return [(self.row_label(T), index) for T, index in self.indices.items()]


@dataclass
class Constants:
    g: int
    m: int
    indices: List[int]
    attained_by: str


@dataclass
class AggregateResult:
    g: int
    m: int
    labels: List[str]
    attained_by: str


@dataclass
class DegreeReport:
    label: str
    p: int
    shape: Shape
    case: str
    indices: List[Tuple[str, int]]
    g: int
    m: int
    g_bound: int
    m_bound: int
    notes: List[str] = field(default_factory=list)


def _check_shape(s: int, N: int):
    if N < 1 or not 0 <= s <= N:
        raise ArgumentError(f"invalid shape (s, N) = ({s}, {N}); need 0 <= s <= N and N >= 1")


def shape_label(p: int, s: int, N: int) -> str:
    if s == 0:
        return f"Z/{p ** N}"
    return f"Z/{p ** s} + Z/{p ** N}"


def group_at_level(G: MatrixGroup, N: int) -> MatrixGroup:
    """Reduce or lift G so that it lives at level N."""
    if N <= G.level:
        return reduce_group(G, N)
    return lift_group(G, N)


def direct_indices(G: MatrixGroup, s: int, N: int) -> Dict[TorsionSubgroup, int]:
    """Indices for every subgroup of shape (s, N), computed at level N without shortcuts."""
    _check_shape(s, N)
    G_N = group_at_level(G, N)
    return {T: degree_index(G_N, T) for T in enumerate_torsion_subgroups(G_N.context, s)}


def degree_via_cases(G: MatrixGroup, s: int, N: int) -> CaseBreakdown:
    """
    Indices [K(T):K] for subgroups T of shape (s, N).

    With d the declared level of G:
      (i)   N <= d: direct computation at level N;
      (ii)  s < d < N: index at level d of T_d, the p^d-torsion of T, times p^(2(N-d));
      (iii) d <= s, d < N: the single value |G_d| p^(2N+2s-4d).

    Returns:
        CaseBreakdown with indices keyed by the subgroup the value was computed for
    """
    _check_shape(s, N)
    d = G.declared_level
    p = G.p
    if N <= d:
        return CaseBreakdown('i', N, direct_indices(G, s, N), s, N)

    G_d = reduce_group(G, d)
    if s >= d:
        (full,) = enumerate_torsion_subgroups(G_d.context, d)
        return CaseBreakdown('iii', d, {full: G_d.order * p ** (2 * N + 2 * s - 4 * d)}, s, N)

    factor = p ** (2 * (N - d))
    indices = {T_d: degree_index(G_d, T_d) * factor for T_d in enumerate_torsion_subgroups(G_d.context, s)}
    return CaseBreakdown('ii', d, indices, s, N)


def _summarize(breakdown: CaseBreakdown) -> Constants:
    assert breakdown.indices, "every valid shape has at least one subgroup"
    values = list(breakdown.indices.values())
    least = min(values)
    attained_by = next(label for label, value in breakdown.rows() if value == least)
    return Constants(g=reduce(gcd, values), m=least, indices=values, attained_by=attained_by)


def g_m_constants(G: MatrixGroup, s: int, M: int) -> Constants:
    """gcd and minimum of the indices over all subgroups of shape (s, M)."""
    return _summarize(degree_via_cases(G, s, M))


def constants_table(G: MatrixGroup, max_level: int) -> Dict[Shape, Constants]:
    """g/m constants for every 0 <= s <= M <= max_level."""
    table = {}
    for M in range(1, max_level + 1):
        for s in range(M + 1):
            table[(s, M)] = g_m_constants(G, s, M)
    logger.info(f"Computed constants table up to level {max_level} for a group over {G.context}")
    return table


def closed_form_full_image(p: int, s: int, N: int) -> int:
    """Degree of any subgroup of shape (s, N) when the image is all of GL2(Z_p)."""
    _check_shape(s, N)
    if s == 0:
        return (p * p - 1) * p ** (2 * N - 2)
    return (p - 1) * (p * p - 1) * p ** (2 * N + 2 * s - 3)


def generic_prime_degree(p: int, s: int, N: int) -> int:
    """
    Degree of a subgroup of shape (s, N) over Q for primes where the image is surjective.

    By Serre's open image theorem this covers all but finitely many p for a
    fixed non-CM curve.
    """
    return closed_form_full_image(p, s, N)


def check_records(records: Sequence, config: LevelConfig):
    if not records:
        raise ArgumentError("catalog is empty")
    for record in records:
        if record.p != config.p:
            raise ArgumentError(f"image {record.label} is {record.p}-adic, expected p = {config.p}")
        if record.declared_level > config.n:
            raise ArgumentError(
                f"image {record.label} is declared at level {record.declared_level}, "
                f"above the level bound n = {config.n}"
            )


def merge_constants(per_image: Sequence[Tuple[str, int, int]]) -> AggregateResult:
    """Combine (label, g, m) triples: gcd of g values, min of m values."""
    labels = [label for label, _, _ in per_image]
    g = reduce(gcd, (g for _, g, _ in per_image))
    m = min(m for _, _, m in per_image)
    attained_by = next(label for label, _, value in per_image if value == m)
    return AggregateResult(g=g, m=m, labels=labels, attained_by=attained_by)


def aggregate_catalog(catalog: Sequence, config: LevelConfig, s: int, M: int) -> AggregateResult:
    """
    g_{s,M}(K, p) and m_{s,M}(K, p) over every image of the catalog.

    Args:
        catalog: ImageRecord list, all for the prime config.p
        config: Level configuration
        s, M: Shape of the torsion subgroups

    Returns:
        AggregateResult naming the image attaining the minimum
    """
    check_records(catalog, config)
    _check_shape(s, M)
    per_image = []
    for record in catalog:
        constants = g_m_constants(record.group, s, M)
        per_image.append((record.label, constants.g, constants.m))
    return merge_constants(per_image)


def image_tables(records: Sequence, max_level: int, use_celery: bool = False) -> List[Dict[Shape, Tuple[int, int]]]:
    """
    {(s, M): (g, m)} for every record, in record order.

    Each table is computed in-process or by the compute_constants_table
    Celery task.
    """
    if use_celery:
        from celery import group as celery_group

        from divdeg.tasks import compute_constants_table, task_payload

        job = celery_group(compute_constants_table.s(task_payload(record), max_level) for record in records)
        logger.info(f"Dispatching {len(records)} constants tables to Celery")
        results = [result.get() for result in job.apply_async().results]
        return [{(s, M): (g, m) for s, M, g, m in result['entries']} for result in results]

    return [
        {key: (c.g, c.m) for key, c in constants_table(record.group, max_level).items()}
        for record in records
    ]


def merge_tables(records: Sequence, tables: Sequence[Mapping[Shape, Tuple[int, int]]]) -> Dict[Shape, AggregateResult]:
    aggregated = {}
    for key in sorted(tables[0]):
        aggregated[key] = merge_constants(
            [(record.label, *table[key]) for record, table in zip(records, tables)]
        )
    return aggregated


def aggregate_tables(records: Sequence, config: LevelConfig, max_level: Optional[int] = None,
                     use_celery: bool = False) -> Dict[Shape, AggregateResult]:
    """Aggregated constants for every 0 <= s <= M <= max_level (default n)."""
    check_records(records, config)
    max_level = max_level or config.n
    return merge_tables(records, image_tables(records, max_level, use_celery))


def _lookup(table: Mapping[Shape, int], s: int, M: int) -> int:
    try:
        return int(table[(s, M)])
    except KeyError:
        raise TableEntryMissing(s, M)


def bound_entry(config: LevelConfig, s: int, N: int) -> Shape:
    """The table entry a bound for shape (s, N) is derived from."""
    n = config.n
    if s < n:
        return (s, min(N, n))
    return (n, n)


def divisibility_bound(table: Mapping[Shape, int], config: LevelConfig, s: int, N: int) -> int:
    """
    The bound on [K(T):K] for T of shape (s, N) derived from a g- or m-table.

    For s < n the entry at M = min(N, n) is multiplied by max(1, p^(2N-2n));
    for s >= n the entry (n, n) is multiplied by p^(2N+2s-4n).
    """
    _check_shape(s, N)
    p, n = config.p, config.n
    base = _lookup(table, *bound_entry(config, s, N))
    if s < n:
        return base * p ** max(0, 2 * N - 2 * n)
    return base * p ** (2 * N + 2 * s - 4 * n)


def first_appearance_table(m_table: Mapping[Shape, int], config: LevelConfig,
                           max_degree: int) -> Dict[int, List[Shape]]:
    """
    Group torsion shapes by the least degree in which they can occur.

    Only degrees up to max_degree are listed. Shapes within a degree are
    sorted by (s, N).
    """
    if max_degree < 1:
        raise ArgumentError(f"max degree must be positive, got {max_degree}")
    buckets: Dict[int, List[Shape]] = {}
    N = 1
    while True:
        degrees = {s: divisibility_bound(m_table, config, s, N) for s in range(N + 1)}
        for s, degree in degrees.items():
            if degree <= max_degree:
                buckets.setdefault(degree, []).append((s, N))
        # beyond n every bound grows with N
        if N >= config.n and min(degrees.values()) > max_degree:
            break
        N += 1
    return {degree: sorted(shapes) for degree, shapes in sorted(buckets.items())}


def max_two_power_order(d: int) -> int:
    """Largest N such that a point of order 2^N can occur in degree d over Q."""
    if d < 1:
        raise ArgumentError(f"degree must be positive, got {d}")
    return (valuation(d, 2) + 7) // 2


SMALL_RATIONAL_SHAPES = {(0, 1), (0, 2), (0, 3), (1, 1), (1, 2)}


def rational_two_adic_bound(s: int, N: int, exceptional: bool = False) -> int:
    """
    Closed form of the (Q, 2) divisibility bound for non-CM curves.

    The exceptional branch applies for s >= 4 to the two images whose
    constants carry a factor 3 instead of 2.
    """
    _check_shape(s, N)
    if (s, N) in SMALL_RATIONAL_SHAPES:
        return 1
    if s == N == 2:
        return 2
    if s == 0:
        return 2 ** (2 * N - 7)
    if exceptional and s >= 4:
        return 3 * 2 ** (2 * N + 2 * s - 9)
    return 2 ** (2 * N + 2 * s - 8)


def _image_bound(G: MatrixGroup, config: LevelConfig, s: int, N: int) -> Tuple[int, int]:
    entry = bound_entry(config, s, N)
    constants = g_m_constants(G, *entry)
    return (
        divisibility_bound({entry: constants.g}, config, s, N),
        divisibility_bound({entry: constants.m}, config, s, N),
    )


def build_degree_report(record, s: int, N: int, config: Optional[LevelConfig] = None) -> DegreeReport:
    """
    Per-subgroup degrees for one image, with its g/m constants and bounds.

    Args:
        record: ImageRecord
        s, N: Shape of the torsion subgroups
        config: Level configuration; the configured default for record.p if omitted
    """
    from divdeg.utils.config_loader import level_config_for

    config = config or level_config_for(record.p)
    check_records([record], config)
    breakdown = degree_via_cases(record.group, s, N)
    summary = _summarize(breakdown)
    g_bound, m_bound = _image_bound(record.group, config, s, N)

    notes = [f"case ({breakdown.case}) at level {breakdown.level}"]
    if breakdown.case != 'i':
        notes.append(
            f"each row stands for the {breakdown.subgroups_per_row} subgroups of shape ({s}, {N}) "
            f"sharing its {record.p}^{breakdown.level}-torsion"
        )
    if record.p == 2 and record.declared_level > 1:
        notes.append("level of definition for p = 2 is taken from the catalog")

    return DegreeReport(
        label=record.label,
        p=record.p,
        shape=(s, N),
        case=breakdown.case,
        indices=breakdown.rows(),
        g=summary.g,
        m=summary.m,
        g_bound=g_bound,
        m_bound=m_bound,
        notes=notes,
    )


def g_values(table: Mapping[Shape, object]) -> Dict[Shape, int]:
    return {key: value.g for key, value in table.items()}


def m_values(table: Mapping[Shape, object]) -> Dict[Shape, int]:
    return {key: value.m for key, value in table.items()}


def check_divisible_by(per_image: Mapping[Shape, int], reference: Mapping[Shape, int]) -> List[Shape]:
    """Entries where a computed value is not divisible by the reference value."""
    return [key for key, value in sorted(per_image.items())
            if key in reference and value % reference[key] != 0]
