"""
Published constants used as golden values.

Tables are keyed by (s, M). The mod-p rows give (g_{0,1}, m_{0,1}, g_{1,1})
for the full p-adic inverse image of each possible mod-p image over Q,
where g_{1,1} = m_{1,1}.
"""
from typing import Dict, NamedTuple, Optional, Tuple

Shape = Tuple[int, int]


def _triangle(rows: Dict[int, Tuple[int, ...]]) -> Dict[Shape, int]:
    """Expand {s: values for M = max(s, 1) .. 5} into {(s, M): value}."""
    table = {}
    for s, values in rows.items():
        for offset, value in enumerate(values):
            table[(s, max(s, 1) + offset)] = value
    return table


# g_{s,M}(Q, 2), 0 <= s <= M <= 5
Q2_G_TABLE: Dict[Shape, int] = _triangle({
    0: (1, 1, 1, 2, 8),
    1: (1, 1, 1, 4, 16),
    2: (2, 4, 16, 64),
    3: (16, 64, 256),
    4: (128, 512),
    5: (2048,),
})

# m_{s,M}(Q, 2): equal to g for s <= 3 and to 2g for s >= 4
Q2_M_TABLE: Dict[Shape, int] = {
    (s, M): g * (2 if s >= 4 else 1) for (s, M), g in Q2_G_TABLE.items()
}

Q2_LEVEL_BOUND = 5
Q2_IMAGE_COUNT = 1208

# g_{s,M} of the 2-adic image X235l
X235L_G_TABLE: Dict[Shape, int] = _triangle({
    0: (1, 1, 1, 2, 8),
    1: (2, 2, 2, 4, 16),
    2: (8, 8, 16, 64),
    3: (32, 64, 256),
    4: (256, 1024),
    5: (4096,),
})

# least degree of a point of order 2^N on X235l
X235L_M_POINTS: Dict[Shape, int] = {(0, 4): 2, (0, 5): 8}

# shapes (s, N) listed at the least degree in which they can occur over Q
Q2_FIRST_APPEARANCE: Dict[int, Tuple[Shape, ...]] = {
    1: ((0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)),
    2: ((0, 4), (2, 2)),
    4: ((1, 4), (2, 3)),
    8: ((0, 5),),
    16: ((1, 5), (2, 4), (3, 3)),
}


class ModPConstants(NamedTuple):
    label: str
    g01: int
    m01: int
    g11: int
    example: str


def _rows(p: int, *rows) -> Tuple[ModPConstants, ...]:
    return tuple(ModPConstants(label if label != 'GL2' else f"GL2.{p}", *rest) for label, *rest in rows)


MOD_P_IMAGES: Dict[int, Tuple[ModPConstants, ...]] = {
    2: _rows(
        2,
        ('2Cs', 1, 1, 1, '315b2'),
        ('2B', 1, 1, 2, '69a1'),
        ('2Cn', 3, 3, 3, '196a1'),
        ('GL2', 3, 3, 6, '11a1'),
    ),
    3: _rows(
        3,
        ('3Cs.1.1', 1, 1, 2, '14a1'),
        ('3Cs', 2, 2, 4, '98a3'),
        ('3B.1.1', 1, 1, 6, '30a1'),
        ('3B.1.2', 1, 2, 6, '20a3'),
        ('3Ns', 4, 4, 8, '338d1'),
        ('3B', 2, 2, 12, '50b1'),
        ('3Nn', 8, 8, 16, '245a1'),
        ('GL2', 8, 8, 48, '11a1'),
    ),
    5: _rows(
        5,
        ('5Cs.1.1', 1, 1, 4, '11a1'),
        ('5Cs.1.3', 2, 2, 4, '275b2'),
        ('5Cs.4.1', 2, 2, 8, '99d2'),
        ('5Ns.2.1', 8, 8, 16, '6975a1'),
        ('5Cs', 4, 4, 16, '18176b2'),
        ('5B.1.1', 1, 1, 20, '11a3'),
        ('5B.1.2', 1, 4, 20, '11a2'),
        ('5B.1.3', 2, 4, 20, '50a1'),
        ('5B.1.4', 2, 2, 20, '50a3'),
        ('5Ns', 8, 8, 32, '608b1'),
        ('5B.4.1', 2, 2, 40, '99d1'),
        ('5B.4.2', 2, 4, 40, '99d3'),
        ('5Nn', 24, 24, 48, '675b1'),
        ('5B', 4, 4, 80, '338d1'),
        ('5S4', 24, 24, 96, '324b1'),
        ('GL2', 24, 24, 480, '14a1'),
    ),
    7: _rows(
        7,
        ('7Ns.2.1', 3, 6, 18, '2450ba1'),
        ('7Ns.3.1', 6, 12, 36, '2450a1'),
        ('7B.1.1', 1, 1, 42, '26b1'),
        ('7B.1.2', 3, 3, 42, '637a1'),
        ('7B.1.3', 1, 6, 42, '26b2'),
        ('7B.1.4', 1, 3, 42, '294a1'),
        ('7B.1.5', 3, 6, 42, '637a2'),
        ('7B.1.6', 1, 2, 42, '294a2'),
        ('7Ns', 12, 12, 72, '9225a1'),
        ('7B.6.1', 2, 2, 84, '208d1'),
        ('7B.6.2', 6, 6, 84, '5733d1'),
        ('7B.6.3', 2, 6, 84, '208d2'),
        ('7Nn', 48, 48, 96, '15341a1'),
        ('7B.2.1', 3, 3, 126, '162b1'),
        ('7B.2.3', 3, 6, 126, '162b3'),
        ('7B', 6, 6, 252, '162c1'),
        ('GL2', 48, 48, 2016, '11a1'),
    ),
    11: _rows(
        11,
        ('11B.1.4', 5, 5, 110, '121a2'),
        ('11B.1.5', 5, 5, 110, '121c2'),
        ('11B.1.6', 5, 10, 110, '121a1'),
        ('11B.1.7', 5, 10, 110, '121c1'),
        ('11B.10.4', 10, 10, 220, '1089f2'),
        ('11B.10.5', 10, 10, 220, '1089f1'),
        ('11Nn', 120, 120, 240, '232544f1'),
        ('GL2', 120, 120, 13200, '11a1'),
    ),
    13: _rows(
        13,
        ('13S4', 24, 72, 288, '152100g1'),
        ('13B.3.1', 3, 3, 468, '147b1'),
        ('13B.3.2', 3, 12, 468, '147b2'),
        ('13B.3.4', 6, 6, 468, '24843o1'),
        ('13B.3.7', 6, 12, 468, '24843o2'),
        ('13B.5.1', 4, 4, 624, '2890d1'),
        ('13B.5.2', 4, 12, 624, '2890d2'),
        ('13B.5.4', 12, 12, 624, '216320i1'),
        ('13B.4.1', 6, 6, 936, '147c1'),
        ('13B.4.2', 6, 12, 936, '147c2'),
        ('13B', 12, 12, 1872, '2450l1'),
        ('GL2', 168, 168, 26208, '11a1'),
    ),
    17: _rows(
        17,
        ('17B.4.2', 8, 8, 1088, '14450n1'),
        ('17B.4.6', 8, 16, 1088, '14450n2'),
        ('GL2', 288, 288, 78336, '11a1'),
    ),
    37: _rows(
        37,
        ('37B.8.1', 12, 12, 15984, '1225e1'),
        ('37B.8.2', 12, 36, 15984, '1225e2'),
        ('GL2', 1368, 1368, 1822176, '11a1'),
    ),
}


class RationalModPRow(NamedTuple):
    g01: int
    m01: int
    g11: int
    m11: int


# (g_{0,1}, m_{0,1}, g_{1,1}, m_{1,1}) over Q; primes not listed have surjective images
Q_MOD_P_CONSTANTS: Dict[int, RationalModPRow] = {
    2: RationalModPRow(1, 1, 1, 1),
    3: RationalModPRow(1, 1, 2, 2),
    5: RationalModPRow(1, 1, 4, 4),
    7: RationalModPRow(1, 1, 6, 18),
    11: RationalModPRow(5, 5, 10, 110),
    13: RationalModPRow(1, 3, 12, 288),
    17: RationalModPRow(8, 8, 1088, 1088),
    37: RationalModPRow(12, 12, 15984, 15984),
}


def q_mod_p_constants(p: int) -> RationalModPRow:
    if p in Q_MOD_P_CONSTANTS:
        return Q_MOD_P_CONSTANTS[p]
    full = (p - 1) * p * (p * p - 1)
    return RationalModPRow(p * p - 1, p * p - 1, full, full)


def mod_p_constants(label: str) -> Optional[ModPConstants]:
    """Published constants for a mod-p image label, or None if it is not tabulated."""
    for rows in MOD_P_IMAGES.values():
        for row in rows:
            if row.label == label:
                return row
    return None


def reference_tables(p: int) -> Tuple[Dict[Shape, int], Dict[Shape, int]]:
    """Published (g, m) tables over Q for the prime p."""
    if p == 2:
        return dict(Q2_G_TABLE), dict(Q2_M_TABLE)
    row = q_mod_p_constants(p)
    return {(0, 1): row.g01, (1, 1): row.g11}, {(0, 1): row.m01, (1, 1): row.m11}
