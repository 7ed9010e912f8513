"""
Unit tests for the degree calculus

Covers the case formulas, the g/m constants, catalog aggregation and the
divisibility bounds, checked against the published tables.
"""
import re
from unittest import skipUnless

from django.test import SimpleTestCase

from divdeg.exceptions import ArgumentError, CatalogNotFound, TableEntryMissing
from divdeg.utils.catalog import builtin, builtin_catalog, parse_catalog_file
from divdeg.utils.config_loader import find_catalog_file
from divdeg.utils.gl2 import PrimePower, full_gl2, lift_group
from divdeg.utils.degrees import (
    LevelConfig,
    aggregate_catalog,
    aggregate_tables,
    build_degree_report,
    check_divisible_by,
    closed_form_full_image,
    constants_table,
    degree_via_cases,
    direct_indices,
    divisibility_bound,
    first_appearance_table,
    g_m_constants,
    g_values,
    generic_prime_degree,
    image_tables,
    max_two_power_order,
    m_values,
    merge_constants,
    rational_two_adic_bound,
    shape_label,
)
from divdeg.utils.reference import (
    Q2_FIRST_APPEARANCE,
    Q2_G_TABLE,
    Q2_M_TABLE,
    X235L_G_TABLE,
    X235L_M_POINTS,
    q_mod_p_constants,
    reference_tables,
)
from divdeg.utils.torsion import degree_index, make_torsion_subgroup

Q2 = LevelConfig(2, 5)


def external_rzb_catalog():
    """rzb.cat from DIVDEG_CATALOG_DIR, or None when it is not installed."""
    try:
        return find_catalog_file('rzb')
    except CatalogNotFound:
        return None


class CaseFormulaTest(SimpleTestCase):
    """
    Test cases for degree_via_cases against direct computation
    """

    def test_closed_form_values(self):
        self.assertEqual(closed_form_full_image(2, 0, 1), 3)
        self.assertEqual(closed_form_full_image(2, 1, 1), 6)
        self.assertEqual(closed_form_full_image(3, 1, 2), 432)
        self.assertEqual(closed_form_full_image(5, 0, 1), 24)
        self.assertEqual(generic_prime_degree(11, 0, 1), 120)

    def test_full_image_brute_force(self):
        """Test every subgroup index of GL2(Z/p^N) against the closed form"""
        for p, N in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)]:
            G = full_gl2(PrimePower(p, N))
            for s in range(N + 1):
                values = set(direct_indices(G, s, N).values())
                self.assertEqual(values, {closed_form_full_image(p, s, N)}, f"({s}, {N}) at p = {p}")

    def test_full_image_by_cases(self):
        """Test that the case formulas reproduce the closed form above level 1"""
        for p in (2, 3, 5):
            G = full_gl2(PrimePower(p, 1))
            for N in range(1, 5):
                for s in range(N + 1):
                    values = set(degree_via_cases(G, s, N).indices.values())
                    self.assertEqual(values, {closed_form_full_image(p, s, N)})

    def test_x235l_cases_match_direct(self):
        """Test cases (ii) and (iii) against direct computation at level 5"""
        G = builtin('X235l').group
        for s in range(5):
            breakdown = degree_via_cases(G, s, 5)
            self.assertEqual(breakdown.case, 'ii' if s < 4 else 'iii')
            self.assertEqual(set(breakdown.indices.values()), set(direct_indices(G, s, 5).values()))

    def test_case_iii_value(self):
        """Test s = N = 5 for X235l: |G_4| 2^(10+10-16)"""
        G = builtin('X235l').group
        breakdown = degree_via_cases(G, 5, 5)
        self.assertEqual(breakdown.case, 'iii')
        self.assertEqual(list(breakdown.indices.values()), [4096])

    def test_case_i_full_torsion(self):
        """Test that s = N = d gives the single value |G_d|"""
        breakdown = degree_via_cases(builtin('X235l').group, 4, 4)
        self.assertEqual(breakdown.case, 'i')
        self.assertEqual(list(breakdown.indices.values()), [256])

    def test_invalid_shape(self):
        G = builtin('X235l').group
        with self.assertRaises(ArgumentError):
            degree_via_cases(G, 3, 2)
        with self.assertRaises(ArgumentError):
            degree_via_cases(G, 0, 0)


class ConstantsTest(SimpleTestCase):
    """
    Test cases for g/m constants of single images
    """

    def test_x235l_table(self):
        """Test the g table of X235l up to level 5"""
        table = constants_table(builtin('X235l').group, 5)
        self.assertEqual({key: c.g for key, c in table.items()}, X235L_G_TABLE)
        for key, m in X235L_M_POINTS.items():
            self.assertEqual(table[key].m, m)
        for c in table.values():
            self.assertEqual(c.m % c.g, 0)
            self.assertTrue(all(value % c.g == 0 for value in c.indices))

    def test_m_over_g_for_two_adic_builtins(self):
        """Test that m/g is 1, 2 or 3 per image and over the builtin catalog"""
        records = builtin_catalog([2])
        for record in records:
            for (s, M), c in constants_table(record.group, 5).items():
                self.assertEqual(c.m % c.g, 0)
                self.assertIn(c.m // c.g, (1, 2, 3), f"{record.label} at ({s}, {M})")
        for key, result in aggregate_tables(records, Q2, 5).items():
            self.assertEqual(result.m % result.g, 0)
            self.assertIn(result.m // result.g, (1, 2, 3), key)

    def test_x235l_is_twice_rational_table_at_4_4(self):
        self.assertEqual(g_m_constants(builtin('X235l').group, 4, 4).g, 2 * Q2_G_TABLE[(4, 4)])

    def test_x235l_level_1(self):
        """Test g and m of shape (0, 1), attained by <(0,1)>"""
        constants = g_m_constants(builtin('X235l').group, 0, 1)
        self.assertEqual((constants.g, constants.m), (1, 1))
        self.assertEqual(sorted(constants.indices), [1, 2, 2])
        self.assertEqual(constants.attained_by, '<(0,1)>')

    def test_borel_mod_3(self):
        constants = g_m_constants(builtin('Borel', 3).group, 0, 1)
        self.assertEqual((constants.g, constants.m), (2, 2))
        self.assertEqual(g_m_constants(builtin('Borel', 3).group, 1, 1).g, 12)


class AggregationTest(SimpleTestCase):
    """
    Test cases for aggregation over a catalog
    """

    def setUp(self):
        self.records = [builtin('Borel', 3), builtin('Nn', 3), builtin('GL2', 3)]
        self.config = LevelConfig(3, 1)

    def test_aggregate_points(self):
        result = aggregate_catalog(self.records, self.config, 0, 1)
        self.assertEqual((result.g, result.m, result.attained_by), (2, 2, '3B'))
        self.assertEqual(result.labels, ['3B', '3Nn', 'GL2.3'])

    def test_aggregate_full_torsion(self):
        result = aggregate_catalog(self.records, self.config, 1, 1)
        self.assertEqual((result.g, result.m, result.attained_by), (4, 12, '3B'))

    def test_single_image(self):
        """Test that a one-image catalog reproduces its own constants"""
        record = builtin('Nn', 5)
        result = aggregate_catalog([record], LevelConfig(5, 1), 0, 1)
        own = g_m_constants(record.group, 0, 1)
        self.assertEqual((result.g, result.m), (own.g, own.m))

    def test_rejected_catalogs(self):
        with self.assertRaises(ArgumentError):
            aggregate_catalog([], self.config, 0, 1)
        with self.assertRaises(ArgumentError):
            aggregate_catalog([builtin('Borel', 5)], self.config, 0, 1)
        with self.assertRaises(ArgumentError):
            aggregate_catalog([builtin('X235l')], LevelConfig(2, 3), 0, 1)

    def test_merge_constants(self):
        result = merge_constants([('a', 4, 8), ('b', 6, 6), ('c', 10, 6)])
        self.assertEqual((result.g, result.m, result.attained_by), (2, 6, 'b'))

    def test_tables(self):
        tables = aggregate_tables(self.records, self.config)
        self.assertEqual(sorted(tables), [(0, 1), (1, 1)])
        self.assertEqual(tables[(1, 1)].m, 12)

    def test_celery_matches_in_process(self):
        """Test that the Celery path returns the same per-image tables"""
        in_process = image_tables(self.records, 2)
        through_celery = image_tables(self.records, 2, use_celery=True)
        self.assertEqual(through_celery, in_process)

    def test_check_divisible_by(self):
        self.assertEqual(
            check_divisible_by({(0, 1): 3, (1, 1): 4, (2, 2): 5}, {(0, 1): 2, (1, 1): 2}),
            [(0, 1)],
        )


class BoundTest(SimpleTestCase):
    """
    Test cases for divisibility bounds and their closed forms over Q
    """

    def test_bound_values(self):
        self.assertEqual(divisibility_bound(Q2_G_TABLE, Q2, 0, 6), 32)
        self.assertEqual(divisibility_bound(Q2_G_TABLE, Q2, 2, 6), 256)
        self.assertEqual(divisibility_bound(Q2_G_TABLE, Q2, 5, 6), 8192)
        self.assertEqual(divisibility_bound(Q2_G_TABLE, Q2, 6, 6), 32768)
        self.assertEqual(divisibility_bound(Q2_G_TABLE, Q2, 1, 3), 1)

    def test_missing_entry(self):
        with self.assertRaises(TableEntryMissing):
            divisibility_bound({}, LevelConfig(3, 1), 0, 1)

    def test_closed_form_matches_m_table(self):
        """Test the closed form against the m-table bound for s <= N <= 8"""
        for N in range(1, 9):
            for s in range(N + 1):
                self.assertEqual(
                    divisibility_bound(Q2_M_TABLE, Q2, s, N),
                    rational_two_adic_bound(s, N),
                    f"({s}, {N})",
                )

    def test_g_table_is_half_for_large_s(self):
        for N in range(4, 9):
            for s in range(4, N + 1):
                self.assertEqual(2 * divisibility_bound(Q2_G_TABLE, Q2, s, N), rational_two_adic_bound(s, N))

    def test_exceptional_closed_form(self):
        self.assertEqual(rational_two_adic_bound(4, 4, exceptional=True), 384)
        self.assertEqual(rational_two_adic_bound(2, 4, exceptional=True), rational_two_adic_bound(2, 4))

    def test_x235l_points_attain_bound(self):
        """Test that X235l attains 2^(2N-7) for cyclic torsion of order 2^N"""
        table = constants_table(builtin('X235l').group, 5)
        m_table = {key: c.m for key, c in table.items()}
        for N in range(4, 8):
            self.assertEqual(divisibility_bound(m_table, Q2, 0, N), 2 ** (2 * N - 7))

    def test_first_appearance(self):
        """Test the first degrees of 2-primary torsion over Q"""
        expected = {degree: list(shapes) for degree, shapes in Q2_FIRST_APPEARANCE.items()}
        self.assertEqual(first_appearance_table(Q2_M_TABLE, Q2, 16), expected)
        self.assertEqual(list(first_appearance_table(Q2_M_TABLE, Q2, 1)), [1])
        with self.assertRaises(ArgumentError):
            first_appearance_table(Q2_M_TABLE, Q2, 0)

    def test_max_two_power_order(self):
        self.assertEqual([max_two_power_order(d) for d in (1, 2, 3, 4, 8, 16, 32)], [3, 4, 3, 4, 5, 5, 6])
        with self.assertRaises(ArgumentError):
            max_two_power_order(0)

    def test_level_config_validation(self):
        with self.assertRaises(ArgumentError):
            LevelConfig(4, 1)
        with self.assertRaises(ArgumentError):
            LevelConfig(2, 0)

    def test_reference_rows(self):
        self.assertEqual(tuple(q_mod_p_constants(11)), (5, 5, 10, 110))
        self.assertEqual(tuple(q_mod_p_constants(19)), (360, 360, 123120, 123120))
        self.assertEqual(reference_tables(3), ({(0, 1): 1, (1, 1): 2}, {(0, 1): 1, (1, 1): 2}))


class DegreeReportTest(SimpleTestCase):

    def test_x235l_report(self):
        report = build_degree_report(builtin('X235l'), 1, 5)
        self.assertEqual(report.case, 'ii')
        self.assertEqual(report.g, 16)
        values = [index for _, index in report.indices]
        self.assertIn(512, values)
        self.assertIn(16, values)
        self.assertEqual(report.m, min(values))
        self.assertEqual(report.g_bound, 16)
        self.assertEqual(report.m_bound, report.m)
        self.assertIn('case (ii) at level 4', report.notes)

    def test_borel_report_above_level_bound(self):
        """Test a report for N above n, where the bound multiplies by p^(2N-2n)"""
        report = build_degree_report(builtin('Borel', 3), 0, 2, LevelConfig(3, 1))
        self.assertEqual(sorted({index for _, index in report.indices}), [18, 54])
        self.assertEqual((report.g, report.m), (18, 18))
        self.assertEqual((report.g_bound, report.m_bound), (18, 18))

    def test_rows_name_level_n_subgroups(self):
        """Test that every case (ii) row label gives a level-N subgroup of that degree"""
        record = builtin('X235l')
        report = build_degree_report(record, 1, 5)
        G_5 = lift_group(record.group, 5)
        self.assertEqual(len(report.indices), 12)
        for label, index in report.indices:
            x, y = map(int, re.fullmatch(r'E\[2\^1\]\+<\((\d+),(\d+)\)>', label).groups())
            T = make_torsion_subgroup(G_5.context, 1, (x, y))
            self.assertEqual(degree_index(G_5, T), index, label)
        self.assertIn("each row stands for the 2 subgroups of shape (1, 5) sharing its 2^4-torsion", report.notes)

    def test_full_torsion_row_uses_requested_shape(self):
        report = build_degree_report(builtin('X235l'), 5, 5)
        self.assertEqual(report.indices, [('E[2^5]+<(0,1)>', 4096)])

    def test_shape_label(self):
        self.assertEqual(shape_label(2, 1, 3), 'Z/2 + Z/8')
        self.assertEqual(shape_label(2, 0, 5), 'Z/32')


@skipUnless(external_rzb_catalog(), "rzb.cat with the 1208 2-adic images is not installed in DIVDEG_CATALOG_DIR")
class RationalTwoAdicCatalogTest(SimpleTestCase):
    """
    Test cases for the (Q, 2) tables rebuilt from the full RZB catalog
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        records = [r for r in parse_catalog_file(external_rzb_catalog()) if r.p == 2]
        cls.tables = aggregate_tables(records, Q2, 5)

    def test_g_table(self):
        self.assertEqual(g_values(self.tables), Q2_G_TABLE)

    def test_m_table(self):
        """Test m = g for s <= 3 and m = 2g for s >= 4"""
        self.assertEqual(m_values(self.tables), Q2_M_TABLE)

    def test_first_appearance(self):
        expected = {degree: list(shapes) for degree, shapes in Q2_FIRST_APPEARANCE.items()}
        self.assertEqual(first_appearance_table(m_values(self.tables), Q2, 16), expected)
