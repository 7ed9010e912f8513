"""
Unit tests for the image catalog

These tests cover the builtin constructions, reading and writing catalog
files, and record validation.
"""
import io
import os
import random
import tempfile
from unittest.mock import patch

from django.test import SimpleTestCase, override_settings

from divdeg.exceptions import (
    ArgumentError,
    CatalogDataError,
    CatalogNotFound,
    CatalogParseError,
    ResourceCapExceeded,
)
from divdeg.utils.catalog import (
    Convention,
    ImageRecord,
    Provenance,
    builtin,
    builtin_catalog,
    load_catalog,
    parse_catalog_file,
    resolve_image,
    serialize_catalog_text,
    validate_record,
)
from divdeg.utils.config_loader import find_catalog_file
from divdeg.utils.degrees import g_m_constants
from divdeg.utils.gl2 import (
    PrimePower,
    ResidueMatrix,
    conjugate_group,
    gl2_order,
    lift_group,
    reduce_group,
)
from divdeg.utils.reference import mod_p_constants
from divdeg.tests import oracles

MOD_P_LABELS = [
    '2Cs', '2B', '2Cn', 'GL2.2',
    '3Cs', '3Ns', '3B', '3Nn', 'GL2.3',
    '5Cs', '5Ns', '5Nn', '5B', 'GL2.5',
    '7Ns', '7Nn', '7B', 'GL2.7',
    '11Nn', 'GL2.11',
    '13B', 'GL2.13',
    'GL2.17',
]


def mod_p_triple(G):
    points = g_m_constants(G, 0, 1)
    return points.g, points.m, g_m_constants(G, 1, 1).g


def parse_text(text):
    return parse_catalog_file(io.StringIO(text))


class BuiltinImageTest(SimpleTestCase):
    """
    Test cases for the builtin mod-p and 2-adic images
    """

    def test_family_orders(self):
        """Test group orders of the mod-p families"""
        for p in (3, 5, 7, 11, 13):
            expected = {
                'Borel': (p - 1) ** 2 * p,
                'Cs': (p - 1) ** 2,
                'Ns': 2 * (p - 1) ** 2,
                'Cn': p * p - 1,
                'Nn': 2 * (p * p - 1),
                'GL2': gl2_order(p, 1),
            }
            for family, order in expected.items():
                self.assertEqual(builtin(family, p).group.order, order, f"{family} at p = {p}")

    def test_published_constants(self):
        """Test (g01, m01, g11) of each builtin against the published mod-p table"""
        for label in MOD_P_LABELS:
            published = mod_p_constants(label)
            self.assertEqual(
                mod_p_triple(resolve_image(label).group),
                (published.g01, published.m01, published.g11),
                label,
            )

    def test_gl2_f37(self):
        """Test the largest surjective image the closure cap admits"""
        published = mod_p_constants('GL2.37')
        G = resolve_image('GL2.37').group
        self.assertEqual(G.order, 1822176)
        self.assertEqual(mod_p_triple(G), (published.g01, published.m01, published.g11))

    def test_conjugation_does_not_change_constants(self):
        """Test 50 random conjugates of builtin images"""
        rng = random.Random(2024)
        labels = ['2B', '2Cn', '3B', '3Cs', '3Ns', '3Nn', '5B', '5Cs', '5Nn', 'GL2.3']
        expected = {label: mod_p_triple(resolve_image(label).group) for label in labels}
        for _ in range(50):
            label = rng.choice(labels)
            record = resolve_image(label)
            g = ResidueMatrix(*oracles.random_invertible(record.p, 1, rng), record.context)
            self.assertEqual(mod_p_triple(conjugate_group(record.group, g)), expected[label], label)

    def test_x235l(self):
        record = builtin('X235l')
        self.assertEqual(len(record.generators), 8)
        self.assertEqual((record.p, record.level, record.declared_level), (2, 4, 4))
        self.assertEqual(record.group.order, 256)
        self.assertEqual(record.provenance, Provenance.BUILTIN_PUBLISHED)
        self.assertTrue(record.claims_rzb)

    def test_two_adic_aliases(self):
        self.assertEqual(builtin('Borel', 2).label, '2B')
        self.assertEqual(builtin('Cs', 2).label, '2Cs')
        self.assertEqual(builtin('2Cs').group.order, 1)

    def test_lifted_builtin(self):
        """Test a builtin built above its declared level"""
        record = builtin('GL2', 2, level=3)
        self.assertEqual(record.label, 'GL2.2^3')
        self.assertEqual(record.declared_level, 1)
        self.assertEqual(record.group.order, 1536)

        borel = builtin('Borel', 3, level=2)
        self.assertEqual(borel.group.order, 12 * 81)

    def test_builtin_errors(self):
        with self.assertRaises(ArgumentError):
            builtin('Foo', 3)
        with self.assertRaises(ArgumentError):
            builtin('X235l', 3)
        with self.assertRaises(ArgumentError):
            builtin('Borel')
        with self.assertRaises(ArgumentError):
            builtin('Ns', 2)
        with self.assertRaises(ArgumentError):
            builtin('X235l', level=3)
        with self.assertRaises(ArgumentError):
            builtin('Cs', 9)

    def test_builtin_catalog(self):
        self.assertEqual([r.label for r in builtin_catalog([2])], ['2Cs', '2B', '2Cn', 'GL2.2', 'X235l'])
        self.assertEqual([r.label for r in builtin_catalog([2], include_two_adic=False)],
                         ['2Cs', '2B', '2Cn', 'GL2.2'])
        self.assertEqual([r.label for r in builtin_catalog([5])], ['5B', '5Cs', '5Ns', '5Cn', '5Nn', 'GL2.5'])


class LiftReduceLawTest(SimpleTestCase):
    """
    Test cases for lifting builtin images and reducing them back
    """

    def check_laws(self, record, top):
        G_d = record.group
        for N in range(G_d.level + 1, top + 1):
            lifted = lift_group(G_d, N).enumerate()
            self.assertEqual(lifted.order, G_d.order * record.p ** (4 * (N - G_d.level)), f"{record.label} at {N}")
            self.assertTrue(reduce_group(lifted, G_d.level).same_elements(G_d.enumerate()))

    def test_two_adic_images(self):
        for record in builtin_catalog([2]):
            self.check_laws(record, 5)

    def test_odd_primes(self):
        for p in (3, 5, 7):
            for record in builtin_catalog([p]):
                if record.label != 'GL2.7':
                    self.check_laws(record, 2)

    @override_settings(DIVDEG={'CLOSURE_CAP': 2 ** 23})
    def test_gl2_f7_with_raised_cap(self):
        """Test the laws for GL2(F7), whose level-2 lift has 4840416 elements"""
        self.check_laws(builtin('GL2', 7), 2)

    def test_gl2_f7_lift_exceeds_cap(self):
        with self.assertRaises(ResourceCapExceeded):
            lift_group(builtin('GL2', 7).group, 2)


class ResolveImageTest(SimpleTestCase):

    def test_labels(self):
        self.assertEqual(resolve_image('3B').label, '3B')
        self.assertEqual(resolve_image('GL2.5').level, 1)
        self.assertEqual(resolve_image('GL2.2^3').group.order, 1536)
        self.assertEqual(resolve_image('X235l').label, 'X235l')
        self.assertEqual(resolve_image('Nn', p=7).label, '7Nn')

    def test_bundled_file(self):
        """Test that the bundled right-action catalog matches the builtin X235l"""
        from_file = resolve_image('x235l_rzb#X235l')
        self.assertEqual(from_file.source_convention, Convention.RIGHT)
        self.assertEqual(from_file.provenance, Provenance.EXTERNAL_FILE)
        self.assertEqual(
            [g.rows() for g in from_file.generators],
            [g.rows() for g in builtin('X235l').generators],
        )
        self.assertTrue(from_file.group.same_elements(builtin('X235l').group))
        self.assertEqual(resolve_image('x235l_rzb').label, 'X235l')

    def test_errors(self):
        with self.assertRaises(ArgumentError):
            resolve_image('3B', p=5)
        with self.assertRaises(ArgumentError):
            resolve_image('x235l_rzb#Nope')
        with self.assertRaises(CatalogNotFound):
            resolve_image('no_such_catalog')


class CatalogFileTest(SimpleTestCase):
    """
    Test cases for parsing and writing catalog files
    """

    def test_empty_files(self):
        self.assertEqual(parse_text(''), [])
        self.assertEqual(parse_text('# only a comment\n\n'), [])

    def test_right_convention_is_transposed(self):
        records = parse_text("image R p=5 level=1 convention=right\ngen 1 2 0 1\n")
        self.assertEqual(records[0].generators[0].rows(), [[1, 0], [2, 1]])
        self.assertEqual(records[0].source_convention, Convention.RIGHT)

    def test_declared_and_origin(self):
        (record,) = parse_text("image L p=3 level=2 convention=left declared=1 origin=local\ngen 1 1 0 1\n")
        self.assertEqual((record.level, record.declared_level, record.origin), (2, 1, 'local'))
        self.assertFalse(record.claims_rzb)

    def test_parse_errors_carry_line_numbers(self):
        """Test the line number reported for each kind of malformed line"""
        cases = [
            ("image A p=3 level=1 convention=left\ngen 1 1 0 1\nbogus\n", 3),
            ("gen 1 0 0 1\n", 1),
            ("# header\nimage A p=3 level=1 convention=left\ngen 3 0 0 1\n", 3),
            ("image A p=3 level=1\ngen 1 0 0 1\n", 1),
            ("image A p=3 level=1 convention=up\ngen 1 0 0 1\n", 1),
            ("image A p=4 level=1 convention=left\ngen 1 0 0 1\n", 1),
            ("image A p=3 level=1 convention=left color=red\n", 1),
            ("image A p=3 level=1 convention=left\nimage B p=3 level=1 convention=left\ngen 1 0 0 1\n", 1),
            ("# a\nimage A p=2 level=40 convention=left\ngen 1 0 0 1\n", 2),
            ("image A p=3 level=1000000000 convention=left\ngen 1 0 0 1\n", 1),
        ]
        for text, line_number in cases:
            with self.assertRaises(CatalogParseError) as raised:
                parse_text(text)
            self.assertEqual(raised.exception.line_number, line_number, text)
            self.assertTrue(str(raised.exception).startswith(f"line {line_number}:"))

    def test_invalid_utf8(self):
        """Test that undecodable bytes fail as a parse error on their line"""
        data = b"image A p=3 level=1 convention=left\n# caf\xe9\ngen 1 1 0 1\n"
        with self.assertRaises(CatalogParseError) as raised:
            parse_catalog_file(io.BytesIO(data))
        self.assertEqual(raised.exception.line_number, 2)

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'latin1.cat')
            with open(path, 'wb') as handle:
                handle.write(data)
            with self.assertRaises(CatalogParseError) as raised:
                parse_catalog_file(path)
        self.assertEqual(raised.exception.line_number, 2)
        self.assertIn('UTF-8', str(raised.exception))

    def test_non_invertible_generator(self):
        with self.assertRaises(CatalogDataError) as raised:
            parse_text("image Bad p=2 level=2 convention=left\ngen 2 1 0 2\n")
        self.assertEqual(raised.exception.label, 'Bad')
        self.assertIn('image Bad', str(raised.exception))

    def test_duplicate_label(self):
        text = "image A p=3 level=1 convention=left\ngen 1 1 0 1\n" * 2
        with self.assertRaises(CatalogDataError):
            parse_text(text)

    def test_round_trip(self):
        """Test that written catalogs read back to the same groups"""
        records = builtin_catalog([2, 3]) + [builtin('GL2', 3, level=2)]
        parsed = parse_text(serialize_catalog_text(records))
        self.assertEqual([r.label for r in parsed], [r.label for r in records])
        self.assertEqual([r.declared_level for r in parsed], [r.declared_level for r in records])
        for original, copy in zip(records, parsed):
            self.assertTrue(copy.group.same_elements(original.group), original.label)

    def test_catalog_dir_setting(self):
        """Test lookup through DIVDEG CATALOG_DIR with the implied suffix"""
        with tempfile.TemporaryDirectory() as tmp:
            with open(os.path.join(tmp, 'mine.cat'), 'w', encoding='utf-8') as handle:
                handle.write(serialize_catalog_text(builtin_catalog([3])))
            with override_settings(DIVDEG={'CATALOG_DIR': tmp}):
                self.assertEqual(len(load_catalog('mine')), 6)

    def test_missing_catalog(self):
        with self.assertRaises(CatalogNotFound):
            find_catalog_file('no_such_catalog')


class ValidationTest(SimpleTestCase):
    """
    Test cases for validate_record
    """

    def test_bundled_x235l(self):
        (record,) = load_catalog('x235l_rzb')
        report = validate_record(record)
        self.assertTrue(report.passed)
        self.assertEqual(report.order, 256)
        self.assertEqual(report.gl2_index, 96)
        self.assertTrue(report.rzb_index_ok)
        self.assertTrue(report.advisory)
        self.assertTrue(report.defined_at_level)
        self.assertIsNotNone(report.convention_note)

    def test_surjective_image(self):
        report = validate_record(builtin('GL2', 5))
        self.assertTrue(report.passed)
        self.assertEqual(report.gl2_index, 1)
        self.assertTrue(report.reference_match)
        self.assertEqual(report.minimal_level, 1)
        self.assertIsNone(report.rzb_index_ok)

    def test_borel(self):
        report = validate_record(builtin('Borel', 5))
        self.assertTrue(report.passed)
        self.assertEqual(report.order, 80)
        self.assertTrue(report.defined_at_level)

    def test_reference_mismatch_fails(self):
        """Test a record whose label promises constants it does not have"""
        wrong = ImageRecord(label='3B', p=3, level=1, generators=builtin('Cs', 3).generators)
        report = validate_record(wrong)
        self.assertFalse(report.reference_match)
        self.assertFalse(report.passed)

    def test_not_a_full_inverse_image(self):
        """Test generators at level 2 that miss the kernel of reduction"""
        ctx = PrimePower(3, 2)
        record = ImageRecord(label='partial', p=3, level=2, declared_level=1,
                             generators=(ResidueMatrix(1, 1, 0, 1, ctx),))
        report = validate_record(record)
        self.assertFalse(report.passed)
        self.assertFalse(report.defined_at_level)
        self.assertEqual(len(report.errors), 2)

    def test_gl2_f7_at_its_declared_level(self):
        """Test that a level-1 image passes without building its level-2 lift"""
        report = validate_record(builtin('GL2', 7))
        self.assertTrue(report.passed)
        self.assertTrue(report.defined_at_level)
        self.assertTrue(report.reference_match)

    def test_lifted_record_runs_kernel_check(self):
        report = validate_record(builtin('Borel', 3, level=2))
        self.assertTrue(report.passed)
        self.assertTrue(report.defined_at_level)
        self.assertTrue(report.reference_match)

    def test_kernel_check_cap_is_a_note(self):
        """Test that the closure cap in the kernel check does not fail the record"""
        with patch('divdeg.utils.catalog.check_defined_at_level', side_effect=ResourceCapExceeded(10)):
            report = validate_record(builtin('Borel', 3, level=2))
        self.assertTrue(report.passed)
        self.assertIsNone(report.defined_at_level)
        self.assertTrue(any('skipped' in note for note in report.notes))

    @override_settings(DIVDEG={'CLOSURE_CAP': 100})
    def test_cap_is_reported(self):
        report = validate_record(builtin('GL2', 5))
        self.assertFalse(report.passed)
        self.assertIn('closure cap', report.errors[0])
