"""
Image catalog

Builtin constructions of the standard mod-p images (Borel, split and
non-split Cartan normalizers, the full group), the explicit 2-adic image
X235l, and reading/writing/validation of catalog files.

Catalog file format, one directive per line:

    # comment
    image <LABEL> p=<p> level=<d> convention=<left|right> [declared=<k>] [origin=<text>]
    gen <a> <b> <c> <d>

`gen` lines give [[a, b], [c, d]] row by row; a record runs until the next
`image` line. Right-convention generators are transposed on reading so
that stored generators always act on column vectors from the left.
"""
import io
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

from divdeg.exceptions import (
    ArgumentError,
    CatalogDataError,
    CatalogParseError,
    ResourceCapExceeded,
)
from divdeg.utils.arithmetic import factorize, is_prime, least_primitive_root, least_quadratic_nonresidue
from divdeg.utils.config_loader import find_catalog_file
from divdeg.utils.gl2 import (
    MatrixGroup,
    PrimePower,
    ResidueMatrix,
    check_defined_at_level,
    gl2_order,
    identity,
    kernel_generators,
    lift_matrix,
    mat_pow,
    minimal_defining_level,
    reduce_group,
    standard_gl2_generators,
    transpose,
)

logger = logging.getLogger(__name__)


class Provenance(str, Enum):
    BUILTIN_PUBLISHED = 'builtin-published'
    BUILTIN_CONSTRUCTED = 'builtin-constructed'
    EXTERNAL_FILE = 'external-file'


class Convention(str, Enum):
    LEFT = 'left'
    RIGHT = 'right'


@dataclass(frozen=True)
class ImageRecord:
    """
    A labeled image group.

    Generators live at `level` and always act from the left; the group is
    asserted to be the full inverse image of its reduction mod p^declared_level.
    """
    label: str
    p: int
    level: int
    generators: tuple
    declared_level: Optional[int] = None
    provenance: Provenance = Provenance.EXTERNAL_FILE
    source_convention: Convention = Convention.LEFT
    origin: Optional[str] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.declared_level is None:
            object.__setattr__(self, 'declared_level', self.level)
        object.__setattr__(self, 'generators', tuple(self.generators))

    @property
    def context(self) -> PrimePower:
        return PrimePower(self.p, self.level)

    @cached_property
    def group(self) -> MatrixGroup:
        return MatrixGroup(self.context, list(self.generators), declared_level=self.declared_level)

    @property
    def claims_rzb(self) -> bool:
        return self.p == 2 and (self.origin or '').lower() == 'rzb'


# Builtin constructions

X235L_GENERATORS = (
    ((1, 0), (1, 1)),
    ((1, 0), (12, 1)),
    ((9, 0), (0, 1)),
    ((1, 0), (14, 1)),
    ((5, 0), (0, 1)),
    ((15, 0), (0, 1)),
    ((9, 0), (8, 9)),
    ((1, 0), (8, 1)),
)

BUILTIN_FAMILIES = ('GL2', 'Borel', 'Cs', 'Ns', 'Cn', 'Nn', '2Cs', '2B', '2Cn', 'X235l')
FAMILY_SUFFIXES = {'B': 'Borel', 'Cs': 'Cs', 'Ns': 'Ns', 'Cn': 'Cn', 'Nn': 'Nn'}
TWO_ADIC_ALIASES = {'Borel': '2B', 'Cs': '2Cs', 'Cn': '2Cn'}


def _nonsplit_cartan_generator(ctx: PrimePower) -> ResidueMatrix:
    """A generator [[a, e b], [b, a]] of the cyclic group of order p^2 - 1."""
    p = ctx.p
    eps = least_quadratic_nonresidue(p)
    order = p * p - 1
    primes = list(factorize(order))
    for a in range(p):
        for b in range(1, p):
            candidate = ResidueMatrix(a, eps * b, b, a, ctx)
            if all(not mat_pow(candidate, order // q).is_identity() for q in primes):
                return candidate
    raise ArgumentError(f"no generator of the non-split Cartan found mod {p}")


def _mod_p_generators(family: str, ctx: PrimePower) -> List[ResidueMatrix]:
    p = ctx.p
    if family == '2Cs':
        return [identity(ctx)]
    if family == '2B':
        return [ResidueMatrix(1, 1, 0, 1, ctx)]
    if family == '2Cn':
        return [ResidueMatrix(0, 1, 1, 1, ctx)]

    zeta = least_primitive_root(p)
    if family == 'Borel':
        return [ResidueMatrix(zeta, 0, 0, 1, ctx), ResidueMatrix(1, 0, 0, zeta, ctx), ResidueMatrix(1, 1, 0, 1, ctx)]
    if family == 'Cs':
        return [ResidueMatrix(zeta, 0, 0, 1, ctx), ResidueMatrix(1, 0, 0, zeta, ctx)]
    if family == 'Ns':
        return _mod_p_generators('Cs', ctx) + [ResidueMatrix(0, 1, 1, 0, ctx)]
    if family == 'Cn':
        return [_nonsplit_cartan_generator(ctx)]
    if family == 'Nn':
        return [_nonsplit_cartan_generator(ctx), ResidueMatrix(1, 0, 0, -1, ctx)]
    raise ArgumentError(f"unknown builtin family {family}")


def _family_label(family: str, p: int) -> str:
    if family.startswith('2'):
        return family
    suffix = 'B' if family == 'Borel' else family
    return f"{p}{suffix}"


def builtin(label: str, p: Optional[int] = None, level: Optional[int] = None) -> ImageRecord:
    """
    Construct a builtin image.

    Args:
        label: One of BUILTIN_FAMILIES
        p: The prime; implied for X235l and the 2-adic labels
        level: Level of the returned generators (default: the declared level)

    Returns:
        ImageRecord
    """
    if label not in BUILTIN_FAMILIES:
        raise ArgumentError(f"unknown builtin image '{label}' (known: {', '.join(BUILTIN_FAMILIES)})")

    if label == 'X235l' or label.startswith('2'):
        if p not in (None, 2):
            raise ArgumentError(f"builtin image {label} is 2-adic, got p = {p}")
        p = 2
    if p is None:
        raise ArgumentError(f"builtin image {label} needs a prime (-p)")
    if not is_prime(p):
        raise ArgumentError(f"{p} is not prime")

    if p == 2 and label in TWO_ADIC_ALIASES:
        label = TWO_ADIC_ALIASES[label]
    if p == 2 and label in ('Ns', 'Nn'):
        raise ArgumentError(f"{label} is not defined for p = 2; use 2B or GL2")

    if label == 'X235l':
        declared = 4
        level = level or declared
        if level < declared:
            raise ArgumentError(f"X235l is defined at level {declared}, cannot build it at level {level}")
        ctx = PrimePower(2, declared)
        generators = [ResidueMatrix.from_rows(rows, ctx) for rows in X235L_GENERATORS]
        record_label = 'X235l'
        provenance = Provenance.BUILTIN_PUBLISHED
        origin = 'rzb'
    else:
        declared = 1
        level = level or declared
        if level < 1:
            raise ArgumentError(f"level must be at least 1, got {level}")
        ctx = PrimePower(p, 1)
        if label == 'GL2':
            generators = standard_gl2_generators(ctx)
            record_label = f"GL2.{p}" if level == 1 else f"GL2.{p}^{level}"
        else:
            generators = _mod_p_generators(label, ctx)
            record_label = _family_label(label, p)
        provenance = Provenance.BUILTIN_CONSTRUCTED
        origin = None

    if level > declared:
        top = PrimePower(p, level)
        generators = [lift_matrix(g, level) for g in generators] + kernel_generators(top, declared)

    return ImageRecord(
        label=record_label,
        p=p,
        level=level,
        generators=tuple(generators),
        declared_level=declared,
        provenance=provenance,
        origin=origin,
    )


def builtin_catalog(primes: Iterable[int], include_two_adic: bool = True) -> List[ImageRecord]:
    """Every builtin family for each prime, with X235l added for p = 2."""
    records = []
    for p in primes:
        if p == 2:
            families = ['2Cs', '2B', '2Cn', 'GL2']
        else:
            families = ['Borel', 'Cs', 'Ns', 'Cn', 'Nn', 'GL2']
        records += [builtin(family, p) for family in families]
        if p == 2 and include_two_adic:
            records.append(builtin('X235l'))
    return records


# Catalog files

IMAGE_LINE = re.compile(r'^image\s+(?P<label>\S+)(?P<options>(?:\s+\S+=\S+)*)\s*$')
GEN_LINE = re.compile(r'^gen\s+(\d+)\s+(\d+)\s+(\d+)\s+(\d+)\s*$')
IMAGE_OPTIONS = {'p', 'level', 'convention', 'declared', 'origin'}


@dataclass
class _PendingRecord:
    label: str
    p: int
    level: int
    declared: int
    convention: Convention
    origin: Optional[str]
    line_number: int
    rows: list = field(default_factory=list)


def _parse_image_line(match, line_number: int) -> _PendingRecord:
    options = {}
    for token in match.group('options').split():
        key, _, value = token.partition('=')
        if key not in IMAGE_OPTIONS:
            raise CatalogParseError(f"unknown image option '{key}'", line_number)
        options[key] = value
    for key in ('p', 'level', 'convention'):
        if key not in options:
            raise CatalogParseError(f"image line is missing {key}=", line_number)
    try:
        p = int(options['p'])
        level = int(options['level'])
        declared = int(options.get('declared', level))
    except ValueError:
        raise CatalogParseError("p, level and declared must be decimal integers", line_number)
    if not is_prime(p):
        raise CatalogParseError(f"p={p} is not prime", line_number)
    if level < 1 or not 1 <= declared <= level:
        raise CatalogParseError(f"need 1 <= declared <= level, got declared={declared} level={level}", line_number)
    try:
        PrimePower(p, level)
    except ArgumentError as e:
        raise CatalogParseError(str(e), line_number)
    try:
        convention = Convention(options['convention'])
    except ValueError:
        raise CatalogParseError(f"convention must be left or right, got '{options['convention']}'", line_number)
    return _PendingRecord(match.group('label'), p, level, declared, convention, options.get('origin'), line_number)


def _finish(pending: _PendingRecord, source: Optional[str]) -> ImageRecord:
    if not pending.rows:
        raise CatalogParseError(f"image {pending.label} has no gen lines", pending.line_number)
    ctx = PrimePower(pending.p, pending.level)
    generators = []
    for a, b, c, d in pending.rows:
        try:
            matrix = ResidueMatrix(a, b, c, d, ctx)
        except ArgumentError as e:
            raise CatalogDataError(str(e), label=pending.label)
        if pending.convention == Convention.RIGHT:
            matrix = transpose(matrix)
        generators.append(matrix)
    return ImageRecord(
        label=pending.label,
        p=pending.p,
        level=pending.level,
        generators=tuple(generators),
        declared_level=pending.declared,
        provenance=Provenance.EXTERNAL_FILE,
        source_convention=pending.convention,
        origin=pending.origin,
        source=source,
    )


def parse_catalog_file(source: Union[str, Path, TextIO]) -> List[ImageRecord]:
    """
    Read image records from a catalog file.

    Args:
        source: Path, or an open text or binary stream

    Returns:
        The records in file order

    Raises:
        CatalogParseError: Malformed line, with its line number
        CatalogDataError: Non-invertible generator or duplicate label
    """
    if isinstance(source, (str, Path)):
        with open(source, 'rb') as stream:
            return _parse_stream(stream, str(source))
    return _parse_stream(source, getattr(source, 'name', None))


def _numbered_lines(stream):
    """Yield (line number, text) pairs, decoding byte lines as UTF-8."""
    line_number = 0
    iterator = iter(stream)
    while True:
        try:
            raw = next(iterator)
        except StopIteration:
            return
        except UnicodeDecodeError as e:
            raise CatalogParseError(f"not valid UTF-8 ({e.reason})", line_number + 1)
        line_number += 1
        if isinstance(raw, bytes):
            try:
                raw = raw.decode('utf-8')
            except UnicodeDecodeError as e:
                raise CatalogParseError(f"not valid UTF-8 at column {e.start + 1}", line_number)
        yield line_number, raw


def _parse_stream(stream: TextIO, source: Optional[str]) -> List[ImageRecord]:
    records: List[ImageRecord] = []
    labels = set()
    pending: Optional[_PendingRecord] = None

    def close():
        if pending is None:
            return
        record = _finish(pending, source)
        if record.label in labels:
            raise CatalogDataError("duplicate label", label=record.label)
        labels.add(record.label)
        records.append(record)

    for line_number, raw in _numbered_lines(stream):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue

        match = IMAGE_LINE.match(line)
        if match:
            close()
            pending = _parse_image_line(match, line_number)
            continue

        match = GEN_LINE.match(line)
        if match:
            if pending is None:
                raise CatalogParseError("gen line before any image line", line_number)
            values = [int(x) for x in match.groups()]
            modulus = pending.p ** pending.level
            if any(v >= modulus for v in values):
                raise CatalogParseError(f"entries must be less than {modulus}", line_number)
            pending.rows.append(values)
            continue

        raise CatalogParseError(f"cannot parse '{line}'", line_number)

    close()
    logger.info(f"Parsed {len(records)} image records from {source or 'stream'}")
    return records


def serialize_catalog(records: Sequence[ImageRecord], stream: TextIO):
    """Write records in the catalog format, left convention."""
    stream.write("# divdeg image catalog, generators act on column vectors from the left\n")
    for record in records:
        header = f"image {record.label} p={record.p} level={record.level} convention=left"
        if record.declared_level != record.level:
            header += f" declared={record.declared_level}"
        if record.origin:
            header += f" origin={record.origin}"
        stream.write(header + "\n")
        for g in record.generators:
            stream.write(f"gen {g.a} {g.b} {g.c} {g.d}\n")


def serialize_catalog_text(records: Sequence[ImageRecord]) -> str:
    buffer = io.StringIO()
    serialize_catalog(records, buffer)
    return buffer.getvalue()


def load_catalog(selector: Union[str, Path]) -> List[ImageRecord]:
    return parse_catalog_file(find_catalog_file(selector))


PREFIXED_LABEL = re.compile(r'^(?P<p>\d+)(?P<family>B|Cs|Ns|Cn|Nn)$')
GL2_LABEL = re.compile(r'^GL2(?:\.(?P<p>\d+)(?:\^(?P<level>\d+))?)?$')


def resolve_image(selector: str, p: Optional[int] = None, level: Optional[int] = None) -> ImageRecord:
    """
    Find an image by builtin label, prefixed label ("3B", "GL2.5") or file#label.

    A file selector without '#label' is accepted when the file holds one record.
    """
    if '#' in selector:
        path, _, label = selector.partition('#')
        for record in load_catalog(path):
            if record.label == label:
                return record
        raise ArgumentError(f"image {label} not found in {path}")

    match = GL2_LABEL.match(selector)
    if match:
        return builtin('GL2', int(match.group('p')) if match.group('p') else p,
                       level=int(match.group('level')) if match.group('level') else level)

    match = PREFIXED_LABEL.match(selector)
    if match:
        prime = int(match.group('p'))
        if p is not None and p != prime:
            raise ArgumentError(f"label {selector} is for p = {prime}, got -p {p}")
        family = FAMILY_SUFFIXES[match.group('family')]
        if prime == 2:
            family = TWO_ADIC_ALIASES.get(family, family)
        return builtin(family, prime, level=level)

    if selector in BUILTIN_FAMILIES:
        return builtin(selector, p, level=level)

    records = load_catalog(selector)
    if len(records) != 1:
        raise ArgumentError(f"catalog {selector} holds {len(records)} images; use {selector}#<label>")
    return records[0]


# Validation

RZB_INDEX_BOUNDS = (64, 96)


@dataclass
class ValidationReport:
    label: str
    p: int
    level: int
    declared_level: int
    order: Optional[int] = None
    gl2_index: Optional[int] = None
    defined_at_level: Optional[bool] = None
    advisory: bool = False
    minimal_level: Optional[int] = None
    convention_note: Optional[str] = None
    rzb_index_ok: Optional[bool] = None
    reference_match: Optional[bool] = None
    notes: List[str] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors


def validate_record(record: ImageRecord) -> ValidationReport:
    """
    Check a record and collect the findings.

    Hard failures (listed in errors): generators at a level above the
    declared one that do not form a full inverse image, a failed
    level-of-definition check for odd p, and constants disagreeing with
    the published mod-p tables.
    """
    from divdeg.utils.degrees import g_m_constants
    from divdeg.utils.reference import mod_p_constants

    report = ValidationReport(record.label, record.p, record.level, record.declared_level)
    report.advisory = record.p == 2
    if record.source_convention == Convention.RIGHT:
        report.convention_note = "generators transposed from right-action source"

    d = record.declared_level
    try:
        G = record.group
        report.order = G.order
        G_d = reduce_group(G, d)
        report.gl2_index = gl2_order(record.p, d) // G_d.order

        if G.order != G_d.order * record.p ** (4 * (record.level - d)):
            report.errors.append(
                f"generators at level {record.level} are not the full inverse image of level {d}"
            )

        report.minimal_level = minimal_defining_level(G_d)
    except ResourceCapExceeded as e:
        report.errors.append(str(e))
        logger.warning(f"Validation of {record.label} stopped: {e}")
        return report

    if record.level == d:
        # generators at level d stand for their full inverse image
        report.defined_at_level = True
    else:
        try:
            report.defined_at_level = check_defined_at_level(reduce_group(G, d + 1), d)
        except ResourceCapExceeded as e:
            report.notes.append(f"kernel check at level {d} skipped: {e}")

    if report.defined_at_level is False:
        if report.advisory:
            report.notes.append(f"kernel check at level {d} failed (advisory for p = 2)")
        else:
            report.errors.append(f"group is not defined at level {d}")

    if record.claims_rzb:
        report.rzb_index_ok = any(bound % report.gl2_index == 0 for bound in RZB_INDEX_BOUNDS)
        if not report.rzb_index_ok:
            report.notes.append(f"index {report.gl2_index} divides neither 64 nor 96")

    published = mod_p_constants(record.label)
    if published is not None and d == 1:
        points = g_m_constants(G_d, 0, 1)
        computed = (points.g, points.m, g_m_constants(G_d, 1, 1).g)
        report.reference_match = computed == (published.g01, published.m01, published.g11)
        if not report.reference_match:
            report.errors.append(
                f"constants {computed} differ from published {(published.g01, published.m01, published.g11)}"
            )

    for error in report.errors:
        logger.warning(f"Validation of {record.label}: {error}")
    return report
