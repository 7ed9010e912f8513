"""Shared argument handling for the divdeg management commands."""
from contextlib import contextmanager

from django.core.management.base import CommandError

from divdeg.exceptions import ArgumentError, DivdegError, ResourceCapExceeded
from divdeg.utils.catalog import builtin_catalog, load_catalog, resolve_image
from divdeg.utils.config_loader import level_config_for
from divdeg.utils.degrees import aggregate_tables, constants_table
from divdeg.utils.output import FORMATS
from divdeg.utils.reference import reference_tables

EXIT_DATA_ERROR = 2
EXIT_RESOURCE_CAP = 3


@contextmanager
def command_errors():
    """Turn divdeg errors into CommandError with the matching exit status."""
    try:
        yield
    except ResourceCapExceeded as e:
        raise CommandError(str(e), returncode=EXIT_RESOURCE_CAP)
    except DivdegError as e:
        raise CommandError(str(e), returncode=EXIT_DATA_ERROR)


def add_output_arguments(parser):
    parser.add_argument('--format', choices=FORMATS, default='markdown', help='Output format (default: markdown)')
    parser.add_argument('-o', '--output', help='Write to this file instead of standard output')


def add_level_arguments(parser):
    parser.add_argument('-p', dest='p', type=int, help='The prime; required for builtin labels without an implied prime')
    parser.add_argument('--level-bound', type=int, help='Override the uniform level bound n(K, p)')


def add_source_arguments(parser, image=True, reference=False):
    """--catalog / --builtin / --image / --reference, exactly one of them."""
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--catalog', help='Catalog file, looked up in DIVDEG_CATALOG_DIR and the bundled catalogs')
    group.add_argument('--builtin', action='store_true', help='Use every builtin image for the prime -p')
    if image:
        group.add_argument('--image', help='Builtin label (X235l, GL2, 3B, 5Nn, ...) or file#label')
    if reference:
        group.add_argument('--reference', action='store_true', help='Use the published tables over Q')


def destination(command, options):
    return options.get('output') or command.stdout


def load_records(options):
    """The image records selected by --image, --catalog or --builtin."""
    p = options.get('p')
    if options.get('image'):
        return [resolve_image(options['image'], p=p)]
    if options.get('catalog'):
        records = load_catalog(options['catalog'])
        if p is not None:
            records = [r for r in records if r.p == p]
        return records
    if options.get('builtin'):
        if p is None:
            raise ArgumentError("--builtin needs a prime (-p)")
        return builtin_catalog([p])
    return []


def level_config(options, p, records=()):
    """
    LevelConfig for p. Without --level-bound the configured bound is raised
    to the highest declared level among the records.
    """
    explicit = options.get('level_bound')
    config = level_config_for(p, n=explicit)
    if explicit is None and records:
        highest = max(r.declared_level for r in records)
        if highest > config.n:
            config = level_config_for(p, n=highest)
    return config


def infer_prime(options, records, default=None):
    if options.get('p') is not None:
        return options['p']
    if records:
        return records[0].p
    if default is not None:
        return default
    raise ArgumentError("cannot tell which prime to use; pass -p")


def gm_tables(options, records, config, max_level):
    """
    ({(s, M): g}, {(s, M): m}, {(s, M): attained_by}) from the selected source.
    """
    if options.get('reference'):
        g_table, m_table = reference_tables(config.p)
        return g_table, m_table, {}
    if not records:
        raise ArgumentError("catalog is empty")
    if options.get('image'):
        table = constants_table(records[0].group, max_level)
    else:
        table = aggregate_tables(records, config, max_level, use_celery=options.get('celery', False))
    return (
        {key: value.g for key, value in table.items()},
        {key: value.m for key, value in table.items()},
        {key: value.attained_by for key, value in table.items()},
    )
