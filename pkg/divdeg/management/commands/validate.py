from django.core.management.base import BaseCommand, CommandError

from divdeg.utils.catalog import load_catalog, validate_record
from divdeg.utils.output import make_frame, render_frame

from ._common import EXIT_DATA_ERROR, add_output_arguments, command_errors, destination


class Command(BaseCommand):
    help = 'Validate every image record of a catalog file'

    def add_arguments(self, parser):
        parser.add_argument('catalog', help='Catalog file, looked up in DIVDEG_CATALOG_DIR and the bundled catalogs')
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            records = load_catalog(options['catalog'])
            reports = [validate_record(record) for record in records]

            rows = [
                [r.label, r.p, r.level, r.declared_level, r.order, r.gl2_index, r.defined_at_level,
                 r.advisory, r.minimal_level, r.rzb_index_ok, r.reference_match, r.convention_note,
                 '; '.join(r.notes + r.errors) or None, r.passed]
                for r in reports
            ]
            columns = ['label', 'p', 'level', 'declared_level', 'order', 'gl2_index', 'defined_at_level',
                       'advisory', 'minimal_level', 'rzb_index_ok', 'reference_match', 'convention',
                       'findings', 'passed']
            failed = [r.label for r in reports if not r.passed]
            render_frame(
                make_frame(rows, columns),
                options['format'],
                destination(self, options),
                title=f"Validation of {options['catalog']}",
                summary={'records': len(reports), 'failed': failed},
            )

        if failed:
            raise CommandError(f"{len(failed)} of {len(reports)} records failed validation: {', '.join(failed)}",
                               returncode=EXIT_DATA_ERROR)
        self.stderr.write(self.style.SUCCESS(f"All {len(reports)} records passed validation"))
