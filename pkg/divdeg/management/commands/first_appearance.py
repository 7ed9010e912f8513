from django.core.management.base import BaseCommand

from divdeg.utils.degrees import first_appearance_table, shape_label
from divdeg.utils.output import make_frame, render_frame

from ._common import (
    add_level_arguments,
    add_output_arguments,
    add_source_arguments,
    command_errors,
    destination,
    gm_tables,
    infer_prime,
    level_config,
    load_records,
)


class Command(BaseCommand):
    help = 'Torsion shapes listed by the least degree in which they can first appear'

    def add_arguments(self, parser):
        add_source_arguments(parser, reference=True)
        add_level_arguments(parser)
        parser.add_argument('--max-degree', type=int, default=16, help='Largest degree to list (default: 16)')
        parser.add_argument('--celery', action='store_true', help='Compute per-image tables through Celery')
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            records = load_records(options)
            p = infer_prime(options, records, default=2 if options['reference'] else None)
            config = level_config(options, p, records)
            _, m_table, _ = gm_tables(options, records, config, config.n)
            buckets = first_appearance_table(m_table, config, options['max_degree'])

            rows = [
                [degree, s, N, shape_label(p, s, N)]
                for degree, shapes in buckets.items()
                for s, N in shapes
            ]
            frame = make_frame(rows, ['degree', 's', 'N', 'shape'])
            render_frame(
                frame,
                options['format'],
                destination(self, options),
                title=f"First degree of appearance of {p}-primary torsion (degree <= {options['max_degree']})",
                summary={'p': p, 'n': config.n, 'degrees': list(buckets)},
            )
