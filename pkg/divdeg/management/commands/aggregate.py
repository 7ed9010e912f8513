from django.core.management.base import BaseCommand

from divdeg.exceptions import ArgumentError
from divdeg.utils.degrees import (
    aggregate_catalog,
    check_divisible_by,
    check_records,
    image_tables,
    merge_tables,
)
from divdeg.utils.output import make_frame, render_frame
from divdeg.utils.reference import Q2_G_TABLE

from ._common import (
    add_level_arguments,
    add_output_arguments,
    add_source_arguments,
    command_errors,
    destination,
    infer_prime,
    level_config,
    load_records,
)


class Command(BaseCommand):
    help = 'Aggregate g_{s,M}(K, p) and m_{s,M}(K, p) over every image of a catalog'

    def add_arguments(self, parser):
        add_source_arguments(parser, image=False)
        add_level_arguments(parser)
        parser.add_argument('-s', dest='s', type=int, help='Only this s (needs -M)')
        parser.add_argument('-M', dest='M', type=int, help='Only this M (needs -s)')
        parser.add_argument('--max', dest='max_level', type=int, help='Largest M (default: the level bound n)')
        parser.add_argument('--celery', action='store_true', help='Compute per-image tables through Celery')
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            records = load_records(options)
            p = infer_prime(options, records)
            config = level_config(options, p, records)
            check_records(records, config)
            columns = ['s', 'M', 'g', 'm', 'attained_by']
            summary = {'p': p, 'n': config.n, 'images': len(records)}

            if options['s'] is not None or options['M'] is not None:
                s, M = options['s'], options['M']
                if s is None or M is None:
                    raise ArgumentError("-s and -M go together")
                result = aggregate_catalog(records, config, s, M)
                frame = make_frame([[s, M, result.g, result.m, result.attained_by]], columns)
            else:
                max_level = options['max_level'] or config.n
                tables = image_tables(records, max_level, use_celery=options['celery'])
                aggregated = merge_tables(records, tables)
                rows = [
                    [s, M, result.g, result.m, result.attained_by]
                    for (s, M), result in sorted(aggregated.items())
                ]
                frame = make_frame(rows, columns)
                if p == 2 and config.base_field_label == 'Q':
                    summary['reference_violations'] = self._violations(records, tables)

            render_frame(
                frame,
                options['format'],
                destination(self, options),
                title=f"Aggregated constants over {len(records)} images (p = {p})",
                summary=summary,
            )
            violations = summary.get('reference_violations')
            if violations:
                self.stderr.write(self.style.WARNING(
                    f"{len(violations)} per-image values are not divisible by the published (Q, 2) table"
                ))

    def _violations(self, records, tables):
        found = []
        for record, table in zip(records, tables):
            g_values = {key: g for key, (g, _) in table.items()}
            for s, M in check_divisible_by(g_values, Q2_G_TABLE):
                found.append(f"{record.label} ({s},{M})")
        return found
