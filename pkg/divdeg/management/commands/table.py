from django.core.management.base import BaseCommand

from divdeg.utils.degrees import shape_label
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
    help = 'Triangular table of g_{s,M} (and optionally m_{s,M}) for 0 <= s <= M <= max'

    def add_arguments(self, parser):
        add_source_arguments(parser, reference=True)
        add_level_arguments(parser)
        parser.add_argument('--max', dest='max_level', type=int, help='Largest M (default: the level bound n)')
        parser.add_argument('--with-m', action='store_true', help='List g and m per (s, M) instead of the g triangle')
        parser.add_argument('--celery', action='store_true', help='Compute per-image tables through Celery')
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            records = load_records(options)
            p = infer_prime(options, records, default=2 if options['reference'] else None)
            config = level_config(options, p, records)
            max_level = options['max_level'] or config.n
            g_table, m_table, attained = gm_tables(options, records, config, max_level)
            keys = sorted((key for key in g_table if key[1] <= max_level), key=lambda k: (k[0], k[1]))

            if options['with_m']:
                rows = [
                    [s, M, shape_label(p, s, M), g_table[(s, M)], m_table[(s, M)], attained.get((s, M))]
                    for s, M in keys
                ]
                frame = make_frame(rows, ['s', 'M', 'shape', 'g', 'm', 'attained_by'])
            else:
                levels = sorted({M for _, M in keys})
                rows = [
                    [s] + [g_table.get((s, M)) for M in levels]
                    for s in sorted({s for s, _ in keys})
                ]
                frame = make_frame(rows, ['s'] + [f"M={M}" for M in levels])

            source = self._source_label(options, records)
            summary = {'source': source, 'p': p, 'n': config.n, 'images': len(records)}
            render_frame(
                frame,
                options['format'],
                destination(self, options),
                title=f"g_(s,M) for {source}",
                summary=summary,
            )

    def _source_label(self, options, records):
        if options['reference']:
            return 'published tables over Q'
        if options['image']:
            return records[0].label
        if options['builtin']:
            return 'builtin images'
        return options['catalog']
