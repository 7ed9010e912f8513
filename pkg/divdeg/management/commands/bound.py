from django.core.management.base import BaseCommand

from divdeg.exceptions import ArgumentError
from divdeg.utils.degrees import (
    bound_entry,
    divisibility_bound,
    generic_prime_degree,
    max_two_power_order,
    rational_two_adic_bound,
    shape_label,
)
from divdeg.utils.output import make_frame, render_frame

from ._common import (
    add_level_arguments,
    add_output_arguments,
    command_errors,
    destination,
    gm_tables,
    infer_prime,
    level_config,
    load_records,
)


class Command(BaseCommand):
    help = 'Divisibility and minimal-degree bounds for torsion of shape (s, N)'

    def add_arguments(self, parser):
        group = parser.add_mutually_exclusive_group()
        group.add_argument('--catalog', help='Catalog file')
        group.add_argument('--builtin', action='store_true', help='Use every builtin image for the prime -p')
        group.add_argument('--image', help='Builtin label or file#label')
        group.add_argument('--reference', action='store_true', help='Use the published tables over Q')
        add_level_arguments(parser)
        parser.add_argument('-s', dest='s', type=int, help='Exponent of the smaller cyclic factor')
        parser.add_argument('-N', dest='N', type=int, help='Exponent of the larger cyclic factor')
        parser.add_argument('--degree', type=int, help='Largest 2-power order of a point in this degree over Q')
        parser.add_argument('--exceptional', action='store_true',
                            help='Use the exceptional closed form for s >= 4 (p = 2 over Q)')
        parser.add_argument('--celery', action='store_true', help='Compute per-image tables through Celery')
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            if options['degree'] is not None:
                self._degree(options)
                return

            if options['s'] is None or options['N'] is None:
                raise ArgumentError("-s and -N are required unless --degree is given")
            if not any(options.get(key) for key in ('catalog', 'builtin', 'image', 'reference')):
                raise ArgumentError("choose one of --catalog, --builtin, --image or --reference")

            records = load_records(options)
            p = infer_prime(options, records, default=2 if options['reference'] else None)
            config = level_config(options, p, records)
            s, N = options['s'], options['N']
            g_table, m_table, _ = gm_tables(options, records, config, config.n)

            row = [s, N, shape_label(p, s, N), divisibility_bound(g_table, config, s, N),
                   divisibility_bound(m_table, config, s, N)]
            columns = ['s', 'N', 'shape', 'g_bound', 'm_bound']
            if p == 2 and config.base_field_label == 'Q':
                row.append(rational_two_adic_bound(s, N, exceptional=options['exceptional']))
                columns.append('closed_form_Q')
            elif p != 2:
                row.append(generic_prime_degree(p, s, N))
                columns.append('surjective_image')

            entry = bound_entry(config, s, N)
            render_frame(
                make_frame([row], columns),
                options['format'],
                destination(self, options),
                title=f"Bounds for {shape_label(p, s, N)}",
                summary={'p': p, 'n': config.n, 'table_entry': f"({entry[0]},{entry[1]})"},
            )

    def _degree(self, options):
        if options.get('p') not in (None, 2):
            raise ArgumentError("--degree bounds 2-power torsion over Q; use -p 2 or omit -p")
        d = options['degree']
        N = max_two_power_order(d)
        render_frame(
            make_frame([[d, N, f"Z/{2 ** N}"]], ['degree', 'max_N', 'largest_cyclic']),
            options['format'],
            destination(self, options),
            title=f"Largest 2-power torsion point in degree {d}",
        )
