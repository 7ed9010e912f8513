from django.core.management.base import BaseCommand

from divdeg.utils.catalog import resolve_image
from divdeg.utils.degrees import build_degree_report, shape_label
from divdeg.utils.output import make_frame, render_frame

from ._common import (
    add_level_arguments,
    add_output_arguments,
    command_errors,
    destination,
    level_config,
)


class Command(BaseCommand):
    help = 'Degrees [K(T):K] of the torsion subgroups of shape (s, N) for one image'

    def add_arguments(self, parser):
        parser.add_argument('--image', required=True, help='Builtin label (X235l, GL2, 3B, ...) or file#label')
        parser.add_argument('-s', dest='s', type=int, required=True, help='Exponent of the smaller cyclic factor')
        parser.add_argument('-N', dest='N', type=int, required=True, help='Exponent of the larger cyclic factor')
        add_level_arguments(parser)
        add_output_arguments(parser)

    def handle(self, *args, **options):
        with command_errors():
            record = resolve_image(options['image'], p=options['p'])
            config = level_config(options, record.p, [record])
            s, N = options['s'], options['N']
            report = build_degree_report(record, s, N, config)

            frame = make_frame(report.indices, ['subgroup', 'index'])
            summary = {
                'image': report.label,
                'p': report.p,
                'shape': f"({s}, {N})",
                'case': report.case,
                'g': report.g,
                'm': report.m,
                'g_bound': report.g_bound,
                'm_bound': report.m_bound,
                'notes': report.notes,
            }
            render_frame(
                frame,
                options['format'],
                destination(self, options),
                title=f"Degrees of {shape_label(record.p, s, N)} for {record.label}",
                summary=summary,
            )
