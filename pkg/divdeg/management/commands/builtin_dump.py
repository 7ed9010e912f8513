from django.core.management.base import BaseCommand

from divdeg.utils.catalog import builtin_catalog, serialize_catalog

from ._common import command_errors


class Command(BaseCommand):
    help = 'Write the builtin images in the catalog file format'

    def add_arguments(self, parser):
        parser.add_argument('--primes', nargs='+', type=int, default=[2, 3, 5, 7],
                            help='Primes to dump (default: 2 3 5 7)')
        parser.add_argument('--no-two-adic', action='store_true', help='Leave out X235l')
        parser.add_argument('-o', '--output', help='Write to this file instead of standard output')

    def handle(self, *args, **options):
        with command_errors():
            records = builtin_catalog(options['primes'], include_two_adic=not options['no_two_adic'])
            if options['output']:
                with open(options['output'], 'w', encoding='utf-8') as handle:
                    serialize_catalog(records, handle)
            else:
                serialize_catalog(records, self.stdout)
        self.stderr.write(self.style.SUCCESS(f"Wrote {len(records)} builtin images"))
