from celery import shared_task
import io
import logging

from .utils.catalog import parse_catalog_file, serialize_catalog_text
from .utils.degrees import constants_table

logger = logging.getLogger(__name__)


def task_payload(record):
    """JSON-serializable description of one image, as the task expects it."""
    return {'label': record.label, 'catalog': serialize_catalog_text([record])}


@shared_task(bind=True)
def compute_constants_table(self, payload, max_level):
    """
    Celery task computing the g/m constants table of one image.

    Returns:
        {"label": ..., "entries": [[s, M, g, m], ...]} sorted by (M, s)
    """
    (record,) = parse_catalog_file(io.StringIO(payload['catalog']))
    if self.request.id:
        self.update_state(state='PROGRESS', meta={'label': record.label, 'phase': 'enumerating'})
    logger.info(f"Computing constants table of {record.label} up to level {max_level}")

    table = constants_table(record.group, max_level)
    entries = [[s, M, c.g, c.m] for (s, M), c in sorted(table.items(), key=lambda item: (item[0][1], item[0][0]))]
    logger.info(f"Finished constants table of {record.label} ({len(entries)} entries)")
    return {'label': record.label, 'entries': entries}
