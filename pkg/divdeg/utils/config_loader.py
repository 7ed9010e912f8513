import logging
from pathlib import Path
from typing import Any, Dict, Optional

from django.conf import settings

from divdeg.exceptions import CatalogNotFound

logger = logging.getLogger(__name__)

BUNDLED_CATALOG_DIR = Path(__file__).resolve().parent.parent / 'catalogs'

DEFAULTS: Dict[str, Any] = {
    'CLOSURE_CAP': 2 ** 22,
    'LEVEL_BOUNDS': {2: 5},
    'DEFAULT_LEVEL_BOUND': 1,
    'BASE_FIELD_LABEL': 'Q',
    'CATALOG_DIR': None,
}


def get_option(name: str) -> Any:
    """
    Read one entry of the DIVDEG settings dictionary.

    Falls back to DEFAULTS when Django settings are not configured, so the
    math modules can be used without a project.
    """
    if settings.configured:
        options = getattr(settings, 'DIVDEG', {}) or {}
        if name in options:
            return options[name]
    return DEFAULTS[name]


def get_closure_cap() -> int:
    return int(get_option('CLOSURE_CAP'))


def default_level_bound(p: int) -> int:
    bounds = get_option('LEVEL_BOUNDS') or {}
    return int(bounds.get(p, get_option('DEFAULT_LEVEL_BOUND')))


def level_config_for(p: int, n: Optional[int] = None, base_field_label: Optional[str] = None):
    """
    Build the LevelConfig for prime p.

    Args:
        p: The prime
        n: Override for the uniform level bound n(K, p)
        base_field_label: Override for the base field label

    Returns:
        A LevelConfig instance
    """
    from divdeg.utils.degrees import LevelConfig

    return LevelConfig(
        p=p,
        n=n if n is not None else default_level_bound(p),
        base_field_label=base_field_label or get_option('BASE_FIELD_LABEL'),
    )


def find_catalog_file(name) -> Path:
    """
    Find a catalog file by trying multiple locations.

    Args:
        name: A path, or a bare file name looked up in the catalog directories

    Returns:
        The path of the first existing candidate

    Raises:
        CatalogNotFound: If no candidate exists
    """
    name = str(name)
    candidates = [Path(name)]

    catalog_dir = get_option('CATALOG_DIR')
    if catalog_dir:
        candidates.append(Path(catalog_dir) / name)
    candidates.append(BUNDLED_CATALOG_DIR / name)

    # Also try every location with the conventional suffix
    if not name.endswith('.cat'):
        candidates += [Path(f"{candidate}.cat") for candidate in list(candidates)]

    for path in candidates:
        if path.is_file():
            logger.info(f"Using catalog file {path}")
            return path

    raise CatalogNotFound(f"catalog '{name}' not found (tried {', '.join(str(c) for c in candidates)})")
