"""
Error hierarchy for division-degree computations.

Management commands map these onto exit statuses: ResourceCapExceeded exits
with 3, every other DivdegError with 2.
"""


class DivdegError(Exception):
    """Base class for every error raised by the divdeg package."""


class StructuralError(DivdegError):
    """Matrices, groups or subgroups living over different moduli were combined."""


class ArgumentError(DivdegError, ValueError):
    """An argument is out of range, unknown, or incompatible with the others."""


class ResourceCapExceeded(DivdegError):
    """A group closure would enumerate more elements than the configured cap."""

    def __init__(self, cap, projected=None, what="group closure"):
        self.cap = cap
        self.projected = projected
        detail = f" (projected {projected} elements)" if projected is not None else ""
        super().__init__(f"{what} exceeds the closure cap of {cap} elements{detail}")


class CatalogError(DivdegError):
    """Problem with a catalog file or a catalog record."""


class CatalogNotFound(CatalogError):
    """No catalog file matched the requested name."""


class CatalogParseError(CatalogError):
    """A catalog line could not be parsed."""

    def __init__(self, message, line_number):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class CatalogDataError(CatalogError):
    """A catalog record parsed but its data is invalid."""

    def __init__(self, message, label=None):
        self.label = label
        prefix = f"image {label}: " if label else ""
        super().__init__(f"{prefix}{message}")


class TableEntryMissing(DivdegError):
    """A bound needs a g/m table entry that was never computed."""

    def __init__(self, s, M):
        self.s = s
        self.M = M
        super().__init__(f"table has no entry for (s, M) = ({s}, {M})")
