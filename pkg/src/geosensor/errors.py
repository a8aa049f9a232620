"""Exception hierarchy shared by every stage of the pipeline."""


class GeosensorError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(GeosensorError):
    """Bad configuration or input detected before any work is done."""


class MissingFile(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class EmptyField(ValidationError):
    pass


class DuplicateYear(ValidationError):
    pass


class NegativeValue(ValidationError):
    pass


class BadCoordinate(ValidationError):
    pass


class UnknownPaperId(ValidationError):
    pass


class NoData(GeosensorError):
    """A burden series has no observation in the years a rule needs."""


class NoCentroid(GeosensorError):
    """A country (or state) matched but the gazetteer has no centroid row."""


class GeocodeMiss(GeosensorError):
    pass


class EndpointUnreachable(GeosensorError):
    pass


class MalformedResponse(GeosensorError):
    pass


class DesignError(GeosensorError):
    """The regression design matrix violates its preconditions."""


class SingularInformation(GeosensorError):
    pass


class SeparationError(GeosensorError):
    """The likelihood has no finite maximum (fitted means diverge)."""


class AllZeroResponse(SeparationError):
    pass


class MissingGeometry(GeosensorError):
    pass


class MalformedBoundaries(ValidationError):
    pass


class StageError(GeosensorError):
    """Wraps a failure inside one pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
