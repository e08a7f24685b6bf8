"""Exception types shared across the engine."""


class ScistoryError(Exception):
    """Base class for all engine errors."""


class SchemaError(ScistoryError):
    """Structured input does not match the expected shape.

    The message names the offending path, e.g. ``sections[0].paragraphs[2]``.
    """


class EmptyDocumentError(ScistoryError):
    """Input text contains no usable content."""


class ParameterError(ScistoryError, ValueError):
    """A parameter is outside its documented range."""


class TrainingDataError(ScistoryError):
    """Labeled corpus is unusable (empty, single-class, ...)."""


class OversizeSentenceError(ScistoryError):
    """A single sentence exceeds the block character budget."""


class CrossBoundaryError(ScistoryError):
    """A block span straddles a sentence-segment boundary."""


class BlockRangeError(ScistoryError):
    """A block offset/length pair is out of range."""


class ConsistencyError(ScistoryError):
    """Internal references disagree (unknown entity id, missing partition entry, ...)."""


class UndefinedModularityError(ScistoryError):
    """Modularity is undefined for a graph without edge weight."""


class MetadataError(ScistoryError):
    """Required document metadata (e.g. publication date) is missing."""


class NotFoundError(ScistoryError):
    """Requested record does not exist in the store."""


class MigrationError(ScistoryError):
    """Stored record was written with an incompatible schema version."""


class StoreError(ScistoryError):
    """Repository I/O failure."""


class EmptyCollectionError(ScistoryError):
    """Collection-level view requested on an empty store."""


class ConfigurationError(ScistoryError):
    """Pipeline configuration is invalid (missing model, unreadable path, ...)."""


class AnalysisError(ScistoryError):
    """A pipeline stage failed; carries the stage label."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"analysis failed at stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
