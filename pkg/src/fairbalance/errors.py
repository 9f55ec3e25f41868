"""Exception types raised across the package."""


class FairbalanceError(Exception):
    """Base class for all package errors."""


class SchemaError(FairbalanceError):
    """A required column is missing or the schema is malformed."""


class IngestionError(FairbalanceError):
    """A CSV row could not be converted under the supplied schema."""


class EmptyDatasetError(FairbalanceError):
    """Ingestion produced zero usable rows."""


class DegenerateRatioError(FairbalanceError):
    """An imbalance ratio involves an empty subgroup cell."""


class StratificationError(FairbalanceError):
    """A class has fewer members than the number of folds."""


class DegenerateDownsampleError(FairbalanceError):
    """Downsampling would empty the target cell."""


class NeighborPoolError(FairbalanceError):
    """The neighbor pool is too small for the requested k."""


class ReweighError(FairbalanceError):
    """Reweighing requires all four subgroup cells to be non-empty."""


class TrainingError(FairbalanceError):
    """The training set cannot be fit (e.g. a single class present)."""


class ExperimentError(FairbalanceError):
    """One or more cross-validation folds failed."""
