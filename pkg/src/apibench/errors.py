"""Exception types raised by the pipeline stages."""


class ApiBenchError(Exception):
    """Base class for all operational errors."""


# corpus
class RootNotFound(ApiBenchError):
    pass


class NoFilesRetained(ApiBenchError):
    """Every discovered file was filtered or failed the parse gate."""


# locator
class ParseFailure(ApiBenchError):
    """A corpus record no longer parses; signals corpus corruption."""


# taskgen
class SpanOutOfBounds(ApiBenchError):
    pass


class UnbalancedOutput(ApiBenchError):
    """A completion never closes the already-open argument list."""


# modelgw
class BackendUnavailable(ApiBenchError):
    pass


class ReplayMiss(ApiBenchError):
    """Strict replay was asked for a request digest that was never recorded."""


class BudgetExceeded(ApiBenchError):
    pass


# metrics
class EmptyReference(ApiBenchError):
    pass


class ProviderFailure(ApiBenchError):
    pass


class NoCleanSamples(ApiBenchError):
    pass


class LengthMismatch(ApiBenchError):
    pass


class DegenerateMarginals(ApiBenchError):
    """Expected agreement is 1, kappa is undefined."""


# annotate
class EmptyCell(ApiBenchError):
    pass


class InsufficientCleanSamples(ApiBenchError):
    pass


# drfix
class MissingContext(ApiBenchError):
    """A stage prompt was rendered without the prior stage outputs."""


class CategoryParseFailure(ApiBenchError):
    """Detect output names no known category and is not a refusal."""


class RepairExtractionFailure(ApiBenchError):
    """No code block and no parseable region in the fix output."""


# report
class MissingData(ApiBenchError):
    pass
