"""Exception types.  All derive from ``ConvAggError`` (itself a ``ValueError``)."""


class ConvAggError(ValueError):
    code = "error"


class InvalidClassCount(ConvAggError):
    code = "invalid-class-count"


class GenerationFailed(ConvAggError):
    code = "generation-failed"


class InvalidProbability(ConvAggError):
    code = "invalid-probability"


class InvalidWeights(ConvAggError):
    code = "invalid-weights"


class ShapeError(ConvAggError):
    code = "shape-error"


class InvalidLabel(ConvAggError):
    code = "invalid-label"


class NumericOverflow(ConvAggError):
    code = "numeric-overflow"


class SolverBreakdown(ConvAggError):
    code = "solver-breakdown"


class DegenerateBinaryProblem(ConvAggError):
    code = "degenerate-binary-problem"

    def __init__(self, row: int):
        super().__init__(f"binary problem for code-matrix row {row} has a single class")
        self.row = row


class ParseError(ConvAggError):
    code = "parse-error"


class DimensionMismatch(ConvAggError):
    code = "dimension-mismatch"


class InvalidBoundParameter(ConvAggError):
    code = "invalid-bound-parameter"
