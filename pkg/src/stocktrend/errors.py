"""Exception hierarchy.

Every error carries a distinct process exit code so the CLI can map failures
without a lookup table of its own.
"""


class StockTrendError(Exception):
    exit_code = 1


# input parsing
class MalformedHeader(StockTrendError):
    exit_code = 10


class RowParseError(StockTrendError):
    exit_code = 11

    def __init__(self, line: int, column: str, message: str = ""):
        self.line = line
        self.column = column
        detail = f": {message}" if message else ""
        super().__init__(f"line {line}, column {column!r}{detail}")


class EmptyFile(StockTrendError):
    exit_code = 12


class ValidationFailed(StockTrendError):
    exit_code = 13


# series and indicator math
class InvalidAlpha(StockTrendError):
    exit_code = 20


class EmptySeries(StockTrendError):
    exit_code = 21


class SeriesTooShort(StockTrendError):
    exit_code = 22


class LengthMismatch(StockTrendError):
    exit_code = 23


class InvalidPeriods(StockTrendError):
    exit_code = 24


class EmptyDataset(StockTrendError):
    exit_code = 25


# forest
class EmptyNode(StockTrendError):
    exit_code = 30


class EmptyTrainingSet(StockTrendError):
    exit_code = 31


class InvalidParams(StockTrendError):
    exit_code = 32


class UntrainedModel(StockTrendError):
    exit_code = 33


class NoOobCoverage(StockTrendError):
    exit_code = 34


# baselines
class SingleClassData(StockTrendError):
    exit_code = 40


class TooFewSamples(StockTrendError):
    exit_code = 41


# evaluation
class InvalidFraction(StockTrendError):
    exit_code = 50


class SplitTooSmall(StockTrendError):
    exit_code = 51


class EmptyInput(StockTrendError):
    exit_code = 52


class SingleClassLabels(StockTrendError):
    exit_code = 53


class TooFewPoints(StockTrendError):
    exit_code = 54


class DegenerateHull(StockTrendError):
    exit_code = 55


class InvalidSpec(StockTrendError):
    exit_code = 56


class UnsupportedFormat(StockTrendError):
    exit_code = 57


# model files
class SchemaVersionError(StockTrendError):
    exit_code = 60


class ModelFormatError(StockTrendError):
    exit_code = 61


def exit_code_table():
    """(code, name) pairs for every concrete error, sorted by code."""
    seen = []
    stack = list(StockTrendError.__subclasses__())
    while stack:
        cls = stack.pop()
        seen.append((cls.exit_code, cls.__name__))
        stack.extend(cls.__subclasses__())
    return sorted(seen)
