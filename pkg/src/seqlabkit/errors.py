"""Exception hierarchy shared across the toolkit."""


class SeqLabError(Exception):
    """Base class for all toolkit errors."""


class LengthMismatchError(SeqLabError):
    """Parallel arrays (tokens/tags, refs/preds, ...) differ in length."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class SchemeViolationError(SeqLabError):
    """A tag sequence violates the requested tagging scheme."""

    def __init__(self, index: int, tag: str, message: str | None = None):
        super().__init__(message or f"scheme violation at index {index}: {tag}")
        self.index = index
        self.tag = tag


class OverlapError(SeqLabError):
    """Spans overlap where non-overlapping spans are required."""


class OutOfBoundsError(SeqLabError):
    """A span or token index falls outside the sequence."""


class ReservedCharError(SeqLabError):
    """Text contains a character reserved by the response grammar (':' or ';')."""


class ParseError(SeqLabError):
    """An input file could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class AlignmentError(SeqLabError):
    """Word/subword or layout/log-prob alignment is inconsistent."""


class NoArcsError(SeqLabError):
    """No countable dependency arc exists for the requested statistic."""


class ConfigError(SeqLabError):
    """A batch plan or command configuration is unsatisfiable."""


class SpecError(SeqLabError):
    """A prompt spec contains reserved template markers or is malformed."""


class GrammarError(SeqLabError):
    """An output grammar definition is invalid."""


class ShapeError(SeqLabError):
    """Matrix shapes are incompatible."""
