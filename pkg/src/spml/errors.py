"""Exception types shared across the package."""


class SpmlError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SpmlError, ValueError):
    """Array shapes or declared dimensions do not line up."""


class InputError(SpmlError, ValueError):
    """Numeric input is non-finite or outside its allowed range."""


class ConfigError(SpmlError, ValueError):
    """A configuration value violates its contract."""


class LabelError(SpmlError, ValueError):
    """Label values are not in {0,1} or a label index is out of range."""


class GenerationError(SpmlError, RuntimeError):
    """Synthetic data generation could not satisfy its constraints."""


class CorruptionError(SpmlError, ValueError):
    """A row cannot be reduced to a single observed positive."""


class SplitError(SpmlError, ValueError):
    """Split fractions are invalid or produce an empty partition."""


class EvaluationError(SpmlError, ValueError):
    """Evaluation is undefined for the given inputs."""


class TrainingError(SpmlError, RuntimeError):
    """Training aborted: non-finite loss or gradient."""


class ParseError(SpmlError, ValueError):
    """A dataset or checkpoint file is malformed.

    Carries the offending path and, for line-oriented formats, the
    1-based line number.
    """

    def __init__(self, message: str, *, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)
