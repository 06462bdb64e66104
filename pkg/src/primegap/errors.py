"""Exception hierarchy shared by all primegap modules."""


class PrimeGapError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(PrimeGapError, ValueError):
    pass


class DomainError(PrimeGapError, ValueError):
    """Input lies outside the set on which the function is defined."""


class TableRangeError(PrimeGapError, IndexError):
    """A PrimeTable is too small for the requested range."""


class InadmissibleError(PrimeGapError, ValueError):
    pass


class WindowTooSmallError(PrimeGapError, ValueError):
    pass


class DegenerateBasisError(PrimeGapError, ValueError):
    pass


class UnsupportedError(PrimeGapError, NotImplementedError):
    pass


class ConfigError(PrimeGapError, ValueError):
    """Configuration failed validation.

    ``violations`` holds one ``(line_number, message)`` pair per problem;
    line number is ``None`` for whole-file problems such as a missing key.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = []
        for lineno, msg in self.violations:
            lines.append(f"line {lineno}: {msg}" if lineno is not None else msg)
        super().__init__("; ".join(lines))


class ReportIOError(PrimeGapError, OSError):
    """Writing or reading a report or config file failed."""
