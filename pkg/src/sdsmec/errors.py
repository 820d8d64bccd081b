"""Exception hierarchy shared by the library and the CLI."""


class SDSMError(Exception):
    """Base class for every error raised by sdsmec."""


class DimensionMismatchError(SDSMError, ValueError):
    """Two objects that must describe the same agents/artifacts do not."""


class ConstraintViolationError(SDSMError, ValueError):
    """An incidence matrix has a 1 in a prohibited cell or a 0 in a required cell."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class FitError(SDSMError):
    """The logistic regression could not be fitted at all (e.g. no free cells)."""


class ConvergenceWarning(UserWarning):
    """The logistic regression hit its iteration limit, usually from separation."""


class InfeasibleSpaceError(SDSMError, ValueError):
    """Margin totals or dimensions are inconsistent, so the space is ill-posed."""


class SpaceTooLargeError(SDSMError):
    """An enumeration request exceeds the configured desk-scale bounds."""


class FormatError(SDSMError, ValueError):
    """A CSV/JSON input file is malformed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
