"""Exception hierarchy shared by every listop module."""


class ListopError(Exception):
    """Base class for all listop errors."""


class InputError(ListopError, ValueError):
    """Arguments are inconsistent or out of range."""


class BudgetError(ListopError):
    """An exhaustive enumeration would exceed the evaluation cap."""


class DegenerateCodeError(ListopError, ValueError):
    """The code has too few distinct codewords for the requested quantity."""


class FormulaDomainError(ListopError, ValueError):
    """A closed-form bound was evaluated outside its admissible domain."""


class ConstructionError(ListopError):
    """A randomized construction failed to meet its validation checks."""


class CodeFormatError(ListopError, ValueError):
    """A code file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
