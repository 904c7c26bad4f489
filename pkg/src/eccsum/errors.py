"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (shapes, ids, schema, ranges)."""


class NumericalFailure(RuntimeError):
    """The LP kernel lost numerical control; ``diagnostics`` says where."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnsupportedError(InputError):
    """Requested mode is not available for these parameters."""


class DegenerateSequence(InputError):
    """A pair sequence whose eccentric denominator vanishes."""
