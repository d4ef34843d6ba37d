"""Exception hierarchy. The CLI maps these to exit codes."""


class TatekitError(Exception):
    exit_code = 1


class PreconditionError(TatekitError, ValueError):
    exit_code = 2


class ZeroInverseError(PreconditionError, ZeroDivisionError):
    pass


class CapExceeded(TatekitError):
    exit_code = 3


class SearchExhausted(TatekitError):
    exit_code = 4


class InternalContradiction(TatekitError, AssertionError):
    """A check that theory guarantees has failed; indicates a bug."""
