"""Exception types shared across the library and the CLI exit-code contract."""


class ValidationError(ValueError):
    """Malformed input: bad file, out-of-range index, violated precondition.

    Maps to CLI exit code 1.
    """


class NumericalError(RuntimeError):
    """A numerical check failed: non-integer index, non-unitary operator,
    block leakage above tolerance.

    Maps to CLI exit code 2.
    """
