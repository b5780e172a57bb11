"""Package-level exception types."""


class NumericalDegeneracyError(RuntimeError):
    """A requested quantity has no numerically meaningful value.

    Raised for vanishing posterior moments (an estimate read at the
    wrong periodicity), trajectory ensembles containing such records,
    and rotation columns whose stability checks fail.
    """
