"""Exception types raised by the solver stack."""


class DegenerateRowError(RuntimeError):
    """New measurement row is (numerically) in the span of the existing rows.

    The inverse-Gram update divides by the Schur complement of the enlarged
    Gram matrix; a dependent row drives it to zero, so the row carries no new
    information and is rejected.
    """


class GramCapacityError(RuntimeError):
    """More rows than the signal dimension: the Gram matrix stops being invertible."""


class DivergenceError(RuntimeError):
    """An iterate became non-finite; the (step size, penalty) configuration is unstable.

    Attributes
    ----------
    iteration : int
        1-based index of the first non-finite iterate.
    """

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration
