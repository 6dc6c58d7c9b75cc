"""Exception types shared across the package."""


class CorrectnessError(RuntimeError):
    """An internal invariant that is guaranteed by theory was violated.

    Raised e.g. when a per-site flip bound is exceeded or a site labeled
    frozen flips afterwards.  Always indicates a bug (or corrupted input),
    never a statistical fluctuation.
    """


class TieError(CorrectnessError):
    """A zero energy change (tie) occurred where the model forbids it.

    Ties have probability zero under continuous couplings and are impossible
    for the homogeneous zero-field model on a full-degree site; hitting one
    means degenerate couplings or a bug.
    """
