"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class InputError(WorkbenchError):
    """A caller-supplied value violates a documented precondition."""


class DegeneracyError(WorkbenchError):
    """A computation hit a degenerate configuration it cannot repair.

    Raised e.g. when minor-gcd secancy polynomials stay inconsistent with the
    pointwise rank scan after retries, or when a sampling budget is exhausted.
    """


class InternalError(WorkbenchError):
    """An internal consistency check failed; indicates an arithmetic bug."""


class InterpolationNoForm(WorkbenchError):
    """The evaluation matrix has trivial nullspace: no form of this degree."""


class InterpolationAmbiguous(WorkbenchError):
    """Nullity >= 2: the sample points do not pin down a unique form."""


class ZLineError(InputError):
    """A z-line invariant is violated; the message names the invariant."""
