"""Exception taxonomy for polyeig.

All library errors derive from :class:`PolyeigError` so callers can catch
the whole family with one clause.  ``ValueError`` is still raised for plain
argument-validation mistakes (wrong shapes, out-of-range scalars).
"""


class PolyeigError(Exception):
    """Base class for all polyeig errors."""


class SingularMatrixError(PolyeigError):
    """A matrix that must be solved against is singular to working tolerance."""


class EmptyBasisError(PolyeigError):
    """Orthonormalization dropped every column."""


class DegenerateProjectorError(PolyeigError):
    """The rank-1 oblique projector denominator x^H Phi x vanishes."""


class NotInDomainError(PolyeigError):
    """The vector admits no positive-type root of x^H F(lambda) x = 0 inside
    the admissible interval.  An ordinary outcome for pencils with indefinite
    leading coefficient; the solver reacts by re-drawing the start vector."""


class AssumptionViolatedError(PolyeigError):
    """A structural hypothesis (positive type, monotone decrease, positive
    constraint form) failed at runtime, flagging a problem outside the
    supported class."""


class NoRitzValueError(PolyeigError):
    """The projected polynomial has no real positive-type eigenvalue in the
    admissible interval (subspace degeneration)."""


class PreconditionerBreakdownError(PolyeigError):
    """Inner CG met nonpositive curvature: the operator is not numerically
    positive definite."""


class DegenerateSpectrumError(PolyeigError):
    """No strictly positive eigenvalue where the rate constants need one."""


class OnEigenvalueError(PolyeigError):
    """An inertia probe landed on an eigenvalue (zero count > 0); the caller
    should nudge the probe point."""


class BadBracketError(PolyeigError):
    """Bisection bracket does not enclose the target eigenvalue."""


class ProblemTooLargeError(PolyeigError):
    """Dense brute-force eigensolve guard exceeded."""


class NotHyperbolicError(PolyeigError):
    """Generated quadratic failed its hyperbolicity certification."""


class NotDefiniteError(PolyeigError):
    """The polynomial is not negative definite at the interval anchor."""


class NoAdmissibleStartError(PolyeigError):
    """All random start-vector draws fell outside the admissible domain."""


class EmptyWindowError(PolyeigError):
    """Too few converging iterations to form an asymptotic rate window."""


class ParseError(PolyeigError):
    """Malformed on-disk artifact.  Carries the 1-based line number."""

    def __init__(self, message, line=None, path=None):
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}: "
        super().__init__(f"{loc}{message}")
        self.line = line
        self.path = path
