"""Exception hierarchy shared by all qbmlab modules.

Two families: ``ValidationError`` for inputs that violate a documented
precondition (the CLI maps these to exit code 2) and ``NumericalError`` for
computations that could not reach their accuracy contract (exit code 3).
"""


class QbmError(Exception):
    """Base class for every error raised by qbmlab."""


class ValidationError(QbmError, ValueError):
    """An argument violates a documented precondition."""


class NumericalError(QbmError, ArithmeticError):
    """A numerical procedure failed to meet its accuracy contract."""


# -- special functions ------------------------------------------------------
class DomainError(ValidationError):
    """Series argument outside the supported domain (0 <= z < 1)."""


class PoleAtNonpositiveInteger(ValidationError):
    """Hypergeometric parameter sits on a pole (0 or negative integer)."""


class NoConvergence(NumericalError):
    """Series did not reach the tolerance within the term budget."""


# -- coefficients -----------------------------------------------------------
class ResonantCutoff(ValidationError):
    """r_c is (numerically) a positive integer; the closed form has a pole."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


# -- analytic observables ---------------------------------------------------
class OutOfGrid(ValidationError):
    """Query time lies outside the coefficient grid."""


class DegenerateState(ValidationError):
    """Mean occupation vanishes, so the Mandel parameter is undefined."""


# -- Monte Carlo ------------------------------------------------------------
class CutoffTooSmall(ValidationError):
    """Fock cutoff leaves too little headroom for the requested state."""


class TruncationBreach(NumericalError):
    """Population leaked into the top Fock levels beyond eps_trunc."""


class NullJump(NumericalError):
    """A jump operator annihilated the state."""


# -- border -----------------------------------------------------------------
class BracketFailure(NumericalError):
    """Bisection endpoints do not bracket a sign change."""
