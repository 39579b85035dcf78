"""Exception hierarchy shared by every module of the package."""


class CredenceError(Exception):
    """Base class for all package errors."""


class ModelError(CredenceError, ValueError):
    """Invalid model parameters or beliefs."""


class IndexedModelError(ModelError):
    """A model error tied to a specific (1-based) treatment/type index."""

    def __init__(self, message, index):
        super().__init__(f"{message} (index {index})")
        self.index = index


class LengthMismatch(IndexedModelError):
    pass


class NonIncreasingCosts(IndexedModelError):
    pass


class NonPositiveSurplus(IndexedModelError):
    pass


class InvalidBelief(ModelError):
    pass


class InvalidPriceList(ModelError):
    pass


class EmptySupport(ModelError):
    pass


class BayesPlausibilityError(ModelError):
    pass


class SolverFailure(CredenceError):
    """The LP kernel hit its pivot cap (numerical degeneracy)."""


class BracketFailure(CredenceError):
    """A level crossing could not be bracketed on a segment."""


class NotApplicable(CredenceError):
    """A construction was requested outside the regime where it exists."""


class ConstructionCheckFailed(CredenceError):
    def __init__(self, k, ell, slack):
        super().__init__(
            f"client prefers treatment of posterior {ell} at posterior {k} (slack {slack:.3e})"
        )
        self.pair = (k, ell)
        self.slack = slack


class NotClientWorst(CredenceError):
    pass


class WrongArity(CredenceError):
    pass


class WrongOrdering(CredenceError):
    pass


class OutOfRegime(CredenceError):
    pass


class SpecInfeasible(CredenceError):
    pass
