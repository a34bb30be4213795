"""Exception types shared across the package."""


class ALSMError(Exception):
    """Base class for package errors."""


class DomainError(ALSMError, ValueError):
    """Argument outside the domain of a special function or distribution."""


class QuadratureError(ALSMError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes
    ----------
    estimate : float
        Best estimate available when the subdivision budget ran out.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class MomentDoesNotExist(ALSMError):
    """E(1/W^r) is infinite for the requested mixing law and order."""

    def __init__(self, variant, r, theta):
        super().__init__(f"E(1/W^{r}) does not exist for {variant} with theta={theta}")
        self.variant = variant
        self.r = r
        self.theta = theta


class DegenerateSupport(ALSMError):
    """The location scan landed on the sample minimum or maximum.

    In that case the scale/asymmetry maximizers do not exist (the
    likelihood is maximized in an exponential limit).
    """


class EStepUnderflow(ALSMError):
    """A posterior normalizer vanished for some observation."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class BracketFailure(ALSMError):
    """A scalar theta update found no interior maximum.

    Attributes
    ----------
    theta : float
        The bound at which the objective is largest.
    """

    def __init__(self, message, theta):
        super().__init__(message)
        self.theta = theta


class NestingViolation(ALSMError):
    """The alternative log-likelihood is below the nested null value."""


class InputError(ALSMError):
    """Malformed command-line input (missing column, bad prices, ...)."""


class MissingColumn(InputError):
    """The requested column is not in the CSV header."""


class NonPositivePrice(InputError):
    """A price is zero or negative, so its log-return is undefined.

    Attributes
    ----------
    row : int
        One-based data row (header excluded) holding the offending price.
    """

    def __init__(self, message, row):
        super().__init__(message)
        self.row = row


class FewerThanTwoPrices(InputError):
    """Fewer than two usable prices, so no return can be formed."""
