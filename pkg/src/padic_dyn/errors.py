"""Exception hierarchy shared by all layers."""


class PAdicError(Exception):
    """Base class for every error raised by padic_dyn."""


class DomainError(PAdicError, ValueError):
    """An operation was called outside its mathematical domain."""


class ContextMismatchError(DomainError):
    """Operands live in different p-adic contexts."""


class NotLiftableError(DomainError):
    """Hensel lifting was asked to refine a root that is not simple mod p."""


class PeriodRejectedError(DomainError):
    """A period that provably has no non-fixed solutions was requested."""


class OutOfRegimeError(DomainError):
    """A bound evaluator was asked for a radius outside its validity range."""


class SamplingUnsupportedError(DomainError):
    """The requested sphere cannot be sampled inside Q_p."""
