"""Exception types shared across the package."""


class PoleError(ArithmeticError):
    """A denominator factor vanished (or fell below the pole floor).

    Attributes
    ----------
    factor : int
        Position of the offending factor in the denominator list.
    argument : complex
        Argument passed to the bracket function for that factor.
    value : complex
        The (numerically) vanishing value.
    """

    def __init__(self, message, factor=None, argument=None, value=None):
        super().__init__(message)
        self.factor = factor
        self.argument = argument
        self.value = value


class ParameterDomainError(ValueError):
    """Parameters outside the domain where a function is defined."""


class UnsupportedRegimeError(ValueError):
    """The requested regime is excluded, e.g. |q| = 1 for G_delta."""


class GenericityError(ValueError):
    """Model parameters violate the genericity floor [n delta], [n kappa] != 0."""


class BalancingError(ValueError):
    """A balancing condition required by a kernel identity is violated."""


class SamplingError(RuntimeError):
    """The sampler could not find pole-free points within its retry budget."""
