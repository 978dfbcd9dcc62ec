"""Exception types shared across the package."""


class ContractViolationError(Exception):
    """A numerical invariant (trace, Hermiticity, positivity, residual) failed."""


class IntegrationError(ContractViolationError):
    """The adaptive integrator failed to reach the requested time."""


class DegenerateDerivativeError(ContractViolationError):
    """Eigenbranch matching was ambiguous near a spectral degeneracy."""
