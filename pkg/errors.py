"""
Exception hierarchy shared by every module of the fractal-calculus toolkit.

The CLI maps these onto its exit-code contract:
1 for domain/config/consistency failures, 2 for numerical non-convergence.
"""


class FractalCalculusError(Exception):
    """Base class for all errors raised by this project."""


class DomainError(FractalCalculusError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class CapExceededError(DomainError):
    """A memory or refinement guard (segments, levels) would be exceeded."""

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what}: requested {requested} exceeds the configured cap of {cap}")


class BoundaryConditionError(DomainError):
    """An initial profile does not vanish on the Dirichlet boundary."""

    def __init__(self, residuals: dict):
        self.residuals = residuals
        report = ", ".join(f"{where}={value:.3e}" for where, value in residuals.items())
        super().__init__(f"Initial profile violates the boundary conditions ({report})")


class ConsistencyError(FractalCalculusError, ValueError):
    """Computed duality data contradicts the declared duality mode."""


class ConfigError(FractalCalculusError, ValueError):
    """A configuration document failed validation; ``problems`` itemizes why."""

    def __init__(self, source: str, problems: list):
        self.source = source
        self.problems = list(problems)
        listing = "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(f"Invalid configuration in {source}:\n{listing}")


class NonConvergenceError(FractalCalculusError, RuntimeError):
    """A refinement loop hit its cap before meeting the tolerance."""

    def __init__(self, message: str, last_iterates: tuple = ()):
        self.last_iterates = tuple(last_iterates)
        if self.last_iterates:
            message = f"{message} (last iterates: {', '.join(repr(v) for v in self.last_iterates)})"
        super().__init__(message)


class ExpressionError(FractalCalculusError, ValueError):
    """A closed-form expression could not be parsed."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        pointer = " " * position + "^"
        super().__init__(f"{reason} at position {position}\n  {text}\n  {pointer}")
