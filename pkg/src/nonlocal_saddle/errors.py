"""Exception hierarchy shared across the package."""


class NonlocalSaddleError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(NonlocalSaddleError, ValueError):
    """A precondition on an argument was violated."""


class ConfigError(NonlocalSaddleError, ValueError):
    """Configuration parsing or validation failure.

    Carries a JSON-pointer-style path to the offending entry.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"config error at {path or '/'}: {message}")


class AuditInconclusiveError(NonlocalSaddleError):
    """Quadrature in a kernel audit did not converge within budget."""


class AuditFailedError(NonlocalSaddleError):
    """A kernel failed its structural audit and assembly was not overridden."""


class SingularEvaluationError(NonlocalSaddleError, ValueError):
    """Evaluation requested at or beyond a singular point."""


class AssemblyAccuracyError(NonlocalSaddleError):
    """Estimated quadrature error exceeds the assembly tolerance."""

    def __init__(self, worst_entry, estimate, tol):
        self.worst_entry = worst_entry
        self.estimate = estimate
        self.tol = tol
        super().__init__(
            f"assembly quadrature error {estimate:.3e} at entry {worst_entry} "
            f"exceeds tolerance {tol:.3e}"
        )


class AssemblyCorruptionError(NonlocalSaddleError):
    """An assembled matrix lost a structural property (e.g. M not SPD)."""


class NumericError(NonlocalSaddleError):
    """Generic numerical failure (quadrature or eigensolver non-convergence)."""


class ResonanceError(NonlocalSaddleError, ValueError):
    """A slope profile touches or straddles an eigenvalue."""


class NonResonanceContradictionError(NonlocalSaddleError):
    """A system certified nonresonant turned out numerically singular.

    Signals an assembly or spectrum bug rather than a user error.
    """


class UnauditableError(NonlocalSaddleError, ValueError):
    """A custom nonlinearity lacks the declarations needed for an audit."""


class EigenClusterError(InvalidParameterError):
    """A head/tail split was requested inside a numerically repeated cluster."""


class UnsupportedCaseError(NonlocalSaddleError):
    """The slope hypotheses place the problem outside both solvable cases."""

    def __init__(self, classification):
        self.classification = classification
        super().__init__(f"hypothesis gate refused: {classification.reason}")


class NonConvergenceError(NonlocalSaddleError):
    """An iterative solve exhausted its iteration budget."""

    def __init__(self, message, trace=None):
        self.trace = trace or []
        super().__init__(message)
