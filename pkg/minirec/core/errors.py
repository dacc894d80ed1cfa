"""
Errors - Exception hierarchy for minirec

Every error derives from ValueError so callers that only know
``except ValueError`` keep working. The CLI maps each class to an exit code:

- ValidationError, PrecisionError, ConfigError, ParseError -> 2
- InvariantViolation -> 3
- CapExceededError -> 4
"""

from typing import Any, List, Optional, Sequence


class MinirecError(ValueError):
    """Base class for all minirec errors"""
    exit_code = 1


class ValidationError(MinirecError):
    """Input failed validation (bad window, bad parameter, missing file)"""
    exit_code = 2


class ConfigError(ValidationError):
    """Run configuration does not match its schema"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class PrecisionError(ValidationError):
    """Working precision is too low to separate the requested quantities"""

    def __init__(self, message: str, required_bits: int):
        self.required_bits = required_bits
        super().__init__(f"{message} (requires at least {required_bits} bits of precision)")


class CapExceededError(MinirecError):
    """A configured resource cap would be exceeded"""
    exit_code = 4

    def __init__(self, what: str, requested: int, cap: int, hint: str = ""):
        self.what = what
        self.requested = requested
        self.cap = cap
        message = f"{what}: {requested} exceeds the configured cap of {cap}"
        if hint:
            message += f"; {hint}"
        super().__init__(message)


class NotFound(MinirecError):
    """No integer within the search bound satisfied the approximation"""

    def __init__(self, message: str, best_n: Optional[int] = None, best_norm: Any = None):
        self.best_n = best_n
        self.best_norm = best_norm
        if best_n is not None:
            message += f" (best n={best_n}, max-norm={float(best_norm):.6g})"
        super().__init__(message)


class EmbeddingError(MinirecError):
    """Some elements of Z_k^d had no distinct approximant within the bound"""

    def __init__(self, failures: Sequence[tuple]):
        self.failures = list(failures)
        shown = ", ".join(str(w) for w in self.failures[:5])
        more = "" if len(self.failures) <= 5 else f" and {len(self.failures) - 5} more"
        super().__init__(f"No approximant found for {len(self.failures)} targets: {shown}{more}")


class InvariantViolation(MinirecError):
    """A checked invariant failed during a run"""
    exit_code = 3

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} invariant violation(s): " + "; ".join(self.violations[:3]))
