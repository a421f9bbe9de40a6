from __future__ import annotations

from typing import Any, Optional, Sequence


class DftError(RuntimeError):
    pass


class UnknownBasic(DftError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Assignment has no failure time for basic event '{name}'")
        self.name = name


class StepCapExceeded(DftError):
    def __init__(self, partial: Any, steps: int) -> None:
        super().__init__(f"Rewrite step cap reached after {steps} rule applications")
        self.partial = partial
        self.steps = steps


class NonPositiveParameter(DftError, ValueError):
    pass


class UnsupportedFamily(DftError):
    pass


class UnmatchedPattern(DftError):
    def __init__(self, subexpr: Any, detail: str = "") -> None:
        message = f"No analytic pattern for {subexpr}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.subexpr = subexpr


class TermExplosion(DftError):
    def __init__(self, count: int, limit: int) -> None:
        super().__init__(
            f"Union has {count} terms, above the limit of {limit}; use Monte-Carlo instead"
        )
        self.count = count
        self.limit = limit


class QuadratureFailure(DftError):
    def __init__(self, depth: int, error: float, tolerance: float) -> None:
        super().__init__(
            f"Quadrature tolerance {tolerance:g} unmet at depth {depth} (error estimate {error:g})"
        )
        self.depth = depth
        self.error = error
        self.tolerance = tolerance


class NumericalBoundViolation(DftError):
    pass


class MissingDistribution(DftError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Basic event '{name}' has no distribution")
        self.name = name


class MissingConditionalLaw(DftError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Spare '{name}' has no conditional activation law")
        self.name = name


class ModelSyntaxError(DftError):
    def __init__(self, line: int, col: int, expected: str, found: Optional[str] = None) -> None:
        message = f"line {line}, column {col}: expected {expected}"
        if found is not None:
            message += f", found {found!r}"
        super().__init__(message)
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found


class CycleDetected(DftError):
    def __init__(self, path: Sequence[str]) -> None:
        super().__init__("Definition cycle: " + " -> ".join(path))
        self.path = list(path)


class Undefined(DftError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Name '{name}' is neither defined nor given a distribution")
        self.name = name


class Redefined(DftError):
    def __init__(self, name: str) -> None:
        super().__init__(f"Name '{name}' is declared more than once")
        self.name = name
