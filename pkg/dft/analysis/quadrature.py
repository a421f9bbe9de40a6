"""Adaptive Simpson quadrature with a Richardson error estimate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

from ..errors import QuadratureFailure

# Subdivision levels forced before the error test may accept an interval.
MIN_DEPTH = 4


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-10
    max_depth: int = 60
    # Upper integration limits are clipped where the remaining mass drops below this.
    tail: float = 1e-14

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError(f"quadrature tolerance must be positive, got {self.tol}")
        if self.max_depth < 1:
            raise ValueError(f"quadrature depth must be at least 1, got {self.max_depth}")
        if not 0 <= self.tail < 1:
            raise ValueError(f"quadrature tail must be in [0, 1), got {self.tail}")

    def with_tol(self, tol: float) -> "QuadratureConfig":
        return QuadratureConfig(tol=tol, max_depth=self.max_depth, tail=self.tail)


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float = 0.0

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, self.error + other.error)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    max_depth: int,
) -> Tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; returns ``(value, error_estimate)``.

    Each half interval gets half of the parent tolerance. Raises
    ``QuadratureFailure`` when the maximum depth is reached and the summed
    error estimate still exceeds ``tol``.
    """
    if not b > a:
        return 0.0, 0.0

    exhausted: List[int] = []

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def _adaptive(
        lo: float,
        hi: float,
        flo: float,
        fmid: float,
        fhi: float,
        whole: float,
        depth: int,
        local_tol: float,
    ) -> Tuple[float, float]:
        mid = 0.5 * (lo + hi)
        left_mid = 0.5 * (lo + mid)
        right_mid = 0.5 * (mid + hi)
        f_left_mid = f(left_mid)
        f_right_mid = f(right_mid)
        half = 0.5 * (hi - lo)
        left = _simpson(flo, f_left_mid, fmid, half)
        right = _simpson(fmid, f_right_mid, fhi, half)
        combined = left + right
        delta = (combined - whole) / 15.0

        if depth >= MIN_DEPTH and abs(delta) <= local_tol:
            return combined + delta, abs(delta)
        if depth >= max_depth:
            exhausted.append(depth)
            return combined + delta, abs(delta)

        left_value, left_error = _adaptive(
            lo, mid, flo, f_left_mid, fmid, left, depth + 1, local_tol / 2.0
        )
        right_value, right_error = _adaptive(
            mid, hi, fmid, f_right_mid, fhi, right, depth + 1, local_tol / 2.0
        )
        return left_value + right_value, left_error + right_error

    fa = f(a)
    fb = f(b)
    fm = f(0.5 * (a + b))
    whole = _simpson(fa, fm, fb, b - a)
    value, error = _adaptive(a, b, fa, fm, fb, whole, 1, tol)

    if not math.isfinite(value):
        raise QuadratureFailure(0, math.inf, tol)
    if exhausted and error > tol:
        raise QuadratureFailure(max(exhausted), error, tol)
    return value, error


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    cfg: QuadratureConfig,
) -> Estimate:
    value, error = adaptive_simpson(f, a, b, cfg.tol, cfg.max_depth)
    return Estimate(value, error)
