from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import NonPositiveParameter, UnsupportedFamily
from .base import ConditionalLaw, Distribution, Number, is_scalar

# Lower clamp for densities that are singular at zero.
PDF_FLOOR = 1e-12


def _check_positive(label: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise NonPositiveParameter(f"{label} must be a positive finite number, got {value}")
    return value


def _literal(family: str, params: Dict[str, float], dormancy: Optional[float]) -> str:
    items = [f"{key}={value!r}" for key, value in params.items()]
    if dormancy is not None:
        items.append(f"dormancy={float(dormancy)!r}")
    return f"{family}({', '.join(items)})"


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    family = "exp"

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _check_positive("lambda", self.rate))

    def cdf(self, t: Number) -> Number:
        if is_scalar(t):
            return -math.expm1(-self.rate * t) if t > 0 else 0.0
        t = np.asarray(t, dtype=np.float64)
        return np.where(t > 0, -np.expm1(-self.rate * np.maximum(t, 0.0)), 0.0)

    def sf(self, t: Number) -> Number:
        if is_scalar(t):
            return math.exp(-self.rate * t) if t > 0 else 1.0
        t = np.asarray(t, dtype=np.float64)
        return np.where(t > 0, np.exp(-self.rate * np.maximum(t, 0.0)), 1.0)

    def pdf(self, t: Number) -> Number:
        if is_scalar(t):
            return self.rate * math.exp(-self.rate * t) if t >= 0 else 0.0
        t = np.asarray(t, dtype=np.float64)
        return np.where(t >= 0, self.rate * np.exp(-self.rate * np.maximum(t, 0.0)), 0.0)

    def ppf(self, q: Number) -> Number:
        if is_scalar(q):
            return math.inf if q >= 1.0 else -math.log1p(-q) / self.rate
        q = np.asarray(q, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return -np.log1p(-q) / self.rate

    def to_literal(self, dormancy: Optional[float] = None) -> str:
        return _literal("exp", {"lambda": self.rate}, dormancy)


@dataclass(frozen=True)
class Weibull(Distribution):
    shape: float
    scale: float

    family = "weibull"

    def __post_init__(self) -> None:
        object.__setattr__(self, "shape", _check_positive("shape", self.shape))
        object.__setattr__(self, "scale", _check_positive("scale", self.scale))

    def cdf(self, t: Number) -> Number:
        if is_scalar(t):
            return -math.expm1(-((t / self.scale) ** self.shape)) if t > 0 else 0.0
        t = np.asarray(t, dtype=np.float64)
        z = np.maximum(t, 0.0) / self.scale
        return np.where(t > 0, -np.expm1(-(z**self.shape)), 0.0)

    def sf(self, t: Number) -> Number:
        if is_scalar(t):
            return math.exp(-((t / self.scale) ** self.shape)) if t > 0 else 1.0
        t = np.asarray(t, dtype=np.float64)
        z = np.maximum(t, 0.0) / self.scale
        return np.where(t > 0, np.exp(-(z**self.shape)), 1.0)

    def pdf(self, t: Number) -> Number:
        k, s = self.shape, self.scale
        if is_scalar(t):
            if t < 0:
                return 0.0
            if k < 1.0:
                t = max(t, PDF_FLOOR)
            if math.isinf(t):
                return 0.0
            z = t / s
            return (k / s) * z ** (k - 1.0) * math.exp(-(z**k))
        t = np.asarray(t, dtype=np.float64)
        clamped = np.maximum(t, PDF_FLOOR if k < 1.0 else 0.0)
        z = clamped / s
        with np.errstate(over="ignore", invalid="ignore"):
            density = (k / s) * z ** (k - 1.0) * np.exp(-(z**k))
        return np.where((t >= 0) & np.isfinite(t), density, 0.0)

    def ppf(self, q: Number) -> Number:
        if is_scalar(q):
            return math.inf if q >= 1.0 else self.scale * (-math.log1p(-q)) ** (1.0 / self.shape)
        q = np.asarray(q, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return self.scale * (-np.log1p(-q)) ** (1.0 / self.shape)

    def to_literal(self, dormancy: Optional[float] = None) -> str:
        return _literal("weibull", {"shape": self.shape, "scale": self.scale}, dormancy)


def exponential(rate: float) -> Exponential:
    return Exponential(rate)


def weibull(shape: float, scale: float) -> Weibull:
    return Weibull(shape, scale)


def check_dormancy(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise NonPositiveParameter(f"dormancy must be in (0, 1], got {alpha}")
    if alpha > 1:
        raise ValueError(f"dormancy must be in (0, 1], got {alpha}")
    return alpha


def dormant_variant(active: Distribution, alpha: float) -> Distribution:
    """Law of the dormant state: the active hazard scaled by ``alpha``."""
    alpha = check_dormancy(alpha)
    if alpha == 1.0:
        return active
    if isinstance(active, Exponential):
        return Exponential(alpha * active.rate)
    if isinstance(active, Weibull):
        return Weibull(active.shape, active.scale / alpha ** (1.0 / active.shape))
    raise UnsupportedFamily(f"Cannot scale the hazard of a {type(active).__name__} law")


@dataclass(frozen=True)
class FreshActivation(ConditionalLaw):
    active: Distribution

    tag = "fresh"

    def cond_pdf(self, v: float, u: float) -> float:
        if u <= v:
            return 0.0
        return self.active.pdf(u - v)

    def cond_cdf(self, v: float, u: float, tol: Optional[float] = None) -> float:
        if u <= v:
            return 0.0
        return self.active.cdf(u - v)

    def cond_sample(self, v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        return v + self.active.sample(rng, v.shape)


@dataclass(frozen=True)
class MemorylessActivation(FreshActivation):
    tag = "memoryless"


def memoryless_activation(active: Distribution) -> MemorylessActivation:
    if not isinstance(active, Exponential):
        raise UnsupportedFamily(
            f"Memoryless activation needs an exponential law, got {type(active).__name__}; "
            "supply a joint density instead"
        )
    return MemorylessActivation(active)


def fresh_activation(active: Distribution) -> FreshActivation:
    return FreshActivation(active)


def default_activation(active: Distribution) -> FreshActivation:
    if isinstance(active, Exponential):
        return MemorylessActivation(active)
    return FreshActivation(active)


@dataclass(frozen=True)
class JointDensityActivation(ConditionalLaw):
    joint_pdf: Callable[[float, float], float]
    main_pdf: Callable[[float], float]
    tol: float = 1e-10
    max_depth: int = 50

    tag = "joint"

    def cond_pdf(self, v: float, u: float) -> float:
        if u <= v:
            return 0.0
        marginal = self.main_pdf(v)
        if marginal <= 0:
            return 0.0
        return self.joint_pdf(u, v) / marginal

    def cond_cdf(self, v: float, u: float, tol: Optional[float] = None) -> float:
        from ..analysis.quadrature import adaptive_simpson

        if u <= v:
            return 0.0
        tol = self.tol if tol is None else tol
        value, _ = adaptive_simpson(lambda x: self.cond_pdf(v, x), v, u, tol, self.max_depth)
        return min(max(value, 0.0), 1.0)

    def _invert(self, v: float, q: float) -> float:
        width = 1.0
        for _ in range(60):
            if self.cond_cdf(v, v + width) >= q:
                return brentq(lambda u: self.cond_cdf(v, u) - q, v, v + width, xtol=1e-12)
            width *= 2.0
        return math.inf

    def cond_sample(self, v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        q = rng.random(v.shape)
        out = np.full(v.shape, math.inf)
        for index in np.ndindex(v.shape):
            if math.isfinite(v[index]):
                out[index] = self._invert(float(v[index]), float(q[index]))
        return out


def joint_density_activation(
    joint_pdf: Callable[[float, float], float], main_pdf: Callable[[float], float]
) -> JointDensityActivation:
    return JointDensityActivation(joint_pdf, main_pdf)


def make_distribution(family: str, params: Dict[str, float]) -> Distribution:
    """Build a law from a model-file literal such as ``exp(lambda=0.001)``."""
    family = family.lower()
    if family in {"exp", "exponential"}:
        _expect_params(family, params, {"lambda"})
        return Exponential(params["lambda"])
    if family == "weibull":
        _expect_params(family, params, {"shape", "scale"})
        return Weibull(params["shape"], params["scale"])
    raise UnsupportedFamily(f"Unknown distribution family '{family}'")


def _expect_params(family: str, params: Dict[str, float], expected: set) -> None:
    missing = expected - set(params)
    extra = set(params) - expected
    if missing or extra:
        raise ValueError(
            f"{family} takes parameters {', '.join(sorted(expected))}"
            + (f"; missing {', '.join(sorted(missing))}" if missing else "")
            + (f"; unexpected {', '.join(sorted(extra))}" if extra else "")
        )
