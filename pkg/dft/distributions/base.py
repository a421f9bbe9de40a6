from __future__ import annotations

from typing import Optional, Tuple, Union

import numpy as np

Number = Union[float, np.ndarray]


def is_scalar(value: object) -> bool:
    if isinstance(value, bool):
        return False
    return isinstance(value, (int, float, np.floating))


class Distribution:
    """Failure-time law on [0, inf) with a continuous CDF.

    Subclasses implement the scalar path with ``math`` (the integrator calls
    it in tight loops) and the array path with NumPy.
    """

    family: str = ""

    def cdf(self, t: Number) -> Number:
        raise NotImplementedError

    def pdf(self, t: Number) -> Number:
        raise NotImplementedError

    def sf(self, t: Number) -> Number:
        return 1.0 - self.cdf(t)

    def ppf(self, q: Number) -> Number:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: Union[int, Tuple[int, ...]]) -> np.ndarray:
        return np.asarray(self.ppf(rng.random(size)), dtype=np.float64)

    def horizon(self, tail: float) -> float:
        return float(self.ppf(1.0 - tail))

    def to_literal(self, dormancy: Optional[float] = None) -> str:
        raise NotImplementedError


class ConditionalLaw:
    tag: str = ""

    def cond_pdf(self, v: float, u: float) -> float:
        raise NotImplementedError

    def cond_cdf(self, v: float, u: float, tol: Optional[float] = None) -> float:
        raise NotImplementedError

    def cond_sample(self, v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError
