"""Probabilities of the basic temporal patterns by time ``t``."""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional

from ..distributions import ConditionalLaw, Distribution
from .quadrature import Estimate, QuadratureConfig, integrate

logger = logging.getLogger("dft.analysis")

# Share of the tolerance given to an inner integral of a nested one.
INNER_TOL_SHARE = 0.1


def _check_time(t: float) -> float:
    t = float(t)
    if math.isnan(t) or t < 0:
        raise ValueError(f"analysis time must be non-negative, got {t}")
    return t


def _clipped(
    integrand: Callable[[float], float],
    t: float,
    outer: Distribution,
    cfg: QuadratureConfig,
) -> Estimate:
    upper = t
    tail = 0.0
    if cfg.tail > 0:
        horizon = outer.horizon(cfg.tail)
        if horizon < t:
            upper = horizon
            tail = outer.sf(horizon)
    if upper <= 0:
        return Estimate(0.0, 0.0)
    estimate = integrate(integrand, 0.0, upper, cfg)
    return Estimate(estimate.value, estimate.error + tail)


def cdf_prob(x: Distribution, t: float) -> Estimate:
    return Estimate(float(x.cdf(_check_time(t))), 0.0)


def after_prob(x: Distribution, y: Distribution, t: float, cfg: QuadratureConfig) -> Estimate:
    """Pr(X < Y and Y <= t): the integral of f_Y * F_X over [0, t]."""
    t = _check_time(t)
    return _clipped(lambda u: y.pdf(u) * x.cdf(u), t, y, cfg)


def before_prob(x: Distribution, y: Distribution, t: float, cfg: QuadratureConfig) -> Estimate:
    t = _check_time(t)
    return _clipped(lambda u: x.pdf(u) * y.sf(u), t, x, cfg)


def csp_prob(
    main: Distribution,
    spare: ConditionalLaw,
    t: float,
    cfg: QuadratureConfig,
    dormant: Optional[Distribution] = None,
) -> Estimate:
    """Pr(the spare, activated when the main fails, fails by t).

    The inner integral over the active life is the conditional CDF. With a
    dormant state the spare is only activated if it survived dormancy, which
    contributes the survival factor of the dormant law.
    """
    t = _check_time(t)
    inner_tol = cfg.tol * INNER_TOL_SHARE

    if dormant is None:
        def integrand(v: float) -> float:
            return main.pdf(v) * spare.cond_cdf(v, t, inner_tol)
    else:
        def integrand(v: float) -> float:
            return main.pdf(v) * dormant.sf(v) * spare.cond_cdf(v, t, inner_tol)

    return _clipped(integrand, t, main, cfg)


def wsp_prob(
    main: Distribution,
    active: ConditionalLaw,
    dormant: Distribution,
    t: float,
    cfg: QuadratureConfig,
) -> Estimate:
    # the activated and dormant-first scenarios are disjoint
    half = cfg.with_tol(cfg.tol / 2.0)
    activated = csp_prob(main, active, t, half, dormant=dormant)
    dormant_first = after_prob(dormant, main, t, half)
    logger.debug(
        "wsp t=%s activated=%.12g dormant_first=%.12g",
        t,
        activated.value,
        dormant_first.value,
    )
    return activated + dormant_first
