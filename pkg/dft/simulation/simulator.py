"""Monte-Carlo estimate of Pr(top fails by t)."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..algebra.evaluate import evaluate_many
from ..algebra.expr import FailureExpr, basics_of
from ..errors import CycleDetected, MissingConditionalLaw, MissingDistribution
from ..model.model import DftModel, SpareMeta
from .rng import SIMULATION_STREAM, make_generator

logger = logging.getLogger("dft.simulation")


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1
    confidence: float = 0.99
    block_size: int = 65_536

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError(f"samples must be at least 1, got {self.samples}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.block_size < 1:
            raise ValueError(f"block size must be at least 1, got {self.block_size}")

    @property
    def blocks(self) -> int:
        return -(-self.samples // self.block_size)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    half_width: float
    samples_used: int
    successes: int
    confidence: float

    @property
    def interval(self) -> Tuple[float, float]:
        return self.p_hat - self.half_width, self.p_hat + self.half_width


def estimate_from_tally(successes: int, samples: int, confidence: float) -> McEstimate:
    p_hat = successes / samples
    z = float(norm.ppf(0.5 + confidence / 2.0))
    half_width = z * math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return McEstimate(p_hat, half_width, samples, successes, confidence)


class ModelSampler:
    """Draws failure-time columns for every basic event of a model.

    Independent basics and dormant states are drawn from their laws in
    declaration order. Active spare states are then filled in, one spare at a
    time in dependency order, from the spare's conditional law at the time its
    main fails.
    """

    def __init__(self, model: DftModel) -> None:
        self.model = model
        self.top = model.top_expr()
        self.spares = self._spare_order(model)
        self.computed = {meta.active for meta in self.spares if not meta.hot}
        needed = set(basics_of(self.top))
        for meta in self.spares:
            needed.update(meta.states)
            for main in meta.mains:
                needed.update(basics_of(model.resolve_expr(main)))
        order = [name for name in model.declaration_order if name in needed]
        order += sorted(needed - set(order))
        self.drawn: List[str] = []
        for name in order:
            if name in self.computed:
                continue
            if name not in model.basic_laws:
                raise MissingDistribution(name)
            self.drawn.append(name)
        for meta in self.spares:
            if not meta.hot and meta.conditional is None:
                raise MissingConditionalLaw(meta.name)
        self.mains: Dict[str, Tuple[FailureExpr, ...]] = {
            meta.name: tuple(model.resolve_expr(main) for main in meta.mains)
            for meta in self.spares
        }
        logger.debug("Sampler: %d drawn, %d activated", len(self.drawn), len(self.computed))

    @staticmethod
    def _spare_order(model: DftModel) -> List[SpareMeta]:
        pending = {name: meta for name, meta in model.spare_meta.items()}
        depends: Dict[str, set] = {}
        for name, meta in pending.items():
            names = set()
            for main in meta.mains:
                names.update(basics_of(model.resolve_expr(main)))
            depends[name] = {
                other for other, om in pending.items()
                if other != name and not om.hot and om.active in names
            }
        ordered: List[SpareMeta] = []
        done: set = set()
        while pending:
            ready = [name for name in pending if depends[name] <= done]
            if not ready:
                raise CycleDetected(sorted(pending))
            for name in ready:
                ordered.append(pending.pop(name))
                done.add(name)
        return ordered

    def sample(self, rng: np.random.Generator, size: int) -> Dict[str, np.ndarray]:
        columns: Dict[str, np.ndarray] = {}
        for name in self.drawn:
            columns[name] = self.model.basic_laws[name].sample(rng, size)
        for meta in self.spares:
            if meta.hot:
                continue
            mains = [
                np.broadcast_to(evaluate_many(main, columns), (size,))
                for main in self.mains[meta.name]
            ]
            v = mains[0] if len(mains) == 1 else np.minimum.reduce(mains)
            if meta.dormant is None:
                activated = np.isfinite(v)
            else:
                dormant = columns[meta.dormant]
                activated = v < dormant
                columns[meta.dormant] = np.where(activated, np.inf, dormant)
            active = np.full(size, np.inf)
            if activated.any():
                active[activated] = meta.conditional.cond_sample(v[activated], rng)
            columns[meta.active] = active
        return columns

    def top_times(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.broadcast_to(evaluate_many(self.top, self.sample(rng, size)), (size,))


def _block_tally(sampler: ModelSampler, cfg: McConfig, block: int, times: np.ndarray) -> np.ndarray:
    start = block * cfg.block_size
    size = min(cfg.block_size, cfg.samples - start)
    rng = make_generator(cfg.seed, SIMULATION_STREAM, block)
    top = np.sort(sampler.top_times(rng, size))
    return np.searchsorted(top, times, side="right").astype(np.int64)


def simulate_curve(
    model: DftModel, times: Sequence[float], cfg: Optional[McConfig] = None
) -> List[Tuple[float, McEstimate]]:
    """Estimates for every time in ``times`` from one sample population."""
    cfg = cfg or McConfig()
    grid = np.asarray([float(t) for t in times], dtype=np.float64)
    if grid.size and (np.any(grid < 0) or np.any(np.diff(grid) < 0)):
        raise ValueError("time grid must be non-negative and sorted ascending")
    if grid.size == 0:
        return []
    sampler = ModelSampler(model)
    logger.info(
        "MC run: samples=%d blocks=%d workers=%d seed=%d",
        cfg.samples, cfg.blocks, cfg.workers, cfg.seed,
    )
    blocks = range(cfg.blocks)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            tallies = list(pool.map(lambda b: _block_tally(sampler, cfg, b, grid), blocks))
    else:
        tallies = [_block_tally(sampler, cfg, b, grid) for b in blocks]
    total = np.zeros(grid.size, dtype=np.int64)
    for tally in tallies:
        total += tally
    return [
        (float(t), estimate_from_tally(int(count), cfg.samples, cfg.confidence))
        for t, count in zip(grid, total)
    ]


def simulate(model: DftModel, t: float, cfg: Optional[McConfig] = None) -> McEstimate:
    return simulate_curve(model, [t], cfg)[0][1]
