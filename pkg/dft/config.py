import os
from dataclasses import dataclass

from dotenv import load_dotenv

from .analysis.quadrature import QuadratureConfig
from .simulation.simulator import McConfig


INTERSECTION_MODES = ("exact", "paper")


@dataclass
class Settings:
    max_pie_terms: int

    quad_tol: float
    quad_max_depth: int
    quad_tail: float

    mc_samples: int
    mc_seed: int
    mc_workers: int
    mc_confidence: float
    mc_block: int

    rewrite_step_cap: int
    intersection_mode: str
    workers: int

    log_level: str

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()

        max_pie_terms = int(os.getenv("DFT_MAX_PIE_TERMS", "20"))

        quad_tol = float(os.getenv("DFT_QUAD_TOL", "1e-10"))
        quad_max_depth = int(os.getenv("DFT_QUAD_MAX_DEPTH", "60"))
        quad_tail = float(os.getenv("DFT_QUAD_TAIL", "1e-14"))

        mc_samples = int(os.getenv("DFT_MC_SAMPLES", "1000000"))
        mc_seed = int(os.getenv("DFT_MC_SEED", "0"))
        mc_workers = int(os.getenv("DFT_MC_WORKERS", "1"))
        mc_confidence = float(os.getenv("DFT_MC_CONFIDENCE", "0.99"))
        mc_block = int(os.getenv("DFT_MC_BLOCK", "65536"))

        rewrite_step_cap = int(os.getenv("DFT_REWRITE_STEP_CAP", "10000"))
        intersection_mode = os.getenv("DFT_INTERSECTION_MODE", "exact").strip().lower()
        workers = int(os.getenv("DFT_WORKERS", "1"))

        log_level = os.getenv("DFT_LOG_LEVEL", "INFO").strip().upper()

        settings = cls(
            max_pie_terms=max_pie_terms,
            quad_tol=quad_tol,
            quad_max_depth=quad_max_depth,
            quad_tail=quad_tail,
            mc_samples=mc_samples,
            mc_seed=mc_seed,
            mc_workers=mc_workers,
            mc_confidence=mc_confidence,
            mc_block=mc_block,
            rewrite_step_cap=rewrite_step_cap,
            intersection_mode=intersection_mode,
            workers=workers,
            log_level=log_level,
        )
        settings.validate()
        return settings

    def validate(self) -> None:
        if self.max_pie_terms < 1:
            raise ValueError("DFT_MAX_PIE_TERMS must be at least 1")
        if self.rewrite_step_cap < 1:
            raise ValueError("DFT_REWRITE_STEP_CAP must be at least 1")
        if self.intersection_mode not in INTERSECTION_MODES:
            raise ValueError(
                f"DFT_INTERSECTION_MODE must be one of {', '.join(INTERSECTION_MODES)}"
            )
        if self.workers < 1:
            raise ValueError("DFT_WORKERS must be at least 1")

    def quadrature(self, tol: "float | None" = None) -> QuadratureConfig:
        return QuadratureConfig(
            tol=self.quad_tol if tol is None else tol,
            max_depth=self.quad_max_depth,
            tail=self.quad_tail,
        )

    def monte_carlo(
        self,
        samples: "int | None" = None,
        seed: "int | None" = None,
        workers: "int | None" = None,
    ) -> McConfig:
        return McConfig(
            samples=self.mc_samples if samples is None else samples,
            seed=self.mc_seed if seed is None else seed,
            workers=self.mc_workers if workers is None else workers,
            confidence=self.mc_confidence,
            block_size=self.mc_block,
        )
