from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

import pytest

from dft.analysis.quadrature import QuadratureConfig
from dft.model import DftModel, parse_model
from dft.simulation.simulator import McConfig


def exp_cdf(rate: float, t: float) -> float:
    return 1.0 - math.exp(-rate * t)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "DFT_MAX_PIE_TERMS",
        "DFT_QUAD_TOL",
        "DFT_MC_SAMPLES",
        "DFT_MC_SEED",
        "DFT_MC_WORKERS",
        "DFT_INTERSECTION_MODE",
        "DFT_WORKERS",
        "DFT_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("dft.config.load_dotenv", lambda *args, **kwargs: False)


@pytest.fixture
def quad() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture
def mc() -> McConfig:
    return McConfig(samples=200_000, seed=42, block_size=50_000)


@pytest.fixture
def model_from() -> Callable[[str], DftModel]:
    return parse_model


@pytest.fixture
def write_model(tmp_path: Path) -> Callable[[str, str], str]:
    def write(text: str, name: str = "model.dft") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


AND2 = """\
top T;
T = and(A, B);
A : exp(lambda=1);
B : exp(lambda=2);
"""

OR2 = """\
top T;
T = or(A, B);
A : exp(lambda=1);
B : exp(lambda=2);
"""

PAND2 = """\
top T;
T = pand(X, Y);
X : exp(lambda=1);
Y : exp(lambda=2);
"""

CSP1 = """\
top T;
T = csp(Y, S);
Y : exp(lambda=1);
S : exp(lambda=1);
"""

WSP1 = """\
top T;
T = wsp(Y, S, dormancy=0.5);
Y : exp(lambda=1);
S : exp(lambda=1);
"""
