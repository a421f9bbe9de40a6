from .atoms import AfterAtom, BeforeAtom, CdfAtom, CspAtom, ProductAtom, WspAtom, match_conjunction
from .evaluator import AnalyticPlan, ProbResult, dft_event_prob, intersect_prob, union_terms
from .gates import after_prob, before_prob, cdf_prob, csp_prob, wsp_prob
from .pie import PieTerm, pie_expand
from .quadrature import Estimate, QuadratureConfig, adaptive_simpson, integrate

__all__ = [
    "AfterAtom",
    "AnalyticPlan",
    "BeforeAtom",
    "CdfAtom",
    "CspAtom",
    "Estimate",
    "PieTerm",
    "ProbResult",
    "ProductAtom",
    "QuadratureConfig",
    "WspAtom",
    "adaptive_simpson",
    "after_prob",
    "before_prob",
    "cdf_prob",
    "csp_prob",
    "dft_event_prob",
    "integrate",
    "intersect_prob",
    "match_conjunction",
    "pie_expand",
    "union_terms",
    "wsp_prob",
]
