from .engine import RuleSet, SimplifyResult, default_rules, simplify, simplify_strict
from .equivalence import EquivalenceVerdict, check_equiv, check_rule
from .rules import PatternRule, RewriteContext, RewriteRule, load_rules

__all__ = [
    "EquivalenceVerdict",
    "PatternRule",
    "RewriteContext",
    "RewriteRule",
    "RuleSet",
    "SimplifyResult",
    "check_equiv",
    "check_rule",
    "default_rules",
    "load_rules",
    "simplify",
    "simplify_strict",
]
