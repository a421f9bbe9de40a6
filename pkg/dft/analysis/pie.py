"""Inclusion-exclusion over a union of events."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Generic, List, Sequence, Tuple, TypeVar

from ..errors import TermExplosion

T = TypeVar("T")

DEFAULT_MAX_TERMS = 20


@dataclass(frozen=True)
class PieTerm(Generic[T]):
    mask: int
    sign: int
    members: Tuple[T, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def pie_expand(items: Sequence[T], max_terms: int = DEFAULT_MAX_TERMS) -> List[PieTerm[T]]:
    """Every non-empty subset of ``items`` with sign (-1)^(|S|+1), in bitmask order.

    Bit ``i`` of a mask selects ``items[i]``.
    """
    n = len(items)
    if n < 1:
        raise ValueError("inclusion-exclusion needs at least one event")
    if n > max_terms:
        raise TermExplosion(n, max_terms)
    terms: List[PieTerm[T]] = []
    for mask in range(1, 1 << n):
        members = tuple(items[i] for i in range(n) if mask >> i & 1)
        sign = 1 if len(members) % 2 else -1
        terms.append(PieTerm(mask, sign, members))
    return terms
