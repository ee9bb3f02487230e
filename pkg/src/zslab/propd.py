"""Exhaustive Property D checks for (Z_k)^n.

Property D: every sequence of length s(A) - 1 with no zero-sum subsequence of
length k is a (k-1)-th power T^(k-1).  Affine symmetries permute the support
and keep multiplicities, so testing one representative per orbit suffices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .groups import AbelianGroup, ZSequence
from .search import SearchBudget, Status, enumerate_extremal, exact_s


class PropD(str, enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    UNKNOWN = "UNKNOWN"


class NotHomocyclic(ValueError):
    pass


@dataclass(frozen=True)
class PropertyDReport:
    group: AbelianGroup
    holds: PropD
    counterexample: Optional[ZSequence] = None
    extremal_orbits_checked: int = 0
    raw_extremal_count: int = 0
    s_value: Optional[int] = None
    nodes_explored: int = 0

    @property
    def params(self) -> tuple[int, int]:
        """(k, n) with A = (Z_k)^n."""
        return self.group.exponent, self.group.rank

    def to_json(self) -> dict:
        k, n = self.params
        return {
            "group": self.group.spec,
            "k": k,
            "n": n,
            "holds": self.holds.value,
            "s": self.s_value,
            "extremal_orbits_checked": self.extremal_orbits_checked,
            "raw_extremal_count": self.raw_extremal_count,
            "counterexample": None if self.counterexample is None
            else [list(c) for c in self.counterexample.multiplicities_flat()],
            "nodes": self.nodes_explored,
        }


def is_kth_power_form(seq: ZSequence, k: int) -> bool:
    """True iff seq = T^(k-1), i.e. k-1 divides every multiplicity."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return all(c % (k - 1) == 0 for c in seq.multiplicities.values())


def check_property_d(group: AbelianGroup, budget: SearchBudget = SearchBudget()) -> PropertyDReport:
    if not group.invariant_factors or not group.is_homocyclic():
        raise NotHomocyclic(f"Property D is only defined for (Z_k)^n, got {group.spec}")
    k = group.exponent
    s = exact_s(group, budget)
    if s.status is not Status.EXACT:
        return PropertyDReport(group, PropD.UNKNOWN, nodes_explored=s.nodes_explored)
    ext = enumerate_extremal(group, k, s.value - 1, budget)
    nodes = s.nodes_explored + ext.nodes_explored
    if ext.status is not Status.EXACT:
        return PropertyDReport(group, PropD.UNKNOWN, s_value=s.value, nodes_explored=nodes)
    for rep in ext.representatives:
        if not is_kth_power_form(rep, k):
            return PropertyDReport(group, PropD.FAILS, rep, ext.orbit_count, ext.raw_count, s.value, nodes)
    return PropertyDReport(group, PropD.HOLDS, None, ext.orbit_count, ext.raw_count, s.value, nodes)


def verified_pairs(reports) -> frozenset:
    """(p, n) pairs whose Property D was verified; feeds bound discharge."""
    return frozenset(r.params for r in reports if r.holds is PropD.HOLDS)
