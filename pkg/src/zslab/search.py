"""Exhaustive computation of s(A), g(A) and extremal sequences.

The search is an orderly DFS: multisets are grown in nondecreasing index order,
each node carries its length-indexed reach table, and a child survives only if
it is still free of a zero-sum subsequence of length k and is the canonical
representative of its orbit under the affine symmetry group.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .groups import AbelianGroup, SumReachTable, ZSequence, extend_reach
from .symmetry import SymmetryGroup, symmetry_group


class Status(str, enum.Enum):
    EXACT = "EXACT"
    LOWER_BOUND_ONLY = "LOWER_BOUND_ONLY"
    UNKNOWN = "UNKNOWN"
    VACUOUS = "VACUOUS"


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**7
    max_seconds: float = 60.0
    parallel_width: int = 1

    def __post_init__(self):
        if self.parallel_width < 1:
            raise ValueError("parallel_width must be >= 1")


@dataclass(frozen=True)
class ExactResult:
    """Outcome of an exhaustive search.

    For ``quantity`` "s" and "g" the witness has length ``value - 1``; for
    "free_length" and "petrov" it has length ``value``.
    """

    group: AbelianGroup
    quantity: str
    value: Optional[int]
    status: Status
    witness: Optional[ZSequence] = None
    nodes_explored: int = 0

    def to_json(self) -> dict:
        return {
            "group": self.group.spec,
            "quantity": self.quantity,
            "value": self.value,
            "status": self.status.value,
            "witness": None if self.witness is None else [list(c) for c in self.witness.multiplicities_flat()],
            "nodes": self.nodes_explored,
        }


@dataclass(frozen=True)
class ExtremalEnumeration:
    group: AbelianGroup
    k: int
    length: int
    status: Status
    representatives: tuple[ZSequence, ...] = ()
    orbit_sizes: tuple[int, ...] = ()
    nodes_explored: int = 0

    @property
    def orbit_count(self) -> int:
        return len(self.representatives)

    @property
    def raw_count(self) -> int:
        return sum(self.orbit_sizes)


@dataclass
class _Search:
    """Mutable DFS state; one instance per (sub)tree."""

    group: AbelianGroup
    k: int
    max_mult: int
    sym: SymmetryGroup
    budget: SearchBudget
    target: Optional[int] = None  # enumerate mode when set
    nodes: int = 0
    best_len: int = -1
    best: tuple[int, ...] = ()
    found: list = field(default_factory=list)
    deadline: float = 0.0

    def __post_init__(self):
        self.deadline = time.monotonic() + self.budget.max_seconds
        self.neg = self.group.neg
        self.sub = self.group.sub_table
        self.N = self.group.order
        # neg_multiples[j - 1, y] = index of -(j * y)
        mults, cur = [], np.zeros(self.N, dtype=np.intp)
        for _ in range(self.max_mult):
            cur = self.group.add_table[cur, np.arange(self.N)]
            mults.append(self.neg[cur])
        self.neg_multiples = np.array(mults, dtype=np.intp)

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExhausted
        if not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise BudgetExhausted

    def capacities(self, reach: np.ndarray, counts: np.ndarray) -> np.ndarray:
        """Copies of each element that could still be appended.

        j more copies of y close a zero-sum iff reach[k - j, -j*y]; reach tables
        only grow along a branch, so this is an upper bound for every descendant.
        """
        mm = self.max_mult
        rows = reach[self.k - mm : self.k][::-1]  # rows k-1, ..., k-mm
        ok = ~np.take_along_axis(rows, self.neg_multiples, axis=1)
        caps = np.cumprod(ok, axis=0).sum(axis=0)
        return np.minimum(caps, mm - counts)

    def visit(self, elems: list[int], counts: np.ndarray, reach: np.ndarray):
        L = len(elems)
        if self.target is None:
            if L > self.best_len:
                self.best_len, self.best = L, tuple(elems)
        elif L == self.target:
            self.found.append(tuple(elems))
            return
        last = elems[-1] if elems else 0
        caps = self.capacities(reach, counts)
        # suffix[x]: most this node can still grow using elements >= x
        suffix = np.cumsum(caps[::-1])[::-1]
        goal = self.best_len if self.target is None else self.target - 1
        for x in range(last, self.N):
            if L + suffix[x] <= goal:
                break
            if not caps[x]:
                continue
            self.tick()
            c = counts[x]
            counts[x] = c + 1
            if self.sym.is_canonical(counts):
                elems.append(x)
                self.visit(elems, counts, extend_reach(reach, self.sub[x]))
                elems.pop()
                if self.target is None:
                    goal = self.best_len
            counts[x] = c


def _state_for(group: AbelianGroup, k: int, prefix: tuple[int, ...]):
    counts = np.zeros(group.order, dtype=np.int64)
    reach = SumReachTable.empty(group, k).reach
    for x in prefix:
        counts[x] += 1
        reach = extend_reach(reach, group.sub_table[x])
    return list(prefix), counts, reach


def _run_subtree(args):
    group, k, max_mult, budget, target, prefix = args
    s = _Search(group, k, max_mult, symmetry_group(group), budget, target)
    elems, counts, reach = _state_for(group, k, prefix)
    exhausted = False
    try:
        if target is not None and len(prefix) == target:
            s.found.append(prefix)
        else:
            s.visit(elems, counts, reach)
    except BudgetExhausted:
        exhausted = True
    return s.best_len, s.best, s.found, s.nodes, exhausted


def _frontier(group: AbelianGroup, k: int, max_mult: int, target: Optional[int]) -> list[tuple[int, ...]]:
    """Canonical zero-sum-free prefixes of length 2 (plus shorter leaves), in DFS order."""
    sym = symmetry_group(group)
    out: list[tuple[int, ...]] = [()]
    for _ in range(2):
        nxt = []
        for pre in out:
            if target is not None and len(pre) >= target:
                nxt.append(pre)
                continue
            elems, counts, reach = _state_for(group, k, pre)
            start = pre[-1] if pre else 0
            children = []
            for x in range(start, group.order):
                if counts[x] >= max_mult or reach[k - 1, group.neg[x]]:
                    continue
                counts[x] += 1
                if sym.is_canonical(counts):
                    children.append(pre + (x,))
                counts[x] -= 1
            nxt.extend(children if children else [pre])
        out = nxt
    return out


def _search(group: AbelianGroup, k: int, max_mult: int, budget: SearchBudget, target: Optional[int] = None):
    if budget.parallel_width > 1:
        prefixes = _frontier(group, k, max_mult, target)
        jobs = [(group, k, max_mult, budget, target, p) for p in prefixes]
        with ProcessPoolExecutor(max_workers=budget.parallel_width) as ex:
            parts = list(ex.map(_run_subtree, jobs))
        best_len, best, found, nodes, exhausted = -1, (), [], 0, False
        for b_len, b, f, n, e in parts:
            # earliest subtree wins ties, matching sequential DFS order
            if b_len > best_len:
                best_len, best = b_len, b
            found.extend(f)
            nodes += n
            exhausted |= e
        return best_len, best, found, nodes, exhausted
    return _run_subtree((group, k, max_mult, budget, target, ()))


def max_zero_sum_free_length(group: AbelianGroup, k: int, budget: SearchBudget = SearchBudget(), squarefree: bool = False) -> ExactResult:
    """Longest sequence over ``group`` with no zero-sum subsequence of length ``k``."""
    if k != group.exponent:
        raise ValueError(f"k must equal exp(A) = {group.exponent} (symmetry reduction relies on it)")
    max_mult = 1 if squarefree else k - 1
    best_len, best, _, nodes, exhausted = _search(group, k, max_mult, budget)
    return ExactResult(
        group,
        "free_length",
        max(best_len, 0),
        Status.LOWER_BOUND_ONLY if exhausted else Status.EXACT,
        ZSequence(group, best),
        nodes,
    )


def exact_s(group: AbelianGroup, budget: SearchBudget = SearchBudget()) -> ExactResult:
    if group.order <= 1:
        raise ValueError("exact_s needs a nontrivial group")
    r = max_zero_sum_free_length(group, group.exponent, budget)
    return ExactResult(group, "s", r.value + 1, r.status, r.witness, r.nodes_explored)


def exact_g(group: AbelianGroup, budget: SearchBudget = SearchBudget()) -> ExactResult:
    if group.order <= 1:
        raise ValueError("exact_g needs a nontrivial group")
    r = max_zero_sum_free_length(group, group.exponent, budget, squarefree=True)
    status = r.status
    if status is Status.EXACT and r.value == group.order:
        status = Status.VACUOUS
    return ExactResult(group, "g", r.value + 1, status, r.witness, r.nodes_explored)


def enumerate_extremal(group: AbelianGroup, k: int, length: int, budget: SearchBudget = SearchBudget(), squarefree: bool = False) -> ExtremalEnumeration:
    """Canonical representatives of all length-``length`` sequences with no zero-sum k-subsequence."""
    if k != group.exponent:
        raise ValueError(f"k must equal exp(A) = {group.exponent}")
    max_mult = 1 if squarefree else k - 1
    _, _, found, nodes, exhausted = _search(group, k, max_mult, budget, target=length)
    if exhausted:
        return ExtremalEnumeration(group, k, length, Status.UNKNOWN, nodes_explored=nodes)
    sym = symmetry_group(group)
    reps = tuple(ZSequence(group, f) for f in found)
    sizes = tuple(sym.orbit_size(r.counts()) for r in reps)
    return ExtremalEnumeration(group, k, length, Status.EXACT, reps, sizes, nodes)


def certify_witness(result: ExactResult, rng=None, samples: int = 20, full_limit: int = 27) -> bool:
    """Check an EXACT s/g witness: it is zero-sum free, and appending an element breaks that.

    Every extension is tried when |G| <= ``full_limit``, otherwise ``samples``
    random ones.  Extensions for g are restricted to elements outside the witness.
    """
    from .groups import has_zero_sum_subsequence

    w, G = result.witness, result.group
    k = G.exponent
    if w is None or has_zero_sum_subsequence(w, k):
        return False
    if result.status is not Status.EXACT:
        return True
    pool = [x for x in range(G.order) if not (result.quantity == "g" and x in w.elems)]
    if G.order > full_limit:
        rng = rng if rng is not None else np.random.default_rng(0)
        pool = [pool[i] for i in rng.choice(len(pool), size=min(samples, len(pool)), replace=False)]
    return all(has_zero_sum_subsequence(ZSequence(G, w.elems + (x,)), k) for x in pool)
