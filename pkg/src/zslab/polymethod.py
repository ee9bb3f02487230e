"""Monomial-space dimensions and sets avoiding non-constant linear zero-sums.

``dim_exact(n, D, k)`` counts exponent vectors in [0, D-1]^n of total degree at
most k.  ``petrov_*`` deal with F in (Z_p)^n such that no non-constant tuple
(b_1..b_m) in F^m has sum_i a_i b_i = 0, where p divides sum_i a_i.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

import mpmath
import numpy as np

from .bounds import DomainError, Kind, ProofStep, make_bound
from .groups import AbelianGroup, ZSequence
from .search import BudgetExhausted, ExactResult, SearchBudget, Status
from .symmetry import symmetry_group

PREC_DPS = 50  # ~166-bit mantissa
NEAR_TIE_REL = mpmath.mpf("1e-9")


@dataclass(frozen=True)
class MonomialSpaceParams:
    n: int
    D: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.D < 2 or self.k < 0:
            raise DomainError(f"need n >= 1, D >= 2, k >= 0; got {self}")


# -- exact dimensions -------------------------------------------------------


def degree_counts(n: int, D: int) -> list[int]:
    """Coefficients of (1 + x + ... + x^(D-1))^n, i.e. monomials per exact degree."""
    row = [1]
    for _ in range(n):
        row = _times_block(row, D)
    return row


def _times_block(row: list[int], D: int) -> list[int]:
    # sliding window of width D over the prefix sums
    out = [0] * (len(row) + D - 1)
    acc = 0
    for t in range(len(out)):
        if t < len(row):
            acc += row[t]
        if t - D >= 0:
            acc -= row[t - D]
        out[t] = acc
    return out


def dim_dp(n: int, D: int, k: int) -> int:
    counts = degree_counts(n, D)
    return sum(counts[: k + 1])


def dim_inclusion_exclusion(n: int, D: int, k: int) -> int:
    """sum_j (-1)^j C(n, j) C(k - jD + n, n): cap violations removed by shifting D."""
    total = 0
    for j in range(0, min(n, k // D) + 1):
        total += (-1) ** j * math.comb(n, j) * math.comb(k - j * D + n, n)
    return total


def dim_enumerate(n: int, D: int, k: int) -> int:
    return sum(1 for a in product(range(D), repeat=n) if sum(a) <= k)


def dim_exact(params: MonomialSpaceParams | int, D: Optional[int] = None, k: Optional[int] = None) -> int:
    """Exact dimension of the span of monomials with exponents < D and degree <= k.

    Computed by the sliding-window DP and by inclusion-exclusion; the two must agree.
    """
    p = params if isinstance(params, MonomialSpaceParams) else MonomialSpaceParams(params, D, k)
    k_eff = min(p.k, p.n * (p.D - 1))
    a = dim_dp(p.n, p.D, k_eff)
    b = dim_inclusion_exclusion(p.n, p.D, k_eff)
    if a != b:
        raise ArithmeticError(f"dimension routes disagree for {p}: {a} != {b}")
    return a


def iter_dims(D: int, n_max: int) -> Iterator[tuple[int, list[int]]]:
    """Yield (n, cumulative dimension list indexed by k) for n = 1..n_max, reusing the DP."""
    row = [1]
    for n in range(1, n_max + 1):
        row = _times_block(row, D)
        cum, acc = [], 0
        for c in row:
            acc += c
            cum.append(acc)
        yield n, cum


# -- closed-form bound ------------------------------------------------------


def hoeffding_exponent(D: int, m: int) -> mpmath.mpf:
    """c = 1 - (m-2)^2 / (2 m^2 ln D)."""
    if m < 2:
        raise DomainError("m must be >= 2")
    if D < 2:
        raise DomainError("D must be >= 2")
    with mpmath.workdps(PREC_DPS):
        return 1 - mpmath.mpf((m - 2) ** 2) / (2 * m * m * mpmath.log(D))


def hoeffding_dim_bound(n: int, D: int, m: int) -> mpmath.mpf:
    """D^(c n), bounding dim_exact(n, D, floor(n (D-1) / m))."""
    c = hoeffding_exponent(D, m)
    with mpmath.workdps(PREC_DPS):
        if m == 2:
            return mpmath.mpf(D) ** n
        return mpmath.power(D, c * n)


@dataclass(frozen=True)
class DimBoundCheck:
    n: int
    D: int
    m: int
    k: int
    dim: int
    bound: mpmath.mpf
    status: str  # OK | NEAR_TIE | VIOLATION


def compare_dim_to_bound(n: int, D: int, m: int, dim: int) -> DimBoundCheck:
    """Compare ln(dim) against c n ln(D) in high precision."""
    k = n * (D - 1) // m
    with mpmath.workdps(PREC_DPS):
        lhs = mpmath.log(dim)
        rhs = hoeffding_exponent(D, m) * n * mpmath.log(D)
        if lhs <= rhs:
            status = "OK"
        elif lhs - rhs <= NEAR_TIE_REL * abs(rhs):
            status = "NEAR_TIE"
        else:
            status = "VIOLATION"
        return DimBoundCheck(n, D, m, k, dim, mpmath.exp(rhs), status)


def dim_bound_sweep(n_max: int = 2000, Ds: Iterable[int] = (2, 3, 5, 7, 11), ms: Iterable[int] = range(3, 11)) -> list[DimBoundCheck]:
    ms = list(ms)
    out = []
    for D in Ds:
        for n, cum in iter_dims(D, n_max):
            for m in ms:
                out.append(compare_dim_to_bound(n, D, m, cum[n * (D - 1) // m]))
    return out


# -- Petrov-condition sets --------------------------------------------------


@dataclass(frozen=True)
class PetrovInstance:
    p: int
    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, math.isqrt(self.p) + 1)):
            raise DomainError(f"p={self.p} is not prime")
        if self.n < 1:
            raise DomainError("n must be >= 1")
        cs = tuple(int(a) % self.p for a in self.coeffs)
        if len(cs) < 2:
            raise DomainError("need at least two coefficients")
        if sum(cs) % self.p:
            raise DomainError(f"p={self.p} must divide the coefficient sum {sum(cs)}")
        object.__setattr__(self, "coeffs", cs)

    @property
    def m(self) -> int:
        return len(self.coeffs)

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup.elementary(self.p, self.n)

    def normalized(self) -> "PetrovInstance":
        """Reorder coefficients so the last one is nonzero mod p."""
        nz = [a for a in self.coeffs if a]
        if not nz:
            raise DomainError("all coefficients vanish mod p; the cardinality bound does not apply")
        zeros = [a for a in self.coeffs if not a]
        return PetrovInstance(self.p, self.n, tuple(zeros + nz))


def _scaled(group: AbelianGroup, a: int) -> np.ndarray:
    """Index map x -> a*x."""
    c = group.coord_array
    return ((c * a) % group.exponent * _radix(group)).sum(axis=1).astype(np.intp)


def _radix(group: AbelianGroup) -> np.ndarray:
    r = group.rank
    return np.array([group.index(tuple(int(j == i) for j in range(r))) for i in range(r)], dtype=np.int64)


def _tuple_sums(group: AbelianGroup, F: Sequence[int], coeffs: Sequence[int]):
    """Map each tuple over F to sum_i a_i b_i; returns (tuples, sums)."""
    add = group.add_table
    scaled = [_scaled(group, a) for a in coeffs]
    tuples = list(product(F, repeat=len(coeffs)))
    sums = []
    for t in tuples:
        s = 0
        for b, sc in zip(t, scaled):
            s = add[s, sc[b]]
        sums.append(int(s))
    return tuples, sums


def petrov_verify(inst: PetrovInstance, F: Iterable, witness: bool = False):
    """Whether no non-constant tuple over F satisfies sum a_i b_i = 0.

    Meet in the middle: zero-sum tuples are counted by pairing left-half sums
    with negated right-half sums.  Constant tuples are always zero-sum (p divides
    the coefficient sum), so the set is valid iff that count equals |F|.
    """
    group = inst.group
    idx = sorted({e if isinstance(e, (int, np.integer)) else group.index(e) for e in F})
    if not idx:
        return (True, None) if witness else True
    h = inst.m // 2
    left, lsums = _tuple_sums(group, idx, inst.coeffs[:h])
    right, rsums = _tuple_sums(group, idx, inst.coeffs[h:])
    neg = group.neg
    by_sum = Counter(lsums)
    zero_tuples = sum(by_sum[int(neg[s])] for s in rsums)
    ok = zero_tuples == len(idx)
    if not witness:
        return ok
    if ok:
        return True, None
    lookup: dict[int, list[tuple]] = {}
    for t, s in zip(left, lsums):
        lookup.setdefault(s, []).append(t)
    for t, s in zip(right, rsums):
        for lt in lookup.get(int(neg[s]), ()):
            full = lt + t
            if len(set(full)) > 1:
                return False, tuple(group.coords(b) for b in full)
    raise AssertionError("zero-sum count and witness search disagree")


def petrov_verify_naive(inst: PetrovInstance, F: Iterable) -> bool:
    group = inst.group
    elems = [tuple(e) for e in F]
    for t in product(elems, repeat=inst.m):
        if len(set(t)) < 2:
            continue
        s = group.zero()
        for a, b in zip(inst.coeffs, t):
            s = group.add(s, group.scale(a, b))
        if not any(s):
            return False
    return True


def petrov_max_search(inst: PetrovInstance, budget: SearchBudget = SearchBudget()) -> ExactResult:
    """Largest F passing petrov_verify, by orderly DFS over subsets up to affine maps."""
    group = inst.group
    N = group.order
    # x -> A x + t keeps sum a_i b_i = 0: linear maps commute with the form and
    # translations cancel because p divides sum a_i
    sym = symmetry_group(group)
    counts = np.zeros(N, dtype=np.int64)
    state = {"nodes": 0, "best": ()}
    deadline = time.monotonic() + budget.max_seconds

    def rec(F: list[int]):
        if len(F) > len(state["best"]):
            state["best"] = tuple(F)
        start = F[-1] + 1 if F else 0
        for x in range(start, N):
            if len(F) + (N - x) <= len(state["best"]):
                break
            state["nodes"] += 1
            if state["nodes"] > budget.max_nodes or time.monotonic() > deadline:
                raise BudgetExhausted
            counts[x] = 1
            if sym.is_canonical(counts) and petrov_verify(inst, F + [x]):
                F.append(x)
                rec(F)
                F.pop()
            counts[x] = 0

    status = Status.EXACT
    try:
        rec([])
    except BudgetExhausted:
        status = Status.LOWER_BOUND_ONLY
    best = state["best"]
    return ExactResult(group, "petrov", len(best), status, ZSequence(group, best), state["nodes"])


def petrov_max_brute(inst: PetrovInstance) -> int:
    """Oracle: scan every subset of (Z_p)^n (tiny groups only)."""
    group = inst.group
    elems = group.elements
    best = 0
    for mask in range(1 << len(elems)):
        F = [e for i, e in enumerate(elems) if mask >> i & 1]
        if len(F) > best and petrov_verify_naive(inst, F):
            best = len(F)
    return best


def petrov_cardinality_bound(inst: PetrovInstance, form: str = "EXACT_DIM"):
    """Upper bound on |F|: m * dim(L_{n,p,floor(n(p-1)/m)}) or its closed form.

    Returns a BoundResult.
    """
    norm = inst.normalized()
    p, n, m = norm.p, norm.n, norm.m
    k = n * (p - 1) // m
    inputs = {"p": p, "n": n, "m": m, "coeffs": list(norm.coeffs)}
    if form == "EXACT_DIM":
        d = dim_exact(n, p, k)
        value = m * d
        step = ProofStep("petrov_dim", "|F| <= m * dim(L_{n,p,n(p-1)/m})", {**inputs, "degree": k, "dim": d}, value)
        return make_bound(Kind.UPPER, value, exact_int=value, provenance=(step,))
    if form == "CLOSED_FORM":
        with mpmath.workdps(PREC_DPS):
            value = m * hoeffding_dim_bound(n, p, m)
        step = ProofStep("petrov_closed_form", "|F| <= m * p^((1 - (m-2)^2/(2 m^2 ln p)) n)", inputs, value)
        return make_bound(Kind.UPPER, value, provenance=(step,))
    raise DomainError(f"unknown form {form!r}")
