"""Finite abelian groups, sequences over them, and fixed-length zero-sum feasibility.

Elements are addressed two ways: as coordinate tuples ``(c_1, ..., c_r)`` with
``0 <= c_i < n_i`` and as integer indices in mixed-radix order (first coordinate
most significant).  Index order and lexicographic coordinate order coincide, which
is what makes canonical forms and DFS order deterministic.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

GroupElement = tuple  # tuple[int, ...] of canonical residues


class ParseError(ValueError):
    pass


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(factors: Iterable[int]) -> tuple[int, ...]:
    """Normalize any list of cyclic orders to the chain n_1 | n_2 | ... | n_r."""
    powers: dict[int, list[int]] = {}
    for f in factors:
        if f < 2:
            raise ValueError(f"cyclic factor must be >= 2, got {f}")
        for p, e in _factorize(f).items():
            powers.setdefault(p, []).append(p**e)
    if not powers:
        return ()
    rank = max(len(v) for v in powers.values())
    out = [1] * rank
    for plist in powers.values():
        plist.sort()
        # largest prime powers go to the last invariant factors
        for i, q in enumerate(reversed(plist)):
            out[rank - 1 - i] *= q
    return tuple(out)


@dataclass(frozen=True)
class AbelianGroup:
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        fs = tuple(int(f) for f in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", fs)
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise ValueError(f"{fs} is not a divisibility chain")
        if fs and fs[0] < 2:
            raise ValueError("invariant factors must be >= 2")

    @classmethod
    def from_factors(cls, factors: Iterable[int]) -> "AbelianGroup":
        return cls(invariant_factors(factors))

    @classmethod
    def elementary(cls, k: int, n: int) -> "AbelianGroup":
        return cls((k,) * n)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def is_homocyclic(self) -> bool:
        """True for groups of the form (Z_k)^n (the trivial group included)."""
        return len(set(self.invariant_factors)) <= 1

    @property
    def spec(self) -> str:
        if not self.invariant_factors:
            return "1"
        parts = []
        for f in sorted(set(self.invariant_factors)):
            c = self.invariant_factors.count(f)
            parts.append(f"{f}^{c}" if c > 1 else str(f))
        return "x".join(parts)

    def __str__(self) -> str:
        return self.spec

    # -- element addressing ------------------------------------------------

    @cached_property
    def _radix(self) -> tuple[int, ...]:
        w, out = 1, []
        for f in reversed(self.invariant_factors):
            out.append(w)
            w *= f
        return tuple(reversed(out))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return sum((c % f) * w for c, f, w in zip(coords, self.invariant_factors, self._radix))

    def coords(self, index: int) -> GroupElement:
        return tuple((index // w) % f for f, w in zip(self.invariant_factors, self._radix))

    def element(self, coords: Sequence[int]) -> GroupElement:
        return tuple(c % f for c, f in zip(coords, self.invariant_factors))

    @cached_property
    def elements(self) -> list[GroupElement]:
        return [self.coords(i) for i in range(self.order)]

    @cached_property
    def coord_array(self) -> np.ndarray:
        """(order, rank) array of coordinates in index order."""
        arr = np.array(self.elements, dtype=np.int64)
        return arr.reshape(self.order, self.rank)

    @cached_property
    def add_table(self) -> np.ndarray:
        if not self.rank:
            return np.zeros((1, 1), dtype=np.intp)
        c = self.coord_array
        s = (c[:, None, :] + c[None, :, :]) % np.array(self.invariant_factors, dtype=np.int64)
        return (s * np.array(self._radix, dtype=np.int64)).sum(axis=2).astype(np.intp)

    @cached_property
    def neg(self) -> np.ndarray:
        return np.argmin(self.add_table, axis=1).astype(np.intp)

    @cached_property
    def sub_table(self) -> np.ndarray:
        """sub_table[g, h] = index of h - g."""
        return self.add_table[self.neg]

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return tuple((x + y) % f for x, y, f in zip(a, b, self.invariant_factors))

    def scale(self, t: int, a: GroupElement) -> GroupElement:
        return tuple((t * x) % f for x, f in zip(a, self.invariant_factors))

    def zero(self) -> GroupElement:
        return (0,) * self.rank

    def element_order(self, index: int) -> int:
        c = self.coords(index)
        return math.lcm(*(f // math.gcd(x, f) for x, f in zip(c, self.invariant_factors))) if c else 1


_GROUP_RE = re.compile(r"^\d+(\^\d+)?(x\d+(\^\d+)?)*$")


def parse_group(spec: str) -> AbelianGroup:
    """Parse specs like ``"3^2"``, ``"2x4x4"`` or ``"9"``; factors are CRT-normalized."""
    text = spec.strip().replace(" ", "")
    if not _GROUP_RE.match(text):
        raise ParseError(
            f"malformed group spec {spec!r}; expected <int>(^<int>)?(x<int>(^<int>)?)*, e.g. 3^2 or 2x4x4"
        )
    factors: list[int] = []
    for part in text.split("x"):
        base, _, power = part.partition("^")
        b, e = int(base), int(power) if power else 1
        if b < 2:
            raise ParseError(f"cyclic factor must be >= 2, got {b}")
        factors.extend([b] * e)
    return AbelianGroup.from_factors(factors)


@dataclass(frozen=True)
class ZSequence:
    """A finite multiset over ``group``, stored as a nondecreasing tuple of element indices."""

    group: AbelianGroup
    elems: tuple[int, ...]

    def __post_init__(self):
        es = tuple(sorted(int(e) for e in self.elems))
        if es and not (0 <= es[0] and es[-1] < self.group.order):
            raise ValueError("element index out of range")
        object.__setattr__(self, "elems", es)

    @classmethod
    def from_elements(cls, group: AbelianGroup, elems: Iterable[Sequence[int]]) -> "ZSequence":
        return cls(group, tuple(group.index(c) for c in elems))

    @classmethod
    def from_counts(cls, group: AbelianGroup, counts: Sequence[int]) -> "ZSequence":
        return cls(group, tuple(i for i, c in enumerate(counts) for _ in range(int(c))))

    def __len__(self) -> int:
        return len(self.elems)

    @property
    def length(self) -> int:
        return len(self.elems)

    @property
    def multiplicities(self) -> dict[GroupElement, int]:
        return {self.group.coords(i): c for i, c in sorted(Counter(self.elems).items())}

    def multiplicity(self, g: Sequence[int]) -> int:
        return self.elems.count(self.group.index(g))

    def counts(self) -> np.ndarray:
        return np.bincount(np.array(self.elems, dtype=np.intp), minlength=self.group.order).astype(np.int64)

    @property
    def support(self) -> list[GroupElement]:
        return [self.group.coords(i) for i in sorted(set(self.elems))]

    @property
    def sum(self) -> GroupElement:
        total = self.group.zero()
        for i in self.elems:
            total = self.group.add(total, self.group.coords(i))
        return total

    def is_squarefree(self) -> bool:
        return len(set(self.elems)) == len(self.elems)

    def is_zero_sum(self) -> bool:
        return not any(self.sum)

    def divides(self, other: "ZSequence") -> bool:
        mine, theirs = Counter(self.elems), Counter(other.elems)
        return all(theirs[g] >= c for g, c in mine.items())

    def append(self, g: Sequence[int]) -> "ZSequence":
        return ZSequence(self.group, self.elems + (self.group.index(g),))

    def to_json(self) -> dict:
        return {"group": self.group.spec, "elems": [list(self.group.coords(i)) for i in self.elems]}

    @classmethod
    def from_json(cls, data: dict) -> "ZSequence":
        g = parse_group(data["group"])
        return cls.from_elements(g, data["elems"])

    def __str__(self) -> str:
        return "{" + ", ".join(str(c) for c in self.multiplicities_flat()) + "}"

    def multiplicities_flat(self) -> list[GroupElement]:
        return [self.group.coords(i) for i in self.elems]


@dataclass(frozen=True, eq=False)
class SumReachTable:
    """reach[j, g]: some subsequence of length exactly j sums to g (0 <= j <= k)."""

    group: AbelianGroup
    k: int
    reach: np.ndarray

    def __post_init__(self):
        self.reach.setflags(write=False)

    @classmethod
    def empty(cls, group: AbelianGroup, k: int) -> "SumReachTable":
        r = np.zeros((k + 1, group.order), dtype=bool)
        r[0, 0] = True
        return cls(group, k, r)

    @classmethod
    def from_sequence(cls, seq: ZSequence, k: int) -> "SumReachTable":
        table = cls.empty(seq.group, k)
        for g in seq.elems:
            table = incremental_extend(table, g)
        return table

    def __eq__(self, other) -> bool:
        if not isinstance(other, SumReachTable):
            return NotImplemented
        return self.group == other.group and self.k == other.k and np.array_equal(self.reach, other.reach)

    def __hash__(self):
        return hash((self.group, self.k, self.reach.tobytes()))

    def reachable(self, j: int, g: Sequence[int] | int) -> bool:
        idx = g if isinstance(g, (int, np.integer)) else self.group.index(g)
        return bool(self.reach[j, idx])

    @property
    def has_zero_sum(self) -> bool:
        return bool(self.reach[self.k, 0])


def extend_reach(reach: np.ndarray, sub_row: np.ndarray) -> np.ndarray:
    """Raw-array version of incremental_extend; ``sub_row[h]`` is the index of h - g."""
    new = reach.copy()
    new[1:] |= reach[:-1][:, sub_row]
    return new


def incremental_extend(table: SumReachTable, g: Sequence[int] | int) -> SumReachTable:
    idx = g if isinstance(g, (int, np.integer)) else table.group.index(g)
    return SumReachTable(table.group, table.k, extend_reach(table.reach, table.group.sub_table[idx]))


def has_zero_sum_subsequence(seq: ZSequence, k: int, witness: bool = False):
    """Decide whether ``seq`` has a zero-sum subsequence of length exactly ``k``.

    Runs the length-indexed reachability DP in O(|S| * k * |G|).  With
    ``witness=True`` returns ``(found, T)`` where ``T`` is such a subsequence
    (or None); per-prefix tables are kept only in that mode.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    group = seq.group
    if k > len(seq):
        return (False, None) if witness else False
    reach = SumReachTable.empty(group, k).reach
    history = [reach] if witness else None
    for g in seq.elems:
        reach = extend_reach(reach, group.sub_table[g])
        if witness:
            history.append(reach)
    found = bool(reach[k, 0])
    if not witness:
        return found
    if not found:
        return False, None
    picked = []
    j, h = k, 0
    for i in range(len(seq.elems), 0, -1):
        if j == 0:
            break
        prev = history[i - 1]
        if prev[j, h]:
            continue
        g = seq.elems[i - 1]
        picked.append(g)
        h = int(group.sub_table[g][h])
        j -= 1
    return True, ZSequence(group, tuple(picked))


def naive_has_zero_sum_subsequence(seq: ZSequence, k: int) -> bool:
    """Enumeration oracle over all C(|S|, k) position subsets."""
    group = seq.group
    add = group.add_table
    for combo in combinations(seq.elems, k):
        s = 0
        for g in combo:
            s = add[s, g]
        if s == 0:
            return True
    return False


def maybe_group(group: AbelianGroup | str) -> AbelianGroup:
    return parse_group(group) if isinstance(group, str) else group


def power_sequence(seq: ZSequence, e: int) -> ZSequence:
    """T^e: every multiplicity multiplied by e."""
    return ZSequence(seq.group, tuple(g for g in seq.elems for _ in range(e)))


def _partitions(n: int, max_part: int | None = None):
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def abelian_groups(order: int) -> list[AbelianGroup]:
    """All abelian groups of the given order, up to isomorphism, sorted by invariant factors."""
    if order == 1:
        return [AbelianGroup(())]
    per_prime = []
    for p, e in sorted(_factorize(order).items()):
        per_prime.append([[p**a for a in part] for part in _partitions(e)])
    out = []

    def rec(i, acc):
        if i == len(per_prime):
            out.append(AbelianGroup.from_factors(acc))
            return
        for choice in per_prime[i]:
            rec(i + 1, acc + choice)

    rec(0, [])
    return sorted(out, key=lambda g: (len(g.invariant_factors), g.invariant_factors))
