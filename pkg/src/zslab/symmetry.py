"""Affine symmetries x -> a(x) + t of a finite abelian group acting on multisets.

Every such map preserves "has a zero-sum subsequence of length exp(G)", since a
length-k subsequence picks up k*t = 0 from the translation.  Multisets are
handled as count vectors; the canonical representative of an orbit is the one
whose nondecreasing index tuple is lexicographically least, which is the count
vector that is lexicographically *greatest*.

Orderly generation relies on one fact: if S is canonical then so is S with its
largest element removed.  The DFS in ``search`` builds nondecreasing tuples and
keeps only canonical ones, so each orbit is met exactly once.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Optional

import numpy as np

from .groups import AbelianGroup, ZSequence

# Automorphism groups larger than this are not enumerated.
MAX_AUTOMORPHISMS = 60_000
# Precompute the full (translation, automorphism, element) inverse table below this many entries.
_FULL_TABLE_LIMIT = 12_000_000


class _TooMany(Exception):
    pass


def enumerate_automorphisms(group: AbelianGroup, limit: int = MAX_AUTOMORPHISMS) -> Optional[np.ndarray]:
    """All automorphisms as an (A, |G|) array of image indices, or None past ``limit``.

    An endomorphism is fixed by the images h_i of the standard generators, with
    n_i * h_i = 0; it is bijective iff <h_1..h_i> has order n_1*...*n_i at every
    step, which the backtracking enforces as it goes.
    """
    N, r = group.order, group.rank
    if r == 0:
        return np.zeros((1, 1), dtype=np.intp)
    add = group.add_table
    fs = group.invariant_factors

    def multiple(t: int, h: int) -> int:
        x = 0
        for _ in range(t):
            x = add[x, h]
        return int(x)

    candidates = []
    for f in fs:
        candidates.append([h for h in range(N) if multiple(f, h) == 0])

    found: list[tuple[int, ...]] = []

    def rec(i: int, images: tuple[int, ...], span: frozenset[int]):
        if i == r:
            if len(found) >= limit:
                raise _TooMany
            found.append(images)
            return
        need = len(span) * fs[i]
        for h in candidates[i]:
            if h in span:
                continue
            mults = [0]
            for _ in range(fs[i] - 1):
                mults.append(int(add[mults[-1], h]))
            new_span = frozenset(int(add[a, m]) for a in span for m in mults)
            if len(new_span) == need:
                rec(i + 1, images + (h,), new_span)

    try:
        rec(0, (), frozenset([0]))
    except _TooMany:
        return None

    coords = group.coord_array  # (N, r)
    H = np.array([[group.coords(h) for h in imgs] for imgs in found], dtype=np.int64)  # (A, r, r)
    img = np.einsum("nr,arc->anc", coords, H) % np.array(fs, dtype=np.int64)
    radix = np.array([group.index(tuple(int(j == i) for j in range(r))) for i in range(r)], dtype=np.int64)
    return (img * radix).sum(axis=2).astype(np.intp)


def unit_scalings(group: AbelianGroup, limit: int = MAX_AUTOMORPHISMS) -> np.ndarray:
    """Coordinate-wise unit multiplications, a subgroup of Aut(G)."""
    fs = group.invariant_factors
    units = [[u for u in range(1, f) if math.gcd(u, f) == 1] for f in fs]
    coords = group.coord_array
    total = math.prod(len(u) for u in units)
    if total > limit:
        return np.arange(group.order, dtype=np.intp)[None, :]
    rows = []
    for us in itertools.product(*units):
        img = (coords * np.array(us, dtype=np.int64)) % np.array(fs, dtype=np.int64)
        rows.append([group.index(tuple(c)) for c in img])
    return np.array(rows, dtype=np.intp)


class SymmetryGroup:
    """The affine maps x -> a(x) + t, with a ranging over a group of automorphisms."""

    def __init__(self, group: AbelianGroup, automorphisms: Optional[np.ndarray] = None):
        self.group = group
        if automorphisms is None:
            automorphisms = enumerate_automorphisms(group) if group.order <= 64 or _is_elementary(group) else None
            self.full_automorphisms = automorphisms is not None
            if automorphisms is None:
                automorphisms = unit_scalings(group)
        else:
            self.full_automorphisms = False
        # dedupe and fix order so that results are reproducible
        auts = np.unique(np.asarray(automorphisms, dtype=np.intp), axis=0)
        self.automorphisms = auts
        N = group.order
        self._dtype = np.int16 if N < 32_000 else np.int32
        add = group.add_table
        if N * N * len(auts) <= _FULL_TABLE_LIMIT:
            # inv[x, a, z] = a(z) + x: inverse of y -> a^{-1}(y - x), which sends x to 0
            self._inv = np.stack([add[auts, x] for x in range(N)]).astype(self._dtype)
        else:
            self._inv = None

    @property
    def size(self) -> int:
        return self.group.order * len(self.automorphisms)

    def _inverse_rows(self, xs) -> np.ndarray:
        if self._inv is not None:
            return self._inv[xs].reshape(-1, self.group.order)
        add = self.group.add_table
        return np.concatenate([add[self.automorphisms, x] for x in xs]).astype(self._dtype)

    def is_canonical(self, counts: np.ndarray) -> bool:
        """Whether ``counts`` is the lexicographically greatest count vector in its orbit."""
        cmax = counts.max()
        if cmax == 0:
            return True
        if counts[0] != cmax:
            return False
        xs = np.flatnonzero(counts == cmax)
        # only maps sending a max-multiplicity element to 0 can compete
        chunk = max(1, 16384 // len(self.automorphisms))
        for start in range(0, len(xs), chunk):
            rows = self._inverse_rows(xs[start : start + chunk])
            if _any_greater(counts[rows], counts):
                return False
        return True

    def canonical_counts(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts, dtype=np.int64)
        if counts.max(initial=0) == 0:
            return counts.copy()
        xs = np.flatnonzero(counts == counts.max())
        images = counts[self._inverse_rows(xs)]
        return _lex_max_row(images)

    def canonical_form(self, seq: ZSequence) -> ZSequence:
        return ZSequence.from_counts(self.group, self.canonical_counts(seq.counts()))

    def stabilizer_size(self, counts: np.ndarray) -> int:
        N = self.group.order
        total = 0
        for start in range(0, N, 64):
            rows = self._inverse_rows(np.arange(start, min(N, start + 64)))
            total += int(np.all(counts[rows] == counts, axis=1).sum())
        return total

    def orbit_size(self, counts: np.ndarray) -> int:
        return self.size // self.stabilizer_size(counts)

    def permutation(self, translation: int, aut: int) -> np.ndarray:
        """The map y -> a(y) + t as an index array."""
        return self.group.add_table[self.automorphisms[aut], translation]

    def random_permutation(self, rng) -> np.ndarray:
        return self.permutation(int(rng.integers(self.group.order)), int(rng.integers(len(self.automorphisms))))

    def apply(self, perm: np.ndarray, seq: ZSequence) -> ZSequence:
        return ZSequence(seq.group, tuple(int(perm[g]) for g in seq.elems))


def _is_elementary(group: AbelianGroup) -> bool:
    fs = group.invariant_factors
    return bool(fs) and len(set(fs)) == 1 and _is_prime(fs[0])


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _any_greater(images: np.ndarray, counts: np.ndarray) -> bool:
    diff = images - counts
    nz = diff != 0
    first = nz.argmax(axis=1)
    vals = diff[np.arange(len(diff)), first]
    return bool((vals > 0).any())


def _lex_max_row(rows: np.ndarray) -> np.ndarray:
    cand = rows
    for col in range(rows.shape[1]):
        m = cand[:, col].max()
        cand = cand[cand[:, col] == m]
        if len(cand) == 1:
            break
    return cand[0].astype(np.int64)


@lru_cache(maxsize=64)
def symmetry_group(group: AbelianGroup) -> SymmetryGroup:
    return SymmetryGroup(group)


def canonical_form(seq: ZSequence) -> ZSequence:
    """Lexicographically least representative of the orbit of ``seq``."""
    return symmetry_group(seq.group).canonical_form(seq)
