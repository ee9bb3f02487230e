"""Effective bounds on the Erdős–Ginzburg–Ziv constant s(A), with provenance.

Each evaluator returns a :class:`BoundResult`.  Composite bounds are built by
actually running the chain of inequalities (quotient steps, invariant-factor
combination), so every intermediate number is recorded and auditable.  Real
values are kept at 50 significant digits; uppers are floored and lowers are
ceiled to integers since s(A) is an integer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Optional, Sequence

import mpmath

from .groups import AbelianGroup, _factorize

DPS = 50
_TIE = mpmath.mpf("1e-40")


class Kind(str, enum.Enum):
    LOWER = "LOWER"
    UPPER = "UPPER"
    EXACT = "EXACT"


class DomainError(ValueError):
    pass


class KindError(TypeError):
    pass


class MissingBound(KeyError):
    pass


def property_d(p: int, n: int) -> str:
    return f"PROPERTY_D({p},{n})"


def _fmt(x) -> Any:
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 40)
    return x


@dataclass(frozen=True)
class ProofStep:
    thm: str
    quote: str
    inputs: dict
    value: Any

    def to_json(self) -> dict:
        return {"thm": self.thm, "quote": self.quote, "inputs": {k: _fmt(v) for k, v in self.inputs.items()}, "value": _fmt(self.value)}


@dataclass(frozen=True)
class BoundResult:
    kind: Kind
    value_real: mpmath.mpf
    value_int: int
    conditional_on: tuple[str, ...] = ()
    provenance: tuple[ProofStep, ...] = ()
    rates: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind is Kind.EXACT and self.conditional_on:
            raise ValueError("EXACT bounds cannot be conditional")

    @property
    def is_conditional(self) -> bool:
        return bool(self.conditional_on)

    @property
    def source(self) -> str:
        return self.provenance[-1].thm if self.provenance else ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "value_real": _fmt(self.value_real),
            "value_int": self.value_int,
            "conditional_on": list(self.conditional_on),
            "provenance": [s.to_json() for s in self.provenance],
            "rates": {k: _fmt(v) for k, v in self.rates.items()},
        }


def make_bound(kind: Kind, value, exact_int: Optional[int] = None, conditional_on: Iterable[str] = (),
               provenance: Sequence[ProofStep] = (), rates: Optional[dict] = None) -> BoundResult:
    with mpmath.workdps(DPS):
        if exact_int is not None:
            value_int = int(exact_int)
            real = mpmath.mpf(value_int)
        else:
            real = mpmath.mpf(value)
            # rounding toward a near-integer keeps the integer bound sound
            if kind is Kind.LOWER:
                value_int = int(mpmath.ceil(real - _TIE))
            else:
                value_int = int(mpmath.floor(real + _TIE))
    return BoundResult(kind, real, value_int, _dedupe(conditional_on), tuple(provenance), dict(rates or {}))


def _dedupe(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def _as_upper(b: BoundResult) -> BoundResult:
    if b.kind is Kind.LOWER:
        raise KindError("a LOWER bound cannot feed an upper-bound step")
    return b


# -- closed forms -----------------------------------------------------------


def rank2_exact(n1: int, n2: int) -> BoundResult:
    """s(Z_n1 + Z_n2) = 2 n1 + 2 n2 - 3 for 1 <= n1 | n2 (n1 = 1 is the cyclic case)."""
    if n1 < 1 or n2 < 2 or n2 % n1:
        raise DomainError(f"need 1 <= n1 | n2 and n2 >= 2, got ({n1}, {n2})")
    v = 2 * n1 + 2 * n2 - 3
    step = ProofStep("rank2_exact", "s(A) = 2 n_1 + 2 n_2 - 3", {"n1": n1, "n2": n2}, v)
    return make_bound(Kind.EXACT, v, exact_int=v, provenance=(step,))


def harborth_bounds(k: int, n: int) -> tuple[BoundResult, BoundResult]:
    if k < 2 or n < 1:
        raise DomainError("need k >= 2, n >= 1")
    lo, hi = (k - 1) * 2**n + 1, (k - 1) * k**n + 1
    inputs = {"k": k, "n": n}
    lower = make_bound(Kind.LOWER, lo, exact_int=lo,
                       provenance=(ProofStep("harborth_lower", "(k-1) 2^n + 1 <= s((Z_k)^n)", inputs, lo),))
    upper = make_bound(Kind.UPPER, hi, exact_int=hi,
                       provenance=(ProofStep("harborth_upper", "s((Z_k)^n) <= (k-1) k^n + 1", inputs, hi),))
    return lower, upper


def har2_exact(a: int, n: int) -> BoundResult:
    """s((Z_{2^a})^n) = (2^a - 1) 2^n + 1."""
    if a < 1 or n < 1:
        raise DomainError("need a >= 1, n >= 1")
    v = (2**a - 1) * 2**n + 1
    step = ProofStep("two_power_exact", "s((Z_k)^n) = (k-1) 2^n + 1 for k = 2^a", {"a": a, "k": 2**a, "n": n}, v)
    return make_bound(Kind.EXACT, v, exact_int=v, provenance=(step,))


def egz_epsilon(p: int) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return mpmath.mpf((p - 2) ** 2) / (2 * p * p * mpmath.log(p))


def upper_egz_prime(p: int, n: int, verified_propd: Iterable[tuple[int, int]] = ()) -> BoundResult:
    """(p-1) p^((1-eps) n + 1) + 1, valid when (Z_p)^n has Property D."""
    if not _is_prime(p):
        raise DomainError(f"p={p} is not prime")
    if p == 2:
        raise DomainError("p = 2 is excluded: the exponent saving vanishes")
    if n < 1:
        raise DomainError("n must be >= 1")
    with mpmath.workdps(DPS):
        eps = egz_epsilon(p)
        value = (p - 1) * mpmath.power(p, (1 - eps) * n + 1) + 1
    cond = () if (p, n) in set(verified_propd) else (property_d(p, n),)
    step = ProofStep("prime_propd_upper", "s((Z_p)^n) <= (p-1) p^((1 - (p-2)^2/(2 p^2 ln p)) n + 1) + 1 under Property D",
                     {"p": p, "n": n, "epsilon": eps}, value)
    return make_bound(Kind.UPPER, value, conditional_on=cond, provenance=(step,))


def maincor2_bound(n: int) -> BoundResult:
    """s((Z_3)^n) <= 2 * 2.765^n, from s = 2g - 1 and the cap-set bound."""
    if n < 1:
        raise DomainError("n must be >= 1")
    with mpmath.workdps(DPS):
        value = 2 * mpmath.mpf("2.765") ** n
    step = ProofStep("ternary_capset_upper", "s((Z_3)^n) <= 2 * 2.765^n", {"n": n}, value)
    return make_bound(Kind.UPPER, value, provenance=(step,))


def trivial_exact() -> BoundResult:
    step = ProofStep("trivial_group", "s({0}) = 1", {}, 1)
    return make_bound(Kind.EXACT, 1, exact_int=1, provenance=(step,))


# -- compositions -----------------------------------------------------------


def exp_upper_step(exp_quot: int, s_H: BoundResult, s_quot: BoundResult, label: Optional[dict] = None) -> BoundResult:
    """s(G) <= exp(G/H) (s(H) - 1) + s(G/H), for exp(G) = exp(H) exp(G/H)."""
    _as_upper(s_H)
    _as_upper(s_quot)
    v = exp_quot * (s_H.value_int - 1) + s_quot.value_int
    inputs = {"exp_quotient": exp_quot, "s_H": s_H.value_int, "s_quotient": s_quot.value_int, **(label or {})}
    step = ProofStep("quotient_step", "s(G) <= exp(G/H) (s(H) - 1) + s(G/H)", inputs, v)
    return make_bound(Kind.UPPER, v, exact_int=v, conditional_on=s_H.conditional_on + s_quot.conditional_on,
                      provenance=s_H.provenance + s_quot.provenance + (step,))


def ppower_bound(p: int, r: int, n: int, base: Optional[BoundResult] = None,
                 verified_propd: Iterable[tuple[int, int]] = ()) -> BoundResult:
    """Bound for (Z_{p^r})^n by iterating the quotient step over H = p G.

    ``base`` bounds (Z_p)^n and defaults to the Property-D prime bound.  The
    result carries ``rates["d_eff"] = (U (p-1) / (p^r - 1))^(1/n)``.
    """
    if not _is_prime(p) or p == 2:
        raise DomainError("p must be an odd prime")
    if r < 1 or n < 1:
        raise DomainError("need r >= 1, n >= 1")
    base = upper_egz_prime(p, n, verified_propd) if base is None else _as_upper(base)
    U = base
    for j in range(1, r):
        U = exp_upper_step(p, U, base, {"group": f"(Z_{p}^{j + 1})^{n}"})
    with mpmath.workdps(DPS):
        d_eff = mpmath.power(mpmath.mpf(U.value_int) * (p - 1) / (p**r - 1), mpmath.mpf(1) / n)
    if r == 1:
        return replace(U, rates={**U.rates, "d_eff": d_eff})
    return make_bound(Kind.UPPER, U.value_int, exact_int=U.value_int, conditional_on=U.conditional_on,
                      provenance=U.provenance, rates={"d_eff": d_eff})


def egzupper_combine(factors: Sequence[int], per_prime_bounds: Mapping[tuple[int, int], BoundResult]) -> BoundResult:
    """s(A) <= sum_i (c_{r+1-i} - c_{r-i}) n_i - c_r + 1 from s((Z_p)^i) <= c_i (p-1) + 1."""
    fs = tuple(factors)
    if not fs:
        raise DomainError("need a nontrivial group")
    AbelianGroup(fs)  # validates the divisibility chain
    r = len(fs)
    primes = sorted(_factorize(fs[-1]))
    c = [0]
    used = []
    for i in range(1, r + 1):
        ci = 0
        for p in primes:
            b = per_prime_bounds.get((p, i))
            if b is None:
                raise MissingBound(f"no bound supplied for (Z_{p})^{i}")
            _as_upper(b)
            used.append(b)
            ci = max(ci, -(-(b.value_int - 1) // (p - 1)))
        c.append(ci)
    v = sum((c[r + 1 - i] - c[r - i]) * fs[i - 1] for i in range(1, r + 1)) - c[r] + 1
    prov: list[ProofStep] = []
    for b in used:
        prov.extend(b.provenance)
    step = ProofStep("invariant_factor_combine", "s(A) <= sum_i (c_{r+1-i} - c_{r-i}) n_i - c_r + 1",
                     {"factors": list(fs), "c": c[1:]}, v)
    cond = [x for b in used for x in b.conditional_on]
    return make_bound(Kind.UPPER, v, exact_int=v, conditional_on=cond, provenance=tuple(prov) + (step,),
                      rates={"c": tuple(c[1:]), "c_r": c[r]})


def elementary_bound(p: int, i: int, verified_propd: Iterable[tuple[int, int]] = (), allow_conditional: bool = True,
                     exact: Optional[Mapping[AbelianGroup, int]] = None) -> BoundResult:
    """Best available upper (or exact) bound for (Z_p)^i."""
    verified = set(verified_propd)
    cands = []
    if i == 1:
        cands.append(rank2_exact(1, p))
    elif i == 2:
        cands.append(rank2_exact(p, p))
    if p == 2:
        cands.append(har2_exact(1, i))
    G = AbelianGroup.elementary(p, i)
    if exact and G in exact:
        cands.append(exhaustive_exact(G, exact[G]))
    cands.append(harborth_bounds(p, i)[1])
    if p > 2:
        if allow_conditional:
            cands.append(upper_egz_prime(p, i, verified))
        if p == 3:
            cands.append(maincor2_bound(i))
    return pick_upper(cands)


def exhaustive_exact(group: AbelianGroup, value: int) -> BoundResult:
    step = ProofStep("exhaustive_search", "completed symmetry-reduced search", {"group": group.spec}, value)
    return make_bound(Kind.EXACT, value, exact_int=value, provenance=(step,))


def composite_bound(m: int, k: int, n: int, per_prime_bounds: Optional[Mapping[tuple[int, int], BoundResult]] = None,
                    verified_propd: Iterable[tuple[int, int]] = (), allow_conditional: bool = True) -> BoundResult:
    """Bound for (Z_{mk})^n with m a power of two and k odd, via H = k A.

    s(H) comes from the 2-power exact value, s(A/H) = s((Z_k)^n) from the
    invariant-factor combination, and the two are joined by one quotient step.
    ``rates`` reports the (k-1)-coefficient C, the closed form
    2^n (m-1) k + C (k-1) + 1, and c_eff(k) = C^(1/n).
    """
    if not _is_power_of_two(m):
        raise DomainError(f"m={m} is not a power of two")
    if k < 3 or k % 2 == 0:
        raise DomainError(f"k={k} must be odd and > 1")
    if n < 1:
        raise DomainError("n must be >= 1")
    s_H = trivial_exact() if m == 1 else har2_exact(m.bit_length() - 1, n)
    primes = sorted(_factorize(k))
    if per_prime_bounds is None:
        per_prime_bounds = {(p, i): elementary_bound(p, i, verified_propd, allow_conditional)
                            for p in primes for i in range(1, n + 1)}
    s_quot = egzupper_combine((k,) * n, per_prime_bounds)
    out = exp_upper_step(k, s_H, s_quot, {"group": f"(Z_{m * k})^{n}", "H": f"(Z_{m})^{n}", "quotient": f"(Z_{k})^{n}"})
    C = s_quot.rates["c_r"]
    closed = 2**n * (m - 1) * k + C * (k - 1) + 1
    with mpmath.workdps(DPS):
        c_eff = mpmath.power(C, mpmath.mpf(1) / n)
    return replace(out, rates={"C": C, "closed_form": closed, "c_eff": c_eff})


# -- aggregation ------------------------------------------------------------


def _upper_key(b: BoundResult):
    return (b.value_int, b.kind is not Kind.EXACT, b.is_conditional, len(b.provenance))


def _lower_key(b: BoundResult):
    return (-b.value_int, b.kind is not Kind.EXACT, b.is_conditional, len(b.provenance))


def pick_upper(cands: Iterable[BoundResult]) -> BoundResult:
    return min(cands, key=_upper_key)


def pick_lower(cands: Iterable[BoundResult]) -> BoundResult:
    return min(cands, key=_lower_key)


@dataclass(frozen=True)
class BoundOptions:
    assume_propd: bool = False
    verified_propd: frozenset = frozenset()
    exact: Mapping = field(default_factory=dict)  # AbelianGroup -> exhaustive s value
    lower_witnesses: Mapping = field(default_factory=dict)  # AbelianGroup -> certified s lower bound
    known: tuple = ()  # BoundResults to merge in (e.g. a previous report's candidates)


@dataclass(frozen=True)
class BoundReport:
    group: AbelianGroup
    lower: BoundResult
    upper: BoundResult
    conditional_upper: BoundResult
    candidates: tuple[BoundResult, ...]

    @property
    def is_exact(self) -> bool:
        return self.lower.value_int == self.upper.value_int

    def to_json(self) -> dict:
        return {
            "group": self.group.spec,
            "interval": [self.lower.value_int, self.upper.value_int],
            "status": "EXACT" if self.is_exact else "BOUNDED",
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "conditional_upper": self.conditional_upper.to_json(),
            "candidates": [c.to_json() for c in self.candidates],
        }


def candidate_bounds(group: AbelianGroup, options: BoundOptions = BoundOptions()) -> list[BoundResult]:
    """Every bound whose hypotheses match ``group``."""
    fs = group.invariant_factors
    if not fs:
        return [trivial_exact()]
    r, k = len(fs), fs[-1]
    vp = options.verified_propd
    out: list[BoundResult] = []
    if r <= 2:
        out.append(rank2_exact(fs[0] if r == 2 else 1, k))
    else:
        sub = rank2_exact(fs[-2], k)
        step = ProofStep("subgroup_monotone", "s(H) <= s(G) for H <= G with exp(H) = exp(G)",
                         {"subgroup": [fs[-2], k]}, sub.value_int)
        out.append(make_bound(Kind.LOWER, sub.value_int, exact_int=sub.value_int, provenance=sub.provenance + (step,)))
    if group.is_homocyclic():
        n = r
        lo, hi = harborth_bounds(k, n)
        out += [lo, hi]
        if _is_power_of_two(k):
            out.append(har2_exact(k.bit_length() - 1, n))
        elif _is_prime(k):
            out.append(upper_egz_prime(k, n, vp))
        odd = k
        while odd % 2 == 0:
            odd //= 2
        primes = sorted(_factorize(k))
        if k == 3:
            out.append(maincor2_bound(n))
        if len(primes) == 1 and odd == k and not _is_prime(k):
            p = primes[0]
            r_exp = round(math.log(k, p))
            for allow in (False, True):
                base = elementary_bound(p, n, vp, allow, options.exact)
                out.append(ppower_bound(p, r_exp, n, base=base))
        if odd > 1 and (odd != k or not _is_prime(k)):
            for allow in (False, True):
                out.append(composite_bound(k // odd, odd, n, verified_propd=vp, allow_conditional=allow))
    primes = sorted(_factorize(k))
    for allow in (False, True):
        per = {(p, i): elementary_bound(p, i, vp, allow, options.exact) for p in primes for i in range(1, r + 1)}
        out.append(egzupper_combine(fs, per))
    if group in options.exact:
        out.append(exhaustive_exact(group, options.exact[group]))
    if group in options.lower_witnesses:
        v = options.lower_witnesses[group]
        step = ProofStep("search_witness", "explicit zero-sum-free sequence of length s - 1", {"group": group.spec}, v)
        out.append(make_bound(Kind.LOWER, v, exact_int=v, provenance=(step,)))
    out.extend(options.known)
    # keep the first of any duplicates, in a stable order
    seen, uniq = set(), []
    for b in out:
        key = (b.kind, b.value_int, b.conditional_on, tuple(s.thm for s in b.provenance))
        if key not in seen:
            seen.add(key)
            uniq.append(b)
    return uniq


def best_bounds(group: AbelianGroup, options: BoundOptions = BoundOptions()) -> BoundReport:
    cands = candidate_bounds(group, options)
    lowers = [b for b in cands if b.kind in (Kind.LOWER, Kind.EXACT)]
    uppers = [b for b in cands if b.kind in (Kind.UPPER, Kind.EXACT)]
    unconditional = [b for b in uppers if not b.is_conditional]
    lower = pick_lower(lowers)
    cond_upper = pick_upper(uppers)
    upper = cond_upper if options.assume_propd else pick_upper(unconditional)
    if lower.value_int > upper.value_int:
        raise ArithmeticError(f"inconsistent bounds for {group}: {lower.value_int} > {upper.value_int}")
    return BoundReport(group, lower, upper, cond_upper, tuple(cands))
