import mpmath
import pytest

from zslab.bounds import (
    BoundOptions,
    DomainError,
    Kind,
    KindError,
    MissingBound,
    best_bounds,
    candidate_bounds,
    composite_bound,
    egzupper_combine,
    exp_upper_step,
    har2_exact,
    harborth_bounds,
    maincor2_bound,
    make_bound,
    ppower_bound,
    property_d,
    rank2_exact,
    trivial_exact,
    upper_egz_prime,
)
from zslab.groups import AbelianGroup, abelian_groups, parse_group

EXACT_S = {"3^2": 9, "2^3": 9, "2^4": 17, "4^2": 13, "2x4": 9, "2^2x4": 11, "2x8": 17, "3^3": 19, "2x4^2": 17}


def test_rank2_examples():
    assert rank2_exact(1, 5).value_int == 9
    assert rank2_exact(3, 3).value_int == 9
    assert rank2_exact(2, 4).value_int == 9
    assert rank2_exact(1, 8).value_int == har2_exact(3, 1).value_int == 15
    assert rank2_exact(3, 3).kind is Kind.EXACT
    with pytest.raises(DomainError):
        rank2_exact(2, 5)


def test_harborth_examples():
    lo, hi = harborth_bounds(3, 2)
    assert (lo.value_int, hi.value_int) == (9, 19)
    assert [b.value_int for b in harborth_bounds(5, 3)] == [33, 501]
    for n in range(1, 6):
        lo, hi = harborth_bounds(2, n)
        assert lo.value_int == hi.value_int == 2**n + 1
    assert lo.kind is Kind.LOWER and hi.kind is Kind.UPPER


def test_har2_examples():
    assert har2_exact(2, 2).value_int == 13
    assert har2_exact(1, 3).value_int == 9


def test_upper_egz_prime_examples():
    b = upper_egz_prime(3, 2)
    assert abs(b.value_real - mpmath.mpf("49.31")) < 0.02 and b.value_int == 49
    assert b.conditional_on == (property_d(3, 2),) == ("PROPERTY_D(3,2)",)
    assert upper_egz_prime(3, 1).value_int == 18
    b5 = upper_egz_prime(5, 1)
    with mpmath.workdps(30):
        eps = mpmath.mpf(9) / (50 * mpmath.log(5))
        assert abs(b5.value_real - (4 * mpmath.power(5, 2 - eps) + 1)) < 1e-20
    assert abs(eps - mpmath.mpf("0.111840")) < 1e-6
    with pytest.raises(DomainError):
        upper_egz_prime(2, 3)
    with pytest.raises(DomainError):
        upper_egz_prime(9, 1)


def test_property_d_discharge():
    assert not upper_egz_prime(3, 2, verified_propd={(3, 2)}).is_conditional
    assert upper_egz_prime(3, 3, verified_propd={(3, 2)}).is_conditional


def test_maincor2_examples():
    assert abs(maincor2_bound(1).value_real - mpmath.mpf("5.53")) < 1e-9
    assert maincor2_bound(2).value_int == 15
    assert maincor2_bound(4).value_int == 116
    assert not maincor2_bound(4).is_conditional


def test_exp_upper_step_examples():
    assert exp_upper_step(3, rank2_exact(1, 3), rank2_exact(1, 3)).value_int == 17
    assert exp_upper_step(3, rank2_exact(1, 2), rank2_exact(1, 3)).value_int == 11
    assert exp_upper_step(5, trivial_exact(), rank2_exact(1, 7)).value_int == 13
    step = exp_upper_step(3, rank2_exact(1, 3), rank2_exact(1, 3))
    assert step.kind is Kind.UPPER and step.source == "quotient_step"
    assert [s.thm for s in step.provenance] == ["rank2_exact", "rank2_exact", "quotient_step"]


def test_exp_upper_step_rejects_lower():
    lo, _ = harborth_bounds(3, 1)
    with pytest.raises(KindError):
        exp_upper_step(3, lo, rank2_exact(1, 3))
    with pytest.raises(KindError):
        exp_upper_step(3, rank2_exact(1, 3), lo)


def test_conditions_propagate_through_steps():
    b = exp_upper_step(3, upper_egz_prime(3, 1), upper_egz_prime(3, 1))
    assert b.conditional_on == ("PROPERTY_D(3,1)",)
    assert b.value_int == 3 * 17 + 18


def test_ppower_examples():
    assert ppower_bound(3, 2, 1, base=rank2_exact(1, 3)).value_int == 17
    passthrough = ppower_bound(3, 1, 2)
    assert passthrough.value_int == upper_egz_prime(3, 2).value_int == 49
    assert passthrough.conditional_on == ("PROPERTY_D(3,2)",)
    assert "d_eff" in passthrough.rates
    for p, n in [(3, 3), (5, 2)]:
        assert ppower_bound(p, 1, n).value_real == upper_egz_prime(p, n).value_real
    chain = ppower_bound(3, 4, 2)
    assert sum(s.thm == "quotient_step" for s in chain.provenance) == 3


def test_ppower_induction_identity():
    for p in (3, 5, 7):
        for n in range(1, 7):
            base = upper_egz_prime(p, n)
            B_n = base.value_int
            for r in range(1, 5):
                U = ppower_bound(p, r, n)
                assert U.value_int <= B_n * (p**r - 1) // (p - 1)
                with mpmath.workdps(30):
                    assert U.rates["d_eff"] <= mpmath.root(B_n, n) * (1 + mpmath.mpf(10) ** -20)


def test_egzupper_examples():
    exact = {(3, 1): rank2_exact(1, 3), (3, 2): rank2_exact(3, 3)}
    b = egzupper_combine((3, 3), exact)
    assert b.value_int == 9 and b.rates["c"] == (2, 4)
    two = {(2, 1): rank2_exact(1, 2), (2, 2): rank2_exact(2, 2)}
    assert egzupper_combine((2, 4), two).value_int == 9
    for m in (3, 9, 27):
        assert egzupper_combine((m,), {(3, 1): rank2_exact(1, 3)}).value_int == 2 * m - 1
    with pytest.raises(MissingBound):
        egzupper_combine((6,), {(3, 1): rank2_exact(1, 3)})
    with pytest.raises(KindError):
        egzupper_combine((3,), {(3, 1): harborth_bounds(3, 1)[0]})


def test_composite_examples():
    b = composite_bound(2, 3, 1)
    assert b.value_int == 11 and not b.is_conditional
    assert composite_bound(1, 5, 1).value_int == 9
    assert composite_bound(1, 3, 2).value_int == 9
    b2 = composite_bound(2, 3, 2)
    assert b2.value_int >= 21  # never below the known lower bound
    with pytest.raises(DomainError):
        composite_bound(3, 3, 1)
    with pytest.raises(DomainError):
        composite_bound(2, 4, 1)


def test_composite_matches_closed_form():
    for m in (1, 2, 4):
        for k in (3, 5, 9, 15):
            for n in range(1, 5):
                for allow in (False, True):
                    b = composite_bound(m, k, n, allow_conditional=allow)
                    assert b.value_int == b.rates["closed_form"] == 2**n * (m - 1) * k + b.rates["C"] * (k - 1) + 1


def test_composite_conditions():
    b = composite_bound(2, 5, 3)
    assert all(c.startswith("PROPERTY_D(5,") for c in b.conditional_on) or not b.is_conditional
    plain = composite_bound(2, 5, 3, allow_conditional=False)
    assert not plain.is_conditional and plain.value_int >= b.value_int


def test_make_bound_rounding():
    assert make_bound(Kind.UPPER, mpmath.mpf("17.9")).value_int == 17
    assert make_bound(Kind.LOWER, mpmath.mpf("17.1")).value_int == 18
    assert make_bound(Kind.UPPER, mpmath.mpf(17) - mpmath.mpf(10) ** -45).value_int == 17
    with pytest.raises(ValueError):
        make_bound(Kind.EXACT, 3, exact_int=3, conditional_on=["PROPERTY_D(3,1)"])


@pytest.mark.parametrize("spec, interval", [("3^2", (9, 9)), ("4^2", (13, 13)), ("6", (11, 11)), ("9", (17, 17))])
def test_best_bounds_examples(spec, interval):
    rep = best_bounds(parse_group(spec))
    assert (rep.lower.value_int, rep.upper.value_int) == interval
    assert rep.is_exact


def test_best_bounds_z9_chain():
    rep = best_bounds(parse_group("9"))
    chains = [b for b in rep.candidates if b.source == "quotient_step"]
    assert any(b.value_int == 17 and not b.is_conditional for b in chains)


def test_conditional_upper_reported_separately():
    G = parse_group("3^4")
    rep = best_bounds(G)
    assert not rep.upper.is_conditional
    assert rep.upper.value_int == 116
    assumed = best_bounds(G, BoundOptions(assume_propd=True))
    assert assumed.upper.value_int <= rep.upper.value_int
    assert rep.conditional_upper.value_int == assumed.upper.value_int


def test_unconditional_upper_never_depends_on_property_d():
    for order in range(2, 33):
        for G in abelian_groups(order):
            assert not best_bounds(G).upper.conditional_on


@pytest.mark.parametrize("spec", ["3^2", "2x4", "9", "3^4", "5^3", "2x6", "15", "7^2", "2^2x4"])
def test_aggregation_idempotent(spec):
    G = parse_group(spec)
    rep = best_bounds(G)
    again = best_bounds(G, BoundOptions(known=rep.candidates))
    assert again.lower == rep.lower and again.upper == rep.upper
    assert again.conditional_upper == rep.conditional_upper
    assert len(again.candidates) == len(rep.candidates)


def _known_exact():
    out = {}
    for order in range(2, 33):
        for G in abelian_groups(order):
            if G.rank <= 2 and G.exponent <= 9:
                fs = G.invariant_factors
                out[G] = 2 * (fs[0] if G.rank == 2 else 1) + 2 * fs[-1] - 3
    for spec, v in EXACT_S.items():
        out[parse_group(spec)] = v
    return out


def test_sandwich_on_exact_groups():
    for G, s in _known_exact().items():
        for b in candidate_bounds(G, BoundOptions(exact={G: s})):
            if b.kind in (Kind.UPPER, Kind.EXACT):
                assert b.value_int >= s, (G.spec, b.source)
            if b.kind in (Kind.LOWER, Kind.EXACT):
                assert b.value_int <= s, (G.spec, b.source)


def test_inconsistent_inputs_are_detected():
    G = parse_group("3^2")
    with pytest.raises(ArithmeticError):
        best_bounds(G, BoundOptions(lower_witnesses={G: 40}))


def test_trivial_group_bounds():
    rep = best_bounds(AbelianGroup(()))
    assert rep.lower.value_int == rep.upper.value_int == 1


def test_json_values_round_trip():
    d = best_bounds(parse_group("3^3")).to_json()
    assert d["interval"][0] <= d["interval"][1]
    for c in d["candidates"]:
        assert mpmath.mpf(c["value_real"]) >= 0
        assert all({"thm", "quote", "inputs", "value"} <= set(s) for s in c["provenance"])
