import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zslab.groups import (
    AbelianGroup,
    ParseError,
    SumReachTable,
    ZSequence,
    abelian_groups,
    has_zero_sum_subsequence,
    incremental_extend,
    invariant_factors,
    naive_has_zero_sum_subsequence,
    parse_group,
)

from conftest import group_and_sequence


@pytest.mark.parametrize("spec, factors", [
    ("3^2", (3, 3)),
    ("2x4x4", (2, 4, 4)),
    ("9", (9,)),
    ("3x2", (6,)),
    ("2x3^2", (3, 6)),
    ("4x6", (2, 12)),
    (" 2 x 2 ", (2, 2)),
])
def test_parse_group(spec, factors):
    assert parse_group(spec).invariant_factors == factors


@pytest.mark.parametrize("bad", ["", "x3", "3x", "3^", "a", "1", "3x1", "0^2", "3^^2", "-3"])
def test_parse_group_rejects(bad):
    with pytest.raises(ParseError):
        parse_group(bad)


def _element_order_profile(G: AbelianGroup):
    return sorted(G.element_order(i) for i in range(G.order))


def test_crt_regrouping_preserves_isomorphism_type():
    # Z_3 x Z_2 is cyclic: it has an element of order 6
    G = parse_group("3x2")
    direct = [(a, b) for a in range(3) for b in range(2)]
    orders = sorted(np.lcm(3 // np.gcd(a, 3), 2 // np.gcd(b, 2)) for a, b in direct)
    assert orders == _element_order_profile(G)


def test_invariant_factors_chain():
    assert invariant_factors([4, 6, 10]) == (2, 2, 60)
    assert invariant_factors([]) == ()


def test_group_basics():
    G = parse_group("2x4")
    assert (G.order, G.exponent, G.rank, G.spec) == (8, 4, 2, "2x4")
    assert G.add((1, 3), (1, 2)) == (0, 1)
    assert G.scale(3, (1, 1)) == (1, 3)
    assert parse_group("4^2").spec == "4^2"
    assert not G.is_homocyclic()
    assert [i for i in range(G.order) if G.coords(i) == (1, 2)] == [G.index((1, 2))]


def test_trivial_group():
    T = AbelianGroup(())
    assert (T.order, T.exponent, T.spec) == (1, 1, "1")
    assert has_zero_sum_subsequence(ZSequence(T, (0,)), 1)


def test_element_indexing_is_lex():
    G = parse_group("3x6")
    assert G.elements == sorted(G.elements)
    assert all(G.index(c) == i for i, c in enumerate(G.elements))


def test_abelian_group_counts():
    assert [G.spec for G in abelian_groups(16)] == ["16", "2x8", "4^2", "2^2x4", "2^4"]
    assert sum(len(abelian_groups(n)) for n in range(2, 33)) == 54


def test_has_zero_sum_examples():
    z3 = parse_group("3")
    assert has_zero_sum_subsequence(ZSequence.from_elements(z3, [(0,), (1,), (2,)]), 3)
    assert not has_zero_sum_subsequence(ZSequence.from_elements(z3, [(0,), (0,), (1,), (1,)]), 3)
    z33 = parse_group("3^2")
    seq = ZSequence.from_elements(z33, [(0, 0), (0, 0), (0, 1), (0, 1), (1, 0), (1, 0), (1, 1), (1, 1)])
    assert not has_zero_sum_subsequence(seq, 3)
    assert has_zero_sum_subsequence(seq.append((2, 2)), 3)


def test_witness_is_genuine():
    G = parse_group("3^2")
    seq = ZSequence.from_elements(G, [(0, 1), (1, 1), (2, 2), (1, 0), (2, 1)])
    found, T = has_zero_sum_subsequence(seq, 3, witness=True)
    assert found and len(T) == 3 and T.is_zero_sum() and T.divides(seq)
    assert has_zero_sum_subsequence(ZSequence(G, ()), 3, witness=True) == (False, None)


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        has_zero_sum_subsequence(ZSequence(parse_group("3"), (0,)), 0)


def test_incremental_extend_examples():
    G = parse_group("3")
    t = SumReachTable.empty(G, 3)
    assert t.reachable(0, 0) and not t.reachable(1, 0)
    t1 = incremental_extend(t, (1,))
    assert t1.reachable(1, (1,)) and not t.reachable(1, (1,))  # copy-on-extend
    t2 = incremental_extend(t1, 1)
    assert t2.reachable(2, (2,))
    assert not t2.has_zero_sum
    assert incremental_extend(t2, (1,)).has_zero_sum


def test_reach_table_is_read_only():
    t = SumReachTable.empty(parse_group("4"), 4)
    with pytest.raises(ValueError):
        t.reach[1, 1] = True


@settings(max_examples=400)
@given(group_and_sequence(), st.integers(1, 8))
def test_oracle_equivalence(seq, k):
    assert has_zero_sum_subsequence(seq, k) == naive_has_zero_sum_subsequence(seq, k)


@settings(max_examples=200)
@given(group_and_sequence())
def test_witness_sums_to_zero(seq):
    k = seq.group.exponent
    found, T = has_zero_sum_subsequence(seq, k, witness=True)
    assert found == naive_has_zero_sum_subsequence(seq, k)
    if found:
        assert len(T) == k and T.is_zero_sum() and T.divides(seq)


@settings(max_examples=200)
@given(group_and_sequence(), st.data())
def test_multiplicity_k_forces_zero_sum(seq, data):
    k = seq.group.exponent * data.draw(st.integers(1, 2))
    g = data.draw(st.integers(0, seq.group.order - 1))
    padded = ZSequence(seq.group, seq.elems + (g,) * k)
    assert has_zero_sum_subsequence(padded, k)


@settings(max_examples=200)
@given(group_and_sequence(), st.integers(1, 6))
def test_incremental_matches_scratch(seq, k):
    table = SumReachTable.empty(seq.group, k)
    for g in seq.elems:
        table = incremental_extend(table, g)
    direct = np.zeros((k + 1, seq.group.order), dtype=bool)
    for j in range(k + 1):
        for combo in set(itertools.combinations(seq.elems, j)):
            s = 0
            for g in combo:
                s = seq.group.add_table[s, g]
            direct[j, s] = True
    assert np.array_equal(table.reach, direct)
    assert table == SumReachTable.from_sequence(seq, k)


@given(group_and_sequence())
def test_json_round_trip(seq):
    assert ZSequence.from_json(seq.to_json()) == seq
