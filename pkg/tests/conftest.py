import itertools

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from zslab.groups import AbelianGroup, ZSequence, abelian_groups

settings.register_profile("default", deadline=None, print_blob=True)
settings.load_profile("default")

SMALL_GROUPS = [G for order in range(2, 17) for G in abelian_groups(order)]


@st.composite
def group_and_sequence(draw, max_len=12, groups=SMALL_GROUPS):
    G = draw(st.sampled_from(groups))
    elems = draw(st.lists(st.integers(0, G.order - 1), max_size=max_len))
    return ZSequence(G, tuple(elems))


def all_multisets(G: AbelianGroup, length: int):
    for combo in itertools.combinations_with_replacement(range(G.order), length):
        yield ZSequence(G, combo)


@pytest.fixture
def z3():
    return AbelianGroup((3,))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
