"""Exact and bounded Erdős–Ginzburg–Ziv constants for small finite abelian groups."""

from .bounds import BoundOptions, BoundReport, BoundResult, Kind, best_bounds
from .groups import AbelianGroup, SumReachTable, ZSequence, has_zero_sum_subsequence, incremental_extend, parse_group
from .polymethod import PetrovInstance, dim_exact, hoeffding_dim_bound, petrov_max_search, petrov_verify
from .propd import PropertyDReport, check_property_d, is_kth_power_form
from .search import ExactResult, SearchBudget, Status, enumerate_extremal, exact_g, exact_s
from .symmetry import canonical_form

__version__ = "0.1.0"
