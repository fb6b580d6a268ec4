"""Monochromatic subgraph counts under uniform random vertex colorings.

Exact moments, join censuses, the martingale decomposition of T - E[T], and
Monte Carlo normality diagnostics for the count T(H, G) of monochromatic
copies of a pattern H in a host G.
"""

from .coloring import Coloring, SeedSpec, monochromatic_count, sample_coloring
from .embed import Copy, CopyIndex, Pattern, enumerate_copies, pattern_from_spec
from .errors import CapacityError, MonoError, ParseError, UndefinedStatisticError, ValidationError
from .graph import Graph, generate, load_edge_list
from .joins import census, classify, count_2shared_tuples, count_good_tuples, is_2shared, is_good_join
from .moments import (
    brute_force_distribution,
    exact_fourth_moment,
    exact_variance,
    expected_T,
    mixed_central_moment,
    pair_covariance,
)
from .report import assemble_report, clt_ratio, fourth_gap
from .simulate import simulate

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "Coloring", "Copy", "CopyIndex", "Graph", "MonoError", "ParseError",
    "Pattern", "SeedSpec", "UndefinedStatisticError", "ValidationError", "assemble_report",
    "brute_force_distribution", "census", "classify", "clt_ratio", "count_2shared_tuples",
    "count_good_tuples", "enumerate_copies", "exact_fourth_moment", "exact_variance",
    "expected_T", "fourth_gap", "generate", "is_2shared", "is_good_join", "load_edge_list",
    "mixed_central_moment", "monochromatic_count", "pair_covariance", "pattern_from_spec",
    "sample_coloring", "simulate",
]
