"""Sets in Z_m whose pairwise differences avoid the nonzero squares.

Exact search (branch-and-bound maximum clique), explicit constructions,
closed-form upper bounds and statistics of prime divisors ``= 3 mod 4``.
"""

from .bounds import BoundReport, bound_report, m_epsilon_member, theorem11_bound
from .constructions import ConstructionOutput, best_construction, cohen_set, product_set, two_prime_set
from .density import DensityReport, ParamGrid, build_grid, density_scan, tv_distance_empirical
from .kernels import BACKEND
from .numtheory import Factorization, factorize
from .residues import AvoidanceGraph, avoidance_graph, is_avoiding, residue_set
from .search import ResultCache, SearchResult, max_avoiding, scan_table

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AvoidanceGraph",
    "BoundReport",
    "ConstructionOutput",
    "DensityReport",
    "Factorization",
    "ParamGrid",
    "ResultCache",
    "SearchResult",
    "avoidance_graph",
    "best_construction",
    "bound_report",
    "build_grid",
    "cohen_set",
    "density_scan",
    "factorize",
    "is_avoiding",
    "m_epsilon_member",
    "max_avoiding",
    "product_set",
    "residue_set",
    "scan_table",
    "theorem11_bound",
    "tv_distance_empirical",
    "two_prime_set",
]
