"""Adversary lower bounds for explicitly enumerated oracle problems.

The package builds additive, hybrid and multiplicative adversary matrices
for finite oracle problems (classical functions and quantum state
generation), exploits permutation symmetries to reduce progress norms to
small per-irrep blocks, and cross-checks every identity against dense
linear algebra and statevector simulation.
"""

from advbound.config import DEFAULT_SEED
from advbound.problems import (
    OracleProblem,
    build_index_erasure,
    build_search,
    load_problem,
)
from advbound.bounds import (
    AdversaryMatrix,
    BoundReport,
    additive_bound,
    hybrid_bound,
    multiplicative_bound,
    search_closed_forms,
)

__all__ = [
    "OracleProblem",
    "build_search",
    "build_index_erasure",
    "load_problem",
    "AdversaryMatrix",
    "BoundReport",
    "additive_bound",
    "hybrid_bound",
    "multiplicative_bound",
    "search_closed_forms",
    "DEFAULT_SEED",
]

__version__ = "0.1.0"
