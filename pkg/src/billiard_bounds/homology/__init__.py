"""Z/2 cellular homology of dihedral quotients of powers of sphere bouquets."""

from .cells import (
    CellLabel,
    SphereBouquet,
    boundary,
    canonical,
    cell_count_estimate,
    dihedral_permutations,
    fubini,
    is_diagonal,
    quotient_boundary,
    weak_orders,
)
from .complex import (
    DEFAULT_BUDGET,
    BettiResult,
    BouquetCheck,
    ChainComplexGF2,
    betti_numbers,
    bouquet_bound_check,
    build_complex,
    enumerate_cells,
    homology,
    necklace_free_floor,
    parse_mode,
    read_complex_text,
)
from .gf2 import gf2_rank

__all__ = [
    "CellLabel",
    "SphereBouquet",
    "boundary",
    "canonical",
    "cell_count_estimate",
    "dihedral_permutations",
    "fubini",
    "is_diagonal",
    "quotient_boundary",
    "weak_orders",
    "DEFAULT_BUDGET",
    "BettiResult",
    "BouquetCheck",
    "ChainComplexGF2",
    "betti_numbers",
    "bouquet_bound_check",
    "build_complex",
    "enumerate_cells",
    "homology",
    "necklace_free_floor",
    "parse_mode",
    "read_complex_text",
    "gf2_rank",
]
