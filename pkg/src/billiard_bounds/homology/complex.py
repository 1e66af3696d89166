"""Cellular GF(2) chain complexes of X^p, relative to the diagonal and/or
quotiented by the dihedral group, and their Betti numbers."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from ..bounds import necklace_count
from ..errors import BudgetExceeded, ChainComplexError, NonPrimeP
from ..bounds import is_prime
from .cells import (
    CellLabel,
    SphereBouquet,
    act,
    boundary,
    canonical,
    cell_count_estimate,
    cells_for_indices,
    dihedral_permutations,
    is_diagonal,
    label_dim,
    quotient_boundary,
)
from .gf2 import gf2_rank, pack, unpack

DEFAULT_BUDGET = 5_000_000

MODES = {
    "absolute+plain": (False, False),
    "absolute+quotient": (False, True),
    "relative+plain": (True, False),
    "relative+quotient": (True, True),
}


def parse_mode(mode: str) -> tuple[bool, bool]:
    """'relative+quotient' -> (relative, quotient). Either half may be omitted."""
    relative, quotient = False, False
    for part in mode.replace(" ", "").split("+"):
        if part == "relative":
            relative = True
        elif part == "quotient":
            quotient = True
        elif part not in ("absolute", "plain", ""):
            raise ValueError(f"unknown mode component {part!r}")
    return relative, quotient


def _check_p(p: int) -> None:
    if not is_prime(p) or p == 2:
        raise NonPrimeP(f"p={p} must be an odd prime")


def enumerate_cells(
    bouquet: SphereBouquet,
    p: int,
    relative: bool = False,
    quotient: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[CellLabel]:
    """Yield the cells of the requested complex in lexicographic order.

    In quotient mode each dihedral orbit is represented by its canonical
    (lexicographically least) label.
    """
    _check_p(p)
    estimate = cell_count_estimate(bouquet, p)
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)
    perms = dihedral_permutations(p)
    for idx in itertools.product(range(bouquet.B), repeat=p):
        if quotient:
            images = [tuple(idx[a] for a in g) for g in perms]
            if min(images) != idx:
                continue
            stabilizer = [g for g, im in zip(perms, images) if im == idx]
        for label in cells_for_indices(bouquet, idx):
            if relative and is_diagonal(label):
                continue
            if quotient and any(act(g, label) < label for g in stabilizer):
                continue
            yield label


@dataclass
class BettiResult:
    betti: list[int]
    total: int
    euler: int

    def to_dict(self) -> dict:
        return {"betti": self.betti, "total": self.total, "euler": self.euler}


@dataclass
class ChainComplexGF2:
    """Cells per dimension and the boundary ∂_d as, for each d-cell, the sorted
    row indices of its faces among the (d-1)-cells."""

    bouquet: SphereBouquet
    p: int
    relative: bool
    quotient: bool
    cells: dict[int, list[CellLabel]] = field(default_factory=dict)
    boundaries: dict[int, list[list[int]]] = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return ("relative" if self.relative else "absolute") + "+" + (
            "quotient" if self.quotient else "plain"
        )

    @property
    def top_dim(self) -> int:
        return max(self.cells, default=-1)

    def count(self, d: int) -> int:
        return len(self.cells.get(d, ()))

    def columns(self, d: int) -> list[int]:
        """∂_d as packed GF(2) column vectors."""
        return [pack(rows) for rows in self.boundaries.get(d, ())]

    def rank(self, d: int) -> int:
        return gf2_rank(self.columns(d))

    def check_boundary_squared(self) -> int:
        """Number of cells whose boundary of boundary is nonzero."""
        bad = 0
        for d in range(2, self.top_dim + 1):
            lower = self.columns(d - 1)
            for v in self.columns(d):
                acc = 0
                for r in unpack(v):
                    acc ^= lower[r]
                if acc:
                    bad += 1
        return bad

    def betti_numbers(self) -> BettiResult:
        ranks = {d: self.rank(d) for d in range(1, self.top_dim + 1)}
        betti = [
            self.count(d) - ranks.get(d, 0) - ranks.get(d + 1, 0)
            for d in range(self.top_dim + 1)
        ]
        euler = sum((-1) ** d * b for d, b in enumerate(betti))
        cell_euler = sum((-1) ** d * self.count(d) for d in range(self.top_dim + 1))
        if euler != cell_euler:
            raise ChainComplexError(f"Euler mismatch: {euler} vs {cell_euler}")
        return BettiResult(betti=betti, total=sum(betti), euler=euler)

    def to_text(self) -> str:
        """Plain-text listing: cells per dimension, then boundary pairs.

        Boundary blocks follow the MatrixMarket coordinate convention, 1-based
        (row = face index in dimension d-1, column = cell index in dimension d).
        """
        lines = [
            "% billiard_bounds chain complex v1",
            f"% bouquet {' '.join(map(str, self.bouquet.sphere_dims))}",
            f"% p {self.p} mode {self.mode}",
        ]
        for d in range(self.top_dim + 1):
            cells = self.cells.get(d, [])
            lines.append(f"cells {d} {len(cells)}")
            lines.extend(c.serialize() for c in cells)
        for d in range(1, self.top_dim + 1):
            pairs = [(r + 1, col + 1) for col, rows in enumerate(self.boundaries.get(d, ())) for r in rows]
            lines.append(f"boundary {d} {self.count(d - 1)} {self.count(d)} {len(pairs)}")
            lines.extend(f"{r} {c}" for r, c in pairs)
        return "\n".join(lines) + "\n"


def read_complex_text(text: str) -> tuple[dict[int, list[CellLabel]], dict[int, list[list[int]]]]:
    """Parse a listing produced by ``ChainComplexGF2.to_text``."""
    cells: dict[int, list[CellLabel]] = {}
    bnd: dict[int, list[list[int]]] = {}
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("%")]
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if head[0] == "cells":
            d, n = int(head[1]), int(head[2])
            cells[d] = [CellLabel.parse(ln) for ln in lines[i + 1 : i + 1 + n]]
            i += 1 + n
        elif head[0] == "boundary":
            d, ncols, nnz = int(head[1]), int(head[3]), int(head[4])
            cols: list[list[int]] = [[] for _ in range(ncols)]
            for ln in lines[i + 1 : i + 1 + nnz]:
                r, c = map(int, ln.split())
                cols[c - 1].append(r - 1)
            bnd[d] = cols
            i += 1 + nnz
        else:
            raise ValueError(f"unexpected line {lines[i]!r}")
    return cells, bnd


def build_complex(
    bouquet: SphereBouquet,
    p: int,
    relative: bool = True,
    quotient: bool = True,
    budget: int = DEFAULT_BUDGET,
    check: bool = True,
) -> ChainComplexGF2:
    """Assemble the chain complex.

    With ``check`` the build asserts ∂∂ = 0 and, in relative mode, that the
    boundary of every diagonal cell consists of diagonal cells only.
    """
    perms = dihedral_permutations(p)
    by_dim: dict[int, list[CellLabel]] = defaultdict(list)
    diagonal: list[CellLabel] = []
    for label in enumerate_cells(bouquet, p, relative=False, quotient=quotient, budget=budget):
        if relative and is_diagonal(label):
            if check:
                diagonal.append(label)
            continue
        by_dim[label_dim(label)].append(label)

    cx = ChainComplexGF2(bouquet=bouquet, p=p, relative=relative, quotient=quotient)
    face_fn = (lambda c: quotient_boundary(c, perms)) if quotient else boundary

    violations = 0
    for label in diagonal:
        if any(not is_diagonal(f) for f in face_fn(label)):
            violations += 1
    if violations:
        raise ChainComplexError(f"{violations} diagonal cells have off-diagonal faces")

    position = {d: {c: i for i, c in enumerate(cells)} for d, cells in by_dim.items()}
    for d in sorted(by_dim):
        cx.cells[d] = by_dim[d]
        if d == 0:
            continue
        lookup = position.get(d - 1, {})
        cols = []
        for label in by_dim[d]:
            rows = []
            for f in face_fn(label):
                r = lookup.get(f)
                if r is None:
                    if relative and is_diagonal(f):
                        continue
                    raise ChainComplexError(f"face {f} of {label} missing from complex")
                rows.append(r)
            cols.append(sorted(rows))
        cx.boundaries[d] = cols
    top = max(by_dim, default=-1)
    for d in range(top + 1):
        cx.cells.setdefault(d, [])
        if d:
            cx.boundaries.setdefault(d, [])
    if check:
        bad = cx.check_boundary_squared()
        if bad:
            raise ChainComplexError(f"boundary of boundary nonzero on {bad} cells")
    return cx


def betti_numbers(cx: ChainComplexGF2) -> BettiResult:
    return cx.betti_numbers()


def homology(
    bouquet: SphereBouquet,
    p: int,
    mode: str = "relative+quotient",
    budget: int = DEFAULT_BUDGET,
) -> BettiResult:
    relative, quotient = parse_mode(mode)
    return build_complex(bouquet, p, relative, quotient, budget=budget).betti_numbers()


@dataclass
class BouquetCheck:
    betti_sum: int
    lemma_floor: int
    necklace_orbits: int
    sphere_terms: int
    betti: list[int]

    @property
    def passed(self) -> bool:
        return self.betti_sum >= self.lemma_floor

    def to_dict(self) -> dict:
        return {
            "betti_sum": self.betti_sum,
            "lemma_floor": self.lemma_floor,
            "necklace_orbits": self.necklace_orbits,
            "sphere_terms": self.sphere_terms,
            "betti": self.betti,
            "pass": self.passed,
        }


def bouquet_bound_check(bouquet: SphereBouquet, p: int, budget: int = DEFAULT_BUDGET) -> BouquetCheck:
    """Compare the relative quotient Betti sum with the necklace + sphere floor."""
    res = homology(bouquet, p, "relative+quotient", budget=budget)
    orbits = necklace_count(bouquet.B, p)["orbits"]
    spheres = sum(q * (p - 1) for q in bouquet.sphere_dims)
    return BouquetCheck(
        betti_sum=res.total,
        lemma_floor=necklace_free_floor(bouquet, p),
        necklace_orbits=orbits,
        sphere_terms=spheres,
        betti=res.betti,
    )


def necklace_free_floor(bouquet: SphereBouquet, p: int) -> int:
    """Necklace orbits plus sum q_j (p-1): the floor compared in bouquet_bound_check."""
    return necklace_count(bouquet.B, p)["orbits"] + sum(q * (p - 1) for q in bouquet.sphere_dims)
