"""Cell labels for the dihedrally symmetric decomposition of X^p.

X is a bouquet of spheres. The open cell X_j of the j-th sphere is an open
cube (0,1)^q whose boundary is collapsed to the basepoint X_0. A cell of X^p
is given by

* an index tuple (i_1..i_p), 0 meaning the basepoint, and
* for every sphere j and coordinate axis c, a weak order (total order with
  ties) of the c-th coordinates of all positions carrying index j.

A weak order is stored as a rank surjection onto 0..r-1, so a label is the
pair ``(indices, ranks)`` with ``ranks[a]`` the per-axis rank tuple of
position ``a`` (empty for the basepoint). Cell dimension is the total number
of tie classes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

Ranks = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SphereBouquet:
    """Wedge of spheres of the given dimensions (basepoint excluded)."""

    sphere_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sphere_dims", tuple(int(q) for q in self.sphere_dims))
        if not self.sphere_dims:
            raise ValueError("bouquet needs at least one sphere")
        if any(q < 1 for q in self.sphere_dims):
            raise ValueError("sphere dimensions must be >= 1")

    @property
    def B(self) -> int:
        return 1 + len(self.sphere_dims)

    def dim_of(self, j: int) -> int:
        return 0 if j == 0 else self.sphere_dims[j - 1]

    @classmethod
    def from_betti(cls, k) -> "SphereBouquet":
        """Bouquet S^m v (k_{m-1} copies of S^{m-1}) v ... v (k_1 copies of S^1)."""
        m = len(k) - 1
        dims = [m]
        for i in range(m - 1, 0, -1):
            dims.extend([i] * k[i])
        return cls(tuple(dims))


class CellLabel(tuple):
    """``(indices, ranks)`` pair identifying one cell; compares as a tuple."""

    __slots__ = ()

    def __new__(cls, indices, ranks):
        return tuple.__new__(cls, (tuple(indices), tuple(tuple(r) for r in ranks)))

    @property
    def indices(self) -> tuple[int, ...]:
        return self[0]

    @property
    def ranks(self) -> Ranks:
        return self[1]

    @property
    def p(self) -> int:
        return len(self[0])

    @property
    def dim(self) -> int:
        return label_dim(self)

    @property
    def run_structure(self) -> list[tuple[int, tuple[int, ...]]]:
        """Maximal cyclic blocks of equal nonzero index as (index, positions)."""
        idx = self[0]
        p = len(idx)
        if all(i == idx[0] for i in idx):
            return [(idx[0], tuple(range(p)))] if idx[0] else []
        start = next(a for a in range(p) if idx[a] != idx[a - 1])
        runs = []
        a = start
        for _ in range(p):
            if idx[a] != idx[a - 1] or not runs:
                runs.append((idx[a], [a]))
            else:
                runs[-1][1].append(a)
            a = (a + 1) % p
        return [(j, tuple(pos)) for j, pos in runs if j]

    @property
    def order_patterns(self) -> dict[tuple[int, int], tuple[tuple[int, ...], ...]]:
        """Ordered set partition of positions per (sphere, axis)."""
        out: dict[tuple[int, int], list[list[int]]] = {}
        for a, (j, rk) in enumerate(zip(*self)):
            for c, v in enumerate(rk):
                classes = out.setdefault((j, c), [])
                while len(classes) <= v:
                    classes.append([])
                classes[v].append(a)
        return {key: tuple(tuple(cl) for cl in classes) for key, classes in out.items()}

    def serialize(self) -> str:
        parts = []
        for j, rk in zip(*self):
            parts.append(f"{j}" if j == 0 else f"{j}:" + ",".join(map(str, rk)))
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "CellLabel":
        idx, ranks = [], []
        for tok in text.split():
            if ":" in tok:
                j, rk = tok.split(":")
                idx.append(int(j))
                ranks.append(tuple(int(v) for v in rk.split(",")))
            else:
                idx.append(int(tok))
                ranks.append(())
        return cls(idx, ranks)


def label_dim(label) -> int:
    idx, ranks = label
    tops: dict[tuple[int, int], int] = {}
    for j, rk in zip(idx, ranks):
        for c, v in enumerate(rk):
            key = (j, c)
            if tops.get(key, -1) < v:
                tops[key] = v
    return sum(v + 1 for v in tops.values())


@lru_cache(maxsize=None)
def fubini(n: int) -> int:
    """Number of weak orders of n labelled items."""
    if n == 0:
        return 1
    return sum(math.comb(n, i) * fubini(n - i) for i in range(1, n + 1))


@lru_cache(maxsize=None)
def weak_orders(n: int) -> tuple[tuple[int, ...], ...]:
    """All weak orders of n items as rank surjections onto 0..r-1."""
    if n == 0:
        return ((),)
    out = []
    for r in range(1, n + 1):
        for f in itertools.product(range(r), repeat=n):
            if len(set(f)) == r:
                out.append(f)
    return tuple(out)


def dihedral_permutations(p: int) -> list[tuple[int, ...]]:
    """Position maps: image[a] = source[perm[a]] for the 2p dihedral elements."""
    perms = []
    for s in range(p):
        rot = tuple((a + s) % p for a in range(p))
        perms.append(rot)
        perms.append(rot[::-1])
    return perms


def act(perm, label):
    idx, ranks = label
    return (tuple(idx[a] for a in perm), tuple(ranks[a] for a in perm))


def canonical(label, perms) -> CellLabel:
    """Lexicographically smallest dihedral image; the index tuple compares first."""
    best = min(act(g, label) for g in perms)
    return CellLabel(*best)


def is_diagonal(label) -> bool:
    """True iff some cyclically consecutive pair of positions coincides.

    Two positions coincide when both are the basepoint, or they carry the
    same sphere and are tied in every coordinate.
    """
    idx, ranks = label
    p = len(idx)
    return any(idx[a] == idx[a - 1] and ranks[a] == ranks[a - 1] for a in range(p))


def cell_count_estimate(bouquet: SphereBouquet, p: int) -> int:
    """Exact number of cells of X^p, via counts of positions per sphere."""
    total = 0
    B = bouquet.B
    for counts in _compositions(p, B):
        ways = math.factorial(p)
        for c in counts:
            ways //= math.factorial(c)
        prod = 1
        for j in range(1, B):
            prod *= fubini(counts[j]) ** bouquet.dim_of(j)
        total += ways * prod
    return total


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def cells_for_indices(bouquet: SphereBouquet, indices: tuple[int, ...]) -> Iterator[CellLabel]:
    """All cells whose index tuple is ``indices``."""
    p = len(indices)
    groups = []
    for j in sorted(set(indices) - {0}):
        pos = [a for a in range(p) if indices[a] == j]
        q = bouquet.dim_of(j)
        groups.append((pos, itertools.product(weak_orders(len(pos)), repeat=q)))
    pos_lists = [g[0] for g in groups]
    choices = [list(g[1]) for g in groups]
    for combo in itertools.product(*choices):
        ranks: list[tuple[int, ...]] = [()] * p
        for pos, axes in zip(pos_lists, combo):
            for n, a in enumerate(pos):
                ranks[a] = tuple(axis[n] for axis in axes)
        yield CellLabel(indices, ranks)


def boundary(label) -> list[CellLabel]:
    """Codimension-one faces of a cell with odd incidence, sorted.

    Merge faces identify two adjacent tie classes of one axis. Escape faces
    send the minimum class of an axis to 0 or its maximum class to 1, i.e.
    those positions fall onto the basepoint; such a face only counts when it
    maps onto a cell of one dimension less, which fails exactly when some
    other axis of the same sphere has a tie class made only of escaping
    positions. An axis with a single class escapes at both ends onto the same
    face, which cancels mod 2.
    """
    idx, ranks = label
    p = len(idx)
    faces: Counter = Counter()
    for j in set(idx) - {0}:
        pos = [a for a in range(p) if idx[a] == j]
        q = len(ranks[pos[0]])
        tops = [max(ranks[a][c] for a in pos) + 1 for c in range(q)]
        for c in range(q):
            r = tops[c]
            for s in range(r - 1):
                new = list(ranks)
                for a in pos:
                    if ranks[a][c] > s:
                        rk = list(ranks[a])
                        rk[c] -= 1
                        new[a] = tuple(rk)
                faces[(idx, tuple(new))] += 1
            if r == 1:
                continue
            for end in (0, r - 1):
                escaping = [a for a in pos if ranks[a][c] == end]
                staying = [a for a in pos if ranks[a][c] != end]
                if any(
                    len({ranks[a][c2] for a in staying}) < tops[c2]
                    for c2 in range(q)
                    if c2 != c
                ):
                    continue
                new_idx = list(idx)
                new = list(ranks)
                for a in escaping:
                    new_idx[a] = 0
                    new[a] = ()
                if end == 0:
                    for a in staying:
                        rk = list(ranks[a])
                        rk[c] -= 1
                        new[a] = tuple(rk)
                faces[(tuple(new_idx), tuple(new))] += 1
    return sorted(CellLabel(*f) for f, n in faces.items() if n % 2)


def quotient_boundary(label, perms) -> list[CellLabel]:
    """Boundary of an orbit: faces mapped to canonical orbits, summed mod 2."""
    counts = Counter(canonical(f, perms) for f in boundary(label))
    return sorted(f for f, n in counts.items() if n % 2)
