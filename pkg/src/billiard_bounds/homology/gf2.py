"""GF(2) linear algebra on int-packed bit vectors."""

from __future__ import annotations

from typing import Iterable


def pack(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


def unpack(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank over GF(2) of a set of packed vectors.

    Each vector is reduced against the pivots found so far (keyed by highest
    set bit); a nonzero remainder becomes a new pivot.
    """
    pivots: dict[int, int] = {}
    for v in columns:
        while v:
            top = v.bit_length() - 1
            piv = pivots.get(top)
            if piv is None:
                pivots[top] = v
                break
            v ^= piv
    return len(pivots)


def gf2_rank_dense(rows) -> int:
    """Rank of a 0/1 matrix given as nested sequences (small-matrix oracle)."""
    return gf2_rank(pack(j for j, x in enumerate(row) if x % 2) for row in rows)
