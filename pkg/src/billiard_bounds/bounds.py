"""Closed-form lower bounds on the number of periodic billiard trajectories.

Everything here is exact integer / rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    DomainTooLarge,
    DualityViolation,
    InvalidBetti,
    NonPrimeP,
    PTooSmall,
)

BRUTE_FORCE_LIMIT = 10**8


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def _require_odd_prime(p: int) -> None:
    if not is_prime(p) or p == 2:
        raise NonPrimeP(f"p={p} is not an odd prime")


@dataclass(frozen=True)
class BettiVector:
    """Mod-2 Betti numbers (k_0, ..., k_m) of a closed connected m-manifold."""

    m: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        if self.m < 1:
            raise InvalidBetti(f"m must be >= 1, got {self.m}")
        if len(self.k) != self.m + 1:
            raise InvalidBetti(f"expected {self.m + 1} entries, got {len(self.k)}")
        if any(v < 0 for v in self.k):
            raise InvalidBetti("Betti numbers must be nonnegative")
        if self.k[0] != 1 or self.k[-1] != 1:
            raise InvalidBetti("k_0 and k_m must both equal 1")

    @classmethod
    def of(cls, k) -> "BettiVector":
        k = tuple(k)
        return cls(len(k) - 1, k)

    def is_symmetric(self) -> bool:
        return all(self.k[i] == self.k[self.m - i] for i in range(self.m + 1))

    @property
    def B(self) -> int:
        return total_B(self)


def total_B(b: BettiVector) -> int:
    return sum(b.k)


def poincare_weighted_sum(b: BettiVector) -> int:
    """Return sum i*k_i, checking it equals m*B/2."""
    if not b.is_symmetric():
        raise DualityViolation(f"Betti vector {b.k} is not duality-symmetric")
    s = sum(i * ki for i, ki in enumerate(b.k))
    mB = b.m * total_B(b)
    assert mB % 2 == 0 and 2 * s == mB, (s, mB)
    return s


def theorem_bound(m: int, B: int, p: int) -> int:
    """Lower bound on closed p-periodic trajectories for prime p > 3.

    (B-1)((B-1)^(p-1) - 1) / (2p) + (m*B/2)(p-1)
    """
    if not is_prime(p):
        raise NonPrimeP(f"p={p} is not prime")
    if p <= 3:
        raise PTooSmall(f"p={p}: use small_period_bounds for p <= 3")
    if B < 2:
        raise InvalidBetti(f"B must be >= 2, got {B}")
    if (m * B) % 2:
        raise InvalidBetti(f"m*B = {m * B} must be even")
    necklaces = (B - 1) * ((B - 1) ** (p - 1) - 1)
    first, rem = divmod(necklaces, 2 * p)
    assert rem == 0, "necklace term must be divisible by 2p"
    return first + (m * B // 2) * (p - 1)


def small_period_bounds(m: int, B: int) -> dict[str, Fraction]:
    """Strengthened bounds for periods 2 and 3, as exact rationals."""
    if B < 2 or m < 1:
        raise InvalidBetti(f"need B >= 2 and m >= 1, got m={m}, B={B}")
    p2 = Fraction(B * B + (m - 1) * B, 2)
    p3 = Fraction(B**3 + 3 * (m - 1) * B * B + 2 * B, 6)
    return {"p2": p2, "p3": p3}


def birkhoff_phi(k: int) -> int:
    """Euler's totient: how many of 1..k are coprime to k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sum(1 for j in range(1, k + 1) if math.gcd(j, k) == 1)


def necklace_recursion(B: int, p: int) -> int:
    """N(p) = B(B-1)^(p-1) - N(p-1), unrolled from N(1) = 0."""
    n = 0
    for length in range(2, p + 1):
        n = B * (B - 1) ** (length - 1) - n
    return n


def necklace_count(B: int, p: int) -> dict[str, int]:
    """Count p-tuples over B symbols with cyclically distinct neighbours.

    Returns the tuple count N and the number of dihedral orbits N/(2p).
    """
    _require_odd_prime(p)
    if B < 2:
        raise InvalidBetti(f"B must be >= 2, got {B}")
    closed = (B - 1) * ((B - 1) ** (p - 1) - 1)
    recursive = necklace_recursion(B, p)
    assert closed == recursive, (closed, recursive)
    orbits, rem = divmod(closed, 2 * p)
    assert rem == 0, "dihedral action on admissible tuples must be free"
    return {"N": closed, "orbits": orbits}


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def add(self, x):
        self.parent.setdefault(x, x)

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def dihedral_images(t: tuple) -> list[tuple]:
    """All 2p images of a tuple under rotations and reversal."""
    p = len(t)
    out = []
    for s in range(p):
        rot = t[s:] + t[:s]
        out.append(rot)
        out.append(rot[::-1])
    return out


def brute_force_necklaces(B: int, p: int) -> dict[str, int]:
    """Exhaustive count of admissible tuples and their dihedral orbits."""
    if B**p > BRUTE_FORCE_LIMIT:
        raise DomainTooLarge(f"B^p = {B**p} exceeds {BRUTE_FORCE_LIMIT}")
    admissible = [
        t
        for t in itertools.product(range(B), repeat=p)
        if all(t[a] != t[(a + 1) % p] for a in range(p))
    ]
    uf = _UnionFind()
    for t in admissible:
        uf.add(t)
    for t in admissible:
        for g in dihedral_images(t):
            uf.union(t, g)
    orbits = len({uf.find(t) for t in admissible})
    return {"N": len(admissible), "orbits": orbits}


@dataclass
class BoundReport:
    m: int
    B: int
    period: int
    theorem_bound: Optional[int] = None
    period2_bound: Optional[Fraction] = None
    period3_bound: Optional[Fraction] = None
    birkhoff_phi: Optional[int] = None
    necklace_count: Optional[int] = None
    orbit_count: Optional[int] = None
    weighted_sum: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    def applicable_bound(self) -> Optional[Fraction]:
        """The bound a solver count for this period should be compared against."""
        if self.period == 2:
            return self.period2_bound
        if self.period == 3:
            return self.period3_bound
        if self.theorem_bound is not None:
            return Fraction(self.theorem_bound)
        if self.birkhoff_phi is not None:
            return Fraction(self.birkhoff_phi)
        return None

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else v.numerator
            return v

        return {k: enc(v) for k, v in self.__dict__.items()}


def bound_report(betti: BettiVector, p: int) -> BoundReport:
    """Every bound that applies to (m, B, p)."""
    B = total_B(betti)
    rep = BoundReport(m=betti.m, B=B, period=p, weighted_sum=poincare_weighted_sum(betti))
    small = small_period_bounds(betti.m, B)
    rep.period2_bound = small["p2"]
    rep.period3_bound = small["p3"]
    if betti.m == 1:
        rep.birkhoff_phi = birkhoff_phi(p)
    if is_prime(p) and p > 2:
        nc = necklace_count(B, p)
        rep.necklace_count = nc["N"]
        rep.orbit_count = nc["orbits"]
    if is_prime(p) and p > 3:
        rep.theorem_bound = theorem_bound(betti.m, B, p)
    elif p > 3:
        rep.notes.append(f"p={p} is composite; no prime-period bound applies")
    return rep
