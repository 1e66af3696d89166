import numpy as np
from hypothesis import given, settings, strategies as st

from billiard_bounds.homology.gf2 import gf2_rank, gf2_rank_dense, pack, unpack


def dense_rank_oracle(A):
    """Row reduction mod 2 on a numpy array."""
    A = np.array(A, dtype=np.uint8) % 2
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r, c]), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
    return rank


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_rank_matches_dense_oracle(rows, cols, seed):
    A = np.random.default_rng(seed).integers(0, 2, size=(rows, cols))
    assert gf2_rank_dense(A.tolist()) == dense_rank_oracle(A)
    assert gf2_rank_dense(A.T.tolist()) == dense_rank_oracle(A)


def test_pack_unpack():
    assert unpack(pack([0, 5, 63, 64])) == [0, 5, 63, 64]
    assert pack([3, 3]) == 0


def test_rank_examples():
    assert gf2_rank([]) == 0
    assert gf2_rank([0b11, 0b11]) == 1
    assert gf2_rank([0b011, 0b110, 0b101]) == 2
    assert gf2_rank([1 << i for i in range(100)]) == 100
