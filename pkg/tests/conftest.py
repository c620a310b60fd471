import numpy as np
import pytest


def gf2_rank(m: np.ndarray) -> int:
    """Plain Gaussian elimination over GF(2) on a dense 0/1 array."""
    a = (np.array(m, dtype=np.uint8) & 1).copy()
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        hits = np.nonzero(a[rank:, c])[0]
        if len(hits) == 0:
            continue
        p = rank + hits[0]
        a[[rank, p]] = a[[p, rank]]
        below = np.nonzero(a[:, c])[0]
        for r in below:
            if r != rank:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
