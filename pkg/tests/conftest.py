import numpy as np
import pytest

from modhadamard.matrix import SignMatrix


def exact_gram(H: SignMatrix) -> np.ndarray:
    """Oracle: plain integer product, independent of the bit-packed kernels."""
    a = H.entries.astype(np.int64)
    return a @ a.T


def oracle_is_mh(H: SignMatrix, m: int) -> bool:
    G = exact_gram(H) - H.order * np.eye(H.order, dtype=np.int64)
    return not np.any(G) if m == 0 else not np.any(G % m)


@pytest.fixture
def rng():
    return np.random.default_rng(20131)
