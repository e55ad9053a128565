import numpy as np
import pytest

from fpu.operators import Operator
from fpu.sequences import EventuallyPeriodicSeq


def exact_window(*seqs: EventuallyPeriodicSeq) -> range:
    """Index range on which pointwise identities are checked exhaustively:
    three full periods beyond every core on both sides."""
    period = 1
    extent = 4
    for s in seqs:
        for p in (len(s.left), len(s.right)):
            period = period * p // np.gcd(period, p)
        extent = max(extent, abs(s.offset) + len(s.core) + 1)
    w = 3 * period + extent
    return range(-w, w + 1)


def seq_equal_on_window(a: EventuallyPeriodicSeq, b: EventuallyPeriodicSeq) -> bool:
    return all(a.at(j) == b.at(j) for j in exact_window(a, b))


def dense_window(op: Operator, lo: int, hi: int) -> np.ndarray:
    """Dense matrix of the operator over [lo, hi)^2; the brute-force oracle."""
    return np.array([[op.entry(i, j) for j in range(lo, hi)]
                     for i in range(lo, hi)], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
