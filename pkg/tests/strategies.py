"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as st

from gpptkit.gppt import PartitionedMatrix


@st.composite
def matrices(draw, max_dim=6, square=False, allow_complex=True, low_rank=True):
    m = draw(st.integers(1, max_dim))
    n = m if square else draw(st.integers(1, max_dim))
    cplx = allow_complex and draw(st.booleans())
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    r = draw(st.integers(0, min(m, n))) if low_rank else min(m, n)
    if r == 0:
        return np.zeros((m, n), dtype=complex if cplx else float)
    def g(*shape):
        x = rng.standard_normal(shape)
        return x + 1j * rng.standard_normal(shape) if cplx else x
    return g(m, r) @ g(r, n)


@st.composite
def partitioned(draw, max_dim=6, allow_complex=True):
    mat = draw(matrices(max_dim=max_dim, square=True, allow_complex=allow_complex))
    k = draw(st.integers(0, mat.shape[0]))
    return PartitionedMatrix(mat, k)


@st.composite
def structured_partitioned(draw, max_dim=6, allow_complex=True):
    """Partitioned matrices whose blocks are each rank deficient with some probability."""
    n = draw(st.integers(1, max_dim))
    k = draw(st.integers(0, n))
    cplx = allow_complex and draw(st.booleans())
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    def block(p, q):
        r = draw(st.integers(0, min(p, q))) if p and q else 0
        if r == 0:
            return np.zeros((p, q), dtype=complex if cplx else float)
        x, y = rng.standard_normal((p, r)), rng.standard_normal((r, q))
        if cplx:
            x = x + 1j * rng.standard_normal((p, r))
        return x @ y
    m = np.zeros((n, n), dtype=complex if cplx else float)
    m[:k, :k], m[:k, k:], m[k:, :k], m[k:, k:] = block(k, k), block(k, n - k), block(n - k, k), block(n - k, n - k)
    return PartitionedMatrix(m, k)
