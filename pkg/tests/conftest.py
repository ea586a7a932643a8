import numpy as np
import pytest

from blockmoment import BlockJacobiMatrix, ch_fixture, ds_fixture, ind_fixture


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def ch():
    return ch_fixture()


@pytest.fixture(scope="session")
def ind():
    return ind_fixture(420)


@pytest.fixture(scope="session")
def ds():
    return ds_fixture()


def random_hermitian(p, rng, scale=1.0):
    g = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return scale * 0.5 * (g + g.conj().T)


def random_nonsingular(p, rng, scale=1.0):
    """Random well-conditioned matrix with spectral norm ``scale``.

    Basis generation multiplies inverses of these blocks, so per-block
    condition numbers compound; keeping them near 1 keeps degree-30
    expansions accurate.
    """
    g = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    u, s, vh = np.linalg.svd(g)
    s = np.maximum(s, 0.85 * s.max())
    return (scale / s.max()) * (u * s) @ vh


def random_regular(p, n_blocks, rng, scale=0.4):
    """Random regular block Jacobi matrix with O(1) spectral radius.

    Degree peeling amplifies rounding like (spectral radius)^degree, so
    block norms are pinned at a moderate scale to keep degree-30 algebra
    accurate to ~1e-12.
    """
    def herm():
        h = random_hermitian(p, rng)
        return scale * h / max(np.linalg.svd(h, compute_uv=False)[0], 1e-3)

    diag = tuple(herm() for _ in range(n_blocks))
    off = tuple(random_nonsingular(p, rng, scale) for _ in range(n_blocks - 1))
    return BlockJacobiMatrix(p, diag, off)


def random_regular_growing(p, n_blocks, rng):
    """Random regular matrix with growing off-diagonal scales.

    Bounded-block matrices have degree-k monomial coefficients that are
    ill-conditioned by ~2.4^k, putting a ~1e-4 floor on any degree-30
    coefficient algebra in doubles; growing off-diagonals (as in the
    indeterminate fixture) keep the representation well-conditioned.
    """
    diag, off = [], []
    for k in range(n_blocks):
        h = random_hermitian(p, rng)
        h = (0.4 * (k + 1) ** 0.8 * h
             / max(np.linalg.svd(h, compute_uv=False)[0], 1e-3))
        diag.append(h)
        if k < n_blocks - 1:
            off.append(random_nonsingular(p, rng,
                                          scale=float((k + 1) ** 1.6)))
    return BlockJacobiMatrix(p, tuple(diag), tuple(off))


def random_unitary(p, rng):
    g = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
    return float(np.abs(a - b).max()) / scale
