import numpy as np
import pytest

from convagg.discrepancy import PhiTensor, compute_phi
from convagg.encoding import NEG, POS, DONTCARE, CodeMatrix, Scheme, gen_allpairs, gen_ecoc, gen_ova
from convagg.synthgen import gen_three_class

# all-pairs code for K=3 with rows (1 vs 2), (2 vs 3), (1 vs 3)
PAIRWISE3 = CodeMatrix(np.array([[POS, NEG, DONTCARE],
                              [DONTCARE, POS, NEG],
                              [POS, DONTCARE, NEG]], dtype=np.int8), Scheme.ALL_PAIRS)


def random_code(rng, K):
    pick = rng.integers(3)
    if pick == 0:
        return gen_ova(K)
    if pick == 1:
        return gen_allpairs(K)
    return gen_ecoc(K, seed=int(rng.integers(1000)), n_candidates=200)


def random_phi(rng, N, K, M, scale=1.0):
    """Arbitrary feature tensor with the structural zero on the true-class slice."""
    y = rng.integers(1, K + 1, size=N)
    y[:K] = np.arange(1, K + 1)[:N]
    vals = scale * rng.normal(size=(N, K, M))
    vals[np.arange(N), y - 1] = 0.0
    return PhiTensor(vals, y)


def random_problem(rng, N, K, kind="xent"):
    """Code matrix, Q and labels drawn at random, with the resulting phi."""
    C = random_code(rng, K)
    Q = rng.uniform(0.02, 0.98, size=(N, C.M))
    y = rng.integers(1, K + 1, size=N)
    return C, Q, y, compute_phi(C, Q, y, kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def three_class_fixture():
    return gen_three_class(0)


def fd_gradient(f, w, h=1e-6):
    g = np.empty_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g[j] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def fd_jacobian(grad, w, h=1e-5):
    cols = []
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        cols.append((grad(w + e) - grad(w - e)) / (2 * h))
    return np.column_stack(cols)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12))


def grid_min(phi, lam, hi=10.0, step=1e-3, chunk=200):
    """Brute-force minimum of the M=2 objective over the box [0, hi]^2.

    Uses exp(a w1 + b w2) = exp(a w1) exp(b w2), so each example's
    log-sum-exp over a block of the grid is one small matrix product.
    """
    assert phi.M == 2
    g = np.arange(0, round(hi / step) + 1) * step
    v = phi.values
    e2 = np.exp(np.einsum("nk,g->nkg", v[:, :, 1], g))
    best, arg = np.inf, None
    for s in range(0, g.size, chunk):
        w1 = g[s:s + chunk]
        e1 = np.exp(np.einsum("nk,c->nkc", v[:, :, 0], w1))
        tot = np.zeros((w1.size, g.size))
        for i in range(phi.N):
            tot += np.log(e1[i].T @ e2[i])
        f = tot / phi.N + 0.5 * lam * (w1[:, None] ** 2 + g[None, :] ** 2)
        j = np.unravel_index(np.argmin(f), f.shape)
        if f[j] < best:
            best, arg = float(f[j]), np.array([w1[j[0]], g[j[1]]])
    return best, arg
