"""Synthetic benchmarks: the three-class broken-classifier problem and 2-D Gaussians.

Random numbers come from PCG64.  Independent streams are derived with
``SeedSequence(seed).spawn``, so every stream is reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Dataset
from .encoding import CodeMatrix, gen_allpairs


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    K: int = 3
    per_class_train: int = 300
    per_class_test: int = 1000
    dim: int = 2
    mean_range: float = 20.0

    def __post_init__(self):
        if self.K < 3:
            raise ValueError("K must be at least 3")
        if self.per_class_train <= 0 or self.per_class_test <= 0:
            raise ValueError("sample counts must be positive")


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def gen_three_class(seed: int = 0, per_class: int = 100) -> tuple[np.ndarray, np.ndarray, CodeMatrix]:
    """Probability estimates of three all-pairs classifiers, the third one broken.

    Rows of the code matrix are (1 vs 2), (1 vs 3), (2 vs 3).  Returns
    ``(Q, y, C)`` with ``Q`` of shape (3 * per_class, 3) and labels 1..3
    in blocks.
    """
    u_rng, v_rng = _streams(seed, 2)
    N = 3 * per_class
    y = np.repeat(np.arange(1, 4), per_class)
    u = u_rng.random((N, 3))
    v = v_rng.random(N)
    c1, c2, c3 = (y == 1), (y == 2), (y == 3)

    Q = u.copy()  # don't-care classes keep plain uniform draws
    Q[c1, 0] = 0.9 + 0.1 * u[c1, 0]
    Q[c2, 0] = 0.1 + 0.1 * u[c2, 0]
    Q[c1, 1] = 0.6 + 0.4 * u[c1, 1]
    Q[c3, 1] = 0.1 + 0.1 * u[c3, 1]
    r = np.where(v > 0.5, 1.0, -1.0)
    broken = c2 | c3
    Q[broken, 2] = 0.5 + 0.5 * r[broken] * u[broken, 2]
    return Q, y, gen_allpairs(3)


def gen_gauss(cfg: SynthConfig) -> tuple[Dataset, Dataset]:
    """K unit-covariance Gaussians with means drawn uniformly from [0, mean_range]^dim."""
    mean_rng, train_rng, test_rng = _streams(cfg.seed, 3)
    means = mean_rng.uniform(0.0, cfg.mean_range, size=(cfg.K, cfg.dim))

    def draw(rng, per_class):
        X = np.concatenate([m + rng.standard_normal((per_class, cfg.dim)) for m in means])
        y = np.repeat(np.arange(1, cfg.K + 1), per_class)
        return Dataset(X, y, cfg.K)

    return draw(train_rng, cfg.per_class_train), draw(test_rng, cfg.per_class_test)
