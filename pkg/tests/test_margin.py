import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convagg.base import score, train_binary_problems
from convagg.decode import metrics
from convagg.discrepancy import PhiTensor, compute_phi
from convagg.encoding import gen_allpairs
from convagg.errors import InvalidBoundParameter
from convagg.margin import (f_tau, generalization_bound, hinge_and_margin, lm_objective, ramp,
                            sandwich_gap, subgradient_solve, tau_annealed_solve)
from convagg.model import fit
from convagg.objective import ObjectiveConfig
from convagg.pdip import solve
from convagg.synthgen import SynthConfig, gen_gauss

from conftest import random_phi


def _single(scores_wrong):
    # one example of class 1 whose wrong-class scores are w . phi with w = 1
    vals = np.array([[[0.0]] + [[s] for s in scores_wrong]])
    return PhiTensor(vals, np.array([1]))


def _brute_hinge_margin(w, phi):
    h, nu = [], []
    for i in range(phi.N):
        yi = phi.labels[i] - 1
        s = [float(phi.values[i, k] @ w) for k in range(phi.K)]
        h.append(max((0.0 if k == yi else 1.0) + s[k] for k in range(phi.K)))
        nu.append(min(-s[k] for k in range(phi.K) if k != yi))
    return np.array(h), np.array(nu)


def test_zero_weights(rng):
    phi = random_phi(rng, 10, 4, 3)
    rep = hinge_and_margin(np.zeros(3), phi)
    assert (rep.margins == 0).all()
    assert (rep.hinge_values == 1).all()
    assert rep.objective == 1.0


def test_large_margin_zero_hinge():
    rep = hinge_and_margin(np.ones(1), _single([-1.5, -2.0]))
    assert rep.margins[0] == 1.5
    assert rep.hinge_values[0] == 0.0


def test_small_margin_linear_hinge():
    rep = hinge_and_margin(np.ones(1), _single([-0.3, -1.0]))
    assert rep.margins[0] == pytest.approx(0.3)
    assert rep.hinge_values[0] == pytest.approx(0.7)


def test_negative_margin_hinge_above_one():
    rep = hinge_and_margin(np.ones(1), _single([0.4, -1.0]))
    assert rep.margins[0] == pytest.approx(-0.4)
    assert rep.hinge_values[0] == pytest.approx(1.4)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31), K=st.integers(2, 6), scale=st.floats(0.01, 10))
def test_hinge_ramp_zero_one_ordering(seed, K, scale):
    rng = np.random.default_rng(seed)
    phi = random_phi(rng, 12, K, 4, scale)
    w = rng.exponential(size=4)
    rep = hinge_and_margin(w, phi, lam=0.1)
    h_ref, nu_ref = _brute_hinge_margin(w, phi)
    np.testing.assert_allclose(rep.hinge_values, h_ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(rep.margins, nu_ref, rtol=1e-12, atol=1e-12)
    r = ramp(rep.margins)
    assert (rep.hinge_values >= r - 1e-12).all()
    assert (r >= (rep.margins <= 0)).all()
    assert ((rep.hinge_values > 0) | (rep.margins >= 1 - 1e-12)).all()
    assert ((rep.margins >= 0) | (rep.hinge_values >= 1)).all()
    assert rep.objective == pytest.approx(h_ref.mean() + 0.05 * w @ w)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31), K=st.sampled_from([3, 5, 10]), tau=st.sampled_from([1, 4, 16, 64]),
       scale=st.floats(0.01, 50))
def test_sandwich(seed, K, tau, scale):
    rng = np.random.default_rng(seed)
    phi = random_phi(rng, 10, K, 4, scale)
    w = rng.exponential(size=4)
    gap = sandwich_gap(w, phi, tau)
    assert 0 <= gap <= math.log(K) / tau
    lam = 1e-4
    assert abs(f_tau(w, phi, lam, tau) - lm_objective(w, phi, lam)) <= math.log(K) / tau


def test_sandwich_examples(rng):
    phi = random_phi(rng, 30, 3, 4)
    w = rng.exponential(size=4)
    assert sandwich_gap(w, phi, 1) <= 1.0986123
    assert sandwich_gap(w, phi, 100) <= 0.011
    with pytest.raises(ValueError):
        sandwich_gap(w, phi, 0.5)


def test_subgradient_large_lambda(rng):
    phi = random_phi(rng, 20, 3, 4)
    w = subgradient_solve(phi, 1e6, iters=500)
    assert np.abs(w).max() < 1e-2
    assert (w >= 0).all()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_subgradient_projection(seed):
    rng = np.random.default_rng(seed)
    phi = random_phi(rng, 15, 4, 5, scale=3.0)
    w = subgradient_solve(phi, 1e-2, iters=200)
    assert (w >= 0).all()
    assert lm_objective(w, phi, 1e-2) <= lm_objective(np.full(5, 0.2), phi, 1e-2)


def test_subgradient_close_to_tau_annealed(three_class_fixture):
    Q, y, C = three_class_fixture
    phi = compute_phi(C, Q, y)
    lam = 1e-4
    f_sub = lm_objective(subgradient_solve(phi, lam), phi, lam)
    f_tau64 = lm_objective(tau_annealed_solve(phi, lam), phi, lam)
    assert abs(f_sub - f_tau64) <= 0.05 * f_tau64


def test_tau_schedule_one_without_cost_is_plain_solve(three_class_fixture):
    Q, y, C = three_class_fixture
    phi = compute_phi(C, Q, y)
    w = tau_annealed_solve(phi, 1e-4, [1], cost_augmented=False)
    assert np.array_equal(w, solve(phi, 1e-4).w_star)


def test_tau_annealing_sandwich_and_warm_start(three_class_fixture):
    Q, y, C = three_class_fixture
    phi = compute_phi(C, Q, y)
    lam = 1e-4
    taus = [1, 2, 4, 8, 16, 32, 64]
    w, reports = tau_annealed_solve(phi, lam, taus, return_reports=True)
    assert (w >= 0).all()
    assert abs(lm_objective(w, phi, lam) - f_tau(w, phi, lam, 64)) <= math.log(3) / 64
    for tau, rep in zip(taus, reports):
        assert rep.converged and np.isfinite(rep.objective_trace[-1])
        cold = solve(phi, lam, cfg=ObjectiveConfig(lam, tau, True))
        assert rep.iterations <= cold.iterations


def test_tau_schedule_validation(rng):
    phi = random_phi(rng, 5, 3, 2)
    with pytest.raises(ValueError):
        tau_annealed_solve(phi, 1e-4, [2, 4])
    with pytest.raises(ValueError):
        tau_annealed_solve(phi, 1e-4, [1, 4, 4])


def test_bound_perfect_margins():
    phi = PhiTensor(np.array([[[0.0, 0.0], [-1.0, -2.0]], [[-3.0, -1.0], [0.0, 0.0]]]),
                    np.array([1, 2]))
    w = np.array([1.0, 1.0])
    rep = generalization_bound(w, phi, epsilon=0.1)
    assert rep.empirical_loss == 0.0
    assert rep.total == pytest.approx(rep.complexity_term + rep.confidence_term)
    assert rep.B == pytest.approx(math.sqrt(2))
    # both examples have a single wrong class with squared norms 5 and 10
    assert rep.complexity_term == pytest.approx(2 * math.sqrt(2) / 2 * math.sqrt(15))


def test_bound_confidence_term(rng):
    for N in (10, 1000, 5000):
        phi = random_phi(rng, N, 3, 2)
        rep = generalization_bound(np.ones(2), phi, B=5.0, epsilon=0.05)
        assert rep.confidence_term == pytest.approx(math.sqrt(9 * math.log(2 / 0.05) / (2 * N)))
        assert rep.complexity_term >= 0 and rep.total >= rep.empirical_loss


def test_bound_parameter_errors(rng):
    phi = random_phi(rng, 5, 3, 2)
    with pytest.raises(InvalidBoundParameter):
        generalization_bound(np.ones(2), phi, B=1.0)
    with pytest.raises(InvalidBoundParameter):
        generalization_bound(np.ones(2), phi, epsilon=1.0)


def test_bound_above_test_error():
    train, test = gen_gauss(SynthConfig(seed=0, K=5, per_class_train=100, per_class_test=300))
    C = gen_allpairs(5)
    models, Q = train_binary_problems(train, C)
    model, _ = fit(C, Q, train.labels)
    phi = compute_phi(C, Q, train.labels)
    rep = generalization_bound(model.weights, phi)
    err = 1 - metrics(test.labels, model.posterior(score(models, test.features))).accuracy
    assert rep.total >= err
