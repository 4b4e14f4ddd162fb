"""The enumeration reference is itself checked by hand here, on instances
small enough to sum on paper, before anything else trusts it."""

import numpy as np
import pytest

from hmmpursuit.exact import TooLarge, enumerate_likelihood, matrix_product_alpha

# Two states, three steps. First observation pins state 0, last pins
# state 1, the middle step is uninformative. Only two paths survive:
#   (0,0,1): 0.5 * 0.7 * 0.3 = 0.105
#   (0,1,1): 0.5 * 0.3 * 0.6 = 0.090
# so L = 0.195 and the step-2 posterior is (0.105, 0.090) / 0.195.
MU2 = np.array([0.5, 0.5])
A2 = np.array([[0.7, 0.3], [0.4, 0.6]])
OBS2 = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def test_two_state_hand_likelihood():
    res = enumerate_likelihood(MU2, A2, OBS2)
    assert res.likelihood == pytest.approx(0.195, abs=1e-15)


def test_two_state_hand_posterior():
    res = enumerate_likelihood(MU2, A2, OBS2)
    assert np.allclose(res.posterior[0], [1.0, 0.0], atol=1e-15)
    assert np.allclose(res.posterior[1], [7.0 / 13.0, 6.0 / 13.0], atol=1e-12)
    assert np.allclose(res.posterior[2], [0.0, 1.0], atol=1e-15)


def test_two_state_hand_joint():
    res = enumerate_likelihood(MU2, A2, OBS2)
    # Path weights conditional on the data: 0.105/0.195 and 0.090/0.195.
    want_01 = np.array([[0.105, 0.090], [0.0, 0.0]]) / 0.195
    want_12 = np.array([[0.0, 0.105], [0.0, 0.090]]) / 0.195
    assert np.allclose(res.joint[0], want_01, atol=1e-12)
    assert np.allclose(res.joint[1], want_12, atol=1e-12)


def test_single_step_is_rescaled_prior():
    mu = np.array([0.2, 0.8])
    obs = np.array([[1.0, 1.0]])
    res = enumerate_likelihood(mu, A2, obs)
    assert res.likelihood == pytest.approx(1.0)
    assert np.allclose(res.posterior[0], mu)
    assert res.joint.shape == (0, 2, 2)


def test_zero_likelihood_leaves_zero_tensors():
    # Observation demands state 1 at step 1 but mu puts no mass there.
    mu = np.array([1.0, 0.0])
    obs = np.array([[0.0, 1.0]])
    res = enumerate_likelihood(mu, A2, obs)
    assert res.likelihood == 0.0
    assert not res.posterior.any()


def test_posterior_rows_sum_to_one():
    rng = np.random.default_rng(7)
    mu = np.array([0.3, 0.3, 0.4])
    a = np.array([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5], [0.1, 0.1, 0.8]])
    obs = rng.random((4, 3)) + 0.01
    res = enumerate_likelihood(mu, a, obs)
    assert np.allclose(res.posterior.sum(axis=1), 1.0, atol=1e-12)
    # Each joint slab is a distribution over pairs.
    assert np.allclose(res.joint.sum(axis=(1, 2)), 1.0, atol=1e-12)
    # Marginalizing the pair posterior must recover the singles.
    assert np.allclose(res.joint[0].sum(axis=1), res.posterior[0], atol=1e-12)
    assert np.allclose(res.joint[0].sum(axis=0), res.posterior[1], atol=1e-12)


def test_path_guard():
    mu = np.full(10, 0.1)
    a = np.full((10, 10), 0.1)
    obs = np.ones((8, 10))
    with pytest.raises(TooLarge):
        enumerate_likelihood(mu, a, obs)


def test_matrix_product_alpha_hand_values():
    out = matrix_product_alpha(MU2, A2, OBS2)
    # alpha_1 = mu . diag(b1) = (0.5, 0)
    # alpha_2 = alpha_1 A diag(b2) = (0.35, 0.15)
    # alpha_3 = alpha_2 A diag(b3) = (0, 0.195)
    assert np.allclose(out[0], [0.5, 0.0], atol=1e-15)
    assert np.allclose(out[1], [0.35, 0.15], atol=1e-15)
    assert np.allclose(out[2], [0.0, 0.195], atol=1e-15)


def test_matrix_product_total_matches_enumeration():
    rng = np.random.default_rng(11)
    mu = np.array([0.25, 0.25, 0.5])
    a = np.array([[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.3, 0.3, 0.4]])
    obs = rng.random((5, 3))
    total = matrix_product_alpha(mu, a, obs)[-1].sum()
    assert total == pytest.approx(
        enumerate_likelihood(mu, a, obs).likelihood, rel=1e-12
    )
