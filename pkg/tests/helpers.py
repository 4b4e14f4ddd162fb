"""Shared builders for randomized test instances."""

import numpy as np

from hmmpursuit.exact import enumerate_likelihood


def random_support_matrix(rng, n):
    """Row-stochastic matrix with a random support (each row keeps at
    least one entry)."""
    support = rng.random((n, n)) < 0.6
    for i in range(n):
        if not support[i].any():
            support[i, rng.integers(n)] = True
    probs = np.zeros((n, n))
    for i in range(n):
        cols = np.flatnonzero(support[i])
        draw = rng.gamma(1.0, 1.0, size=cols.size)
        probs[i, cols] = draw / draw.sum()
    return probs


def random_instance(rng, n_max=5, t_max=6, binary=True):
    """(mu, a, obs) with nonzero likelihood, small enough to enumerate.

    Observations are binary vectors with at least one live state per
    step (the game's negative-information shape) unless binary=False,
    in which case they are arbitrary positive weights.
    """
    while True:
        n = int(rng.integers(2, n_max + 1))
        T = int(rng.integers(1, t_max + 1))
        mu = rng.gamma(1.0, 1.0, size=n)
        mu /= mu.sum()
        a = random_support_matrix(rng, n)
        if binary:
            obs = (rng.random((T, n)) < 0.7).astype(float)
            for t in range(T):
                if not obs[t].any():
                    obs[t, rng.integers(n)] = 1.0
        else:
            obs = rng.random((T, n)) + 0.05
        if enumerate_likelihood(mu, a, obs).likelihood > 0.0:
            return mu, a, obs
