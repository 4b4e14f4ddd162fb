"""Brute-force reference computations for small model instances.

These routines compute likelihoods and posteriors by explicit summation
over every state path, and forward values as literal products of
diagonal observation matrices with the transition matrix. They exist to
check the scaled recursions in :mod:`hmmpursuit.hmm` from independent
directions and are only feasible for small ``n**T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hmm import HmmError, _a_matrix, _mu_vector, _obs_matrix

__all__ = ["TooLarge", "ExactResult", "enumerate_likelihood", "matrix_product_alpha"]

_MAX_PATHS = 10**6


class TooLarge(HmmError):
    """The instance has too many paths to enumerate."""


@dataclass(frozen=True, eq=False)
class ExactResult:
    """Exact quantities from full path enumeration.

    ``posterior[t, i]`` is P(state i at step t | all observations) and
    ``joint[t, i, j]`` is P(state i at step t, state j at step t+1 | all
    observations), both 0-based in t. When ``likelihood`` is zero the
    posterior and joint tensors are left as zeros (the conditional is
    undefined); callers probing inconsistent instances must check.
    """

    likelihood: float
    posterior: np.ndarray
    joint: np.ndarray


def enumerate_likelihood(mu, a, obs, max_paths: int = _MAX_PATHS) -> ExactResult:
    """Sum the joint probability over all ``n**T`` state paths.

    Raises TooLarge when ``n**T`` exceeds ``max_paths``.
    """
    mu_v = _mu_vector(mu)
    a_m = _a_matrix(a)
    b = _obs_matrix(obs)
    T, n = b.shape
    if n**T > max_paths:
        raise TooLarge(f"{n}**{T} paths exceed the {max_paths} guard")

    # Every path as one row of state indices, then one weight per path.
    grids = np.meshgrid(*([np.arange(n)] * T), indexing="ij")
    paths = np.stack([g.ravel() for g in grids], axis=1)
    weights = mu_v[paths[:, 0]] * b[0][paths[:, 0]]
    for t in range(1, T):
        weights = weights * a_m[paths[:, t - 1], paths[:, t]] * b[t][paths[:, t]]

    likelihood = float(weights.sum())
    posterior = np.zeros((T, n))
    joint = np.zeros((max(T - 1, 0), n, n))
    if likelihood > 0.0:
        for t in range(T):
            np.add.at(posterior[t], paths[:, t], weights)
        for t in range(T - 1):
            flat = joint[t].ravel()
            np.add.at(flat, paths[:, t] * n + paths[:, t + 1], weights)
        posterior /= likelihood
        joint /= likelihood
    return ExactResult(likelihood=likelihood, posterior=posterior, joint=joint)


def matrix_product_alpha(mu, a, obs) -> np.ndarray:
    """Forward values as explicit diagonal-matrix products.

    Computes, for every prefix length t, the row vector
    ``mu @ diag(b_1) @ A @ diag(b_2) @ ... @ A @ diag(b_t)`` with full
    (unscaled) matrix multiplications, and returns them stacked as a
    (T, n) array of unnormalized forward values.
    """
    mu_v = _mu_vector(mu)
    a_m = _a_matrix(a)
    b = _obs_matrix(obs)
    T, n = b.shape
    out = np.empty((T, n))
    v = mu_v @ np.diag(b[0])
    out[0] = v
    for t in range(1, T):
        v = v @ a_m @ np.diag(b[t])
        out[t] = v
    return out
