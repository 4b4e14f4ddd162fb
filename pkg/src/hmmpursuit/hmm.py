"""Numerically stable inference for discrete hidden Markov models.

Scaled forward/backward recursions, smoothed state and transition
statistics, and transition-matrix re-estimation pooled over multiple
observation sequences. Observation likelihoods are per-state vectors; in
the pursuit application they are binary "these tiles were seen empty"
vectors, but any nonnegative values are accepted.

Scaling convention: every forward vector is renormalized to sum to one
and the log of its normalizer is recorded, so the sequence log-likelihood
is the sum of the per-step log normalizers. Backward vectors are divided
by the same normalizers, which makes the smoothed quantities plain
products of the scaled passes with no further global normalization.

All container types are immutable after construction and all operations
are pure functions, so shared instances are safe to use across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "NEGATIVE_INFO",
    "DIRECT_SIGHTING",
    "HmmError",
    "DimensionMismatch",
    "AllZeroStep",
    "DegenerateBelief",
    "InconsistentObservations",
    "StateSpace",
    "InitialDistribution",
    "TransitionMatrix",
    "ObservationVector",
    "ObservationSequence",
    "BeliefVector",
    "ForwardPass",
    "BackwardPass",
    "SmoothedStats",
    "BaumWelchOptions",
    "BaumWelchResult",
    "forward",
    "backward",
    "filtered_posterior",
    "smoothed_stats",
    "baum_welch",
    "sequence_loglik",
]

#: Tag for a vector that only reports tiles seen empty (ones elsewhere).
NEGATIVE_INFO = "negative-info"
#: Tag for a vector that pins the agent to one observed state.
DIRECT_SIGHTING = "direct-sighting"

_SUM_ATOL = 1e-12


class HmmError(Exception):
    """Base class for model and inference errors."""


class DimensionMismatch(HmmError):
    pass


class AllZeroStep(HmmError):
    """A forward step has zero mass everywhere: the observations are
    inconsistent with the model's support."""

    def __init__(self, step: int):
        super().__init__(f"forward vector is identically zero at step {step}")
        self.step = step  # 1-based time index


class DegenerateBelief(HmmError):
    pass


class InconsistentObservations(HmmError):
    """A sequence has zero likelihood under the current support."""

    def __init__(self, sequence_index: int, step: int):
        super().__init__(
            f"sequence {sequence_index} has zero likelihood (step {step})"
        )
        self.sequence_index = sequence_index
        self.step = step


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _mu_vector(mu) -> np.ndarray:
    return mu.probs if isinstance(mu, InitialDistribution) else np.asarray(mu, dtype=float)


def _a_matrix(a) -> np.ndarray:
    return a.probs if isinstance(a, TransitionMatrix) else np.asarray(a, dtype=float)


def _obs_matrix(obs) -> np.ndarray:
    """Coerce an ObservationSequence or raw (T, n) array of per-state
    likelihoods. Raw arrays are allowed so tests can probe scaling
    behaviour with non-binary vectors."""
    if isinstance(obs, ObservationSequence):
        return obs.matrix
    arr = np.asarray(obs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DimensionMismatch("observations must form a (T, n) array with T >= 1")
    if np.any(arr < 0):
        raise ValueError("observation likelihoods must be nonnegative")
    return arr


@dataclass(frozen=True, eq=False)
class StateSpace:
    """A dense, 0-indexed finite state space of size ``n``."""

    n: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("state space must contain at least one state")
        if self.labels is not None and len(self.labels) != self.n:
            raise DimensionMismatch("labels must have one entry per state")


@dataclass(frozen=True, eq=False)
class InitialDistribution:
    """Known start distribution over states; never re-estimated."""

    probs: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.probs)
        if arr.ndim != 1:
            raise DimensionMismatch("initial distribution must be a vector")
        if np.any(arr < 0):
            raise ValueError("initial probabilities must be nonnegative")
        if abs(arr.sum() - 1.0) > _SUM_ATOL:
            raise ValueError(f"initial probabilities sum to {arr.sum()!r}, not 1")
        object.__setattr__(self, "probs", arr)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @classmethod
    def point_mass(cls, n: int, index: int) -> "InitialDistribution":
        v = np.zeros(n)
        v[index] = 1.0
        return cls(v)

    @classmethod
    def uniform(cls, n: int) -> "InitialDistribution":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic transition matrix, optionally restricted to a
    structural support mask (entries outside the mask are exactly zero)."""

    probs: np.ndarray
    support: Optional[np.ndarray] = None

    def __post_init__(self):
        arr = _frozen_array(self.probs)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch("transition matrix must be square")
        if np.any(arr < 0):
            raise ValueError("transition probabilities must be nonnegative")
        row_sums = arr.sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > _SUM_ATOL)
        if bad.size:
            raise ValueError(f"row {bad[0]} sums to {row_sums[bad[0]]!r}, not 1")
        object.__setattr__(self, "probs", arr)
        if self.support is not None:
            mask = _frozen_array(self.support, dtype=bool)
            if mask.shape != arr.shape:
                raise DimensionMismatch("support mask must match matrix shape")
            if np.any(arr[~mask] != 0.0):
                raise ValueError("entries outside the support must be exactly zero")
            object.__setattr__(self, "support", mask)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def support_mask(self) -> np.ndarray:
        """The structural support, defaulting to all-true when absent."""
        if self.support is not None:
            return self.support
        return np.ones_like(self.probs, dtype=bool)

    @classmethod
    def uniform(cls, n: int) -> "TransitionMatrix":
        return cls(np.full((n, n), 1.0 / n))


@dataclass(frozen=True, eq=False)
class ObservationVector:
    """Per-state observation likelihoods for a single time step.

    ``negative-info`` vectors are binary with zeros exactly on the set of
    positions seen empty; ``direct-sighting`` vectors are one-hot on the
    observed state.
    """

    values: np.ndarray
    kind: str = NEGATIVE_INFO

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise DimensionMismatch("observation vector must be a nonempty vector")
        if self.kind == NEGATIVE_INFO:
            if not np.all((arr == 0.0) | (arr == 1.0)):
                raise ValueError("negative-info entries must be 0 or 1")
            if not np.any(arr == 1.0):
                raise ValueError("negative-info vector must keep at least one state")
        elif self.kind == DIRECT_SIGHTING:
            if np.count_nonzero(arr) != 1 or arr.max() != 1.0:
                raise ValueError("direct-sighting vector must be one-hot")
        else:
            raise ValueError(f"unknown observation kind {self.kind!r}")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def sighted_state(self) -> Optional[int]:
        if self.kind == DIRECT_SIGHTING:
            return int(np.argmax(self.values))
        return None


@dataclass(frozen=True, eq=False)
class ObservationSequence:
    """An ordered run of observation vectors of identical length."""

    steps: tuple

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("observation sequence must contain at least one step")
        n = steps[0].n
        if any(s.n != n for s in steps):
            raise DimensionMismatch("all observation vectors must share one length")
        object.__setattr__(self, "steps", steps)
        matrix = _frozen_array(np.stack([s.values for s in steps]))
        object.__setattr__(self, "_matrix", matrix)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix  # type: ignore[attr-defined]

    @property
    def T(self) -> int:
        return len(self.steps)

    @property
    def n(self) -> int:
        return self.steps[0].n

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True, eq=False)
class BeliefVector:
    """Normalized filtered posterior over states."""

    probs: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.probs)
        if arr.ndim != 1:
            raise DimensionMismatch("belief must be a vector")
        if np.any(arr < 0) or abs(arr.sum() - 1.0) > _SUM_ATOL:
            raise ValueError("belief must be a probability vector")
        object.__setattr__(self, "probs", arr)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    def argmax(self) -> int:
        """Most probable state; ties resolve to the lowest index."""
        return int(np.argmax(self.probs))


@dataclass(frozen=True, eq=False)
class ForwardPass:
    """Scaled forward vectors plus per-step log normalizers.

    ``scaled_alpha[t]`` is the unnormalized forward vector at (0-based)
    step ``t`` divided by its sum; ``log_scale[t]`` is the log of that
    sum, so ``log_scale.sum()`` is the exact sequence log-likelihood.
    """

    scaled_alpha: np.ndarray
    log_scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scaled_alpha", _frozen_array(self.scaled_alpha))
        object.__setattr__(self, "log_scale", _frozen_array(self.log_scale))

    @property
    def T(self) -> int:
        return self.scaled_alpha.shape[0]

    @property
    def n(self) -> int:
        return self.scaled_alpha.shape[1]

    @property
    def loglik(self) -> float:
        return float(self.log_scale.sum())

    def unnormalized_alpha(self) -> np.ndarray:
        """Reconstruct the raw forward values (small T only; may underflow
        for long sequences, which is the reason scaling exists)."""
        return self.scaled_alpha * np.exp(np.cumsum(self.log_scale))[:, None]


@dataclass(frozen=True, eq=False)
class BackwardPass:
    """Backward vectors under the paired forward pass's scaling, so that
    ``scaled_alpha[t] * scaled_beta[t]`` is already the smoothed posterior."""

    scaled_beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scaled_beta", _frozen_array(self.scaled_beta))

    @property
    def T(self) -> int:
        return self.scaled_beta.shape[0]

    @property
    def n(self) -> int:
        return self.scaled_beta.shape[1]


@dataclass(frozen=True, eq=False)
class SmoothedStats:
    """Smoothed single-state posteriors and summed pair posteriors.

    ``gamma[t, i]`` is P(state i at step t | all observations);
    ``xi_sum[i, j]`` is the expected number of i->j transitions over the
    whole sequence (pair posteriors summed over steps 2..T).
    """

    gamma: np.ndarray
    xi_sum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frozen_array(self.gamma))
        object.__setattr__(self, "xi_sum", _frozen_array(self.xi_sum))


def forward(mu, a, obs) -> ForwardPass:
    """Run the scaled forward recursion.

    Parameters
    ----------
    mu : InitialDistribution or (n,) array
    a : TransitionMatrix or (n, n) array
    obs : ObservationSequence or (T, n) array

    Returns
    -------
    ForwardPass

    Raises
    ------
    AllZeroStep
        If some step's forward vector is identically zero, i.e. the
        observations are impossible under the model's support. The
        exception carries the offending 1-based step.
    """
    mu_v = _mu_vector(mu)
    a_m = _a_matrix(a)
    b = _obs_matrix(obs)
    n = mu_v.shape[0]
    if a_m.shape != (n, n) or b.shape[1] != n:
        raise DimensionMismatch(
            f"inconsistent sizes: mu has {n} states, matrix {a_m.shape}, obs {b.shape}"
        )
    T = b.shape[0]
    scaled = np.empty((T, n))
    log_scale = np.empty(T)
    v = mu_v * b[0]
    for t in range(T):
        if t > 0:
            v = (scaled[t - 1] @ a_m) * b[t]
        s = v.sum()
        if s <= 0.0:
            raise AllZeroStep(t + 1)
        scaled[t] = v / s
        log_scale[t] = math.log(s)
    return ForwardPass(scaled, log_scale)


def backward(a, obs, fwd: ForwardPass) -> BackwardPass:
    """Run the backward recursion under ``fwd``'s scaling convention.

    The final row is all ones (the recursion's boundary values) and each
    earlier row is divided by the forward normalizer of the following
    step, so smoothed statistics need no further normalization.
    """
    a_m = _a_matrix(a)
    b = _obs_matrix(obs)
    T, n = b.shape
    if fwd.T != T or fwd.n != n or a_m.shape != (n, n):
        raise DimensionMismatch("backward inputs must match the forward pass")
    scaled = np.empty((T, n))
    scaled[T - 1] = 1.0
    for t in range(T - 2, -1, -1):
        c_next = math.exp(fwd.log_scale[t + 1])
        scaled[t] = (a_m @ (b[t + 1] * scaled[t + 1])) / c_next
    return BackwardPass(scaled)


def filtered_posterior(fwd: ForwardPass, t: int) -> BeliefVector:
    """Posterior over states given observations up to step ``t`` (1-based).

    Raises DegenerateBelief if the step carried no mass (cannot happen for
    passes produced by :func:`forward`, which raises AllZeroStep instead).
    """
    if not 1 <= t <= fwd.T:
        raise IndexError(f"step {t} outside 1..{fwd.T}")
    row = fwd.scaled_alpha[t - 1]
    s = row.sum()
    if s <= 0.0 or not np.isfinite(s):
        raise DegenerateBelief(f"no mass at step {t}")
    return BeliefVector(row / s)


def smoothed_stats(fwd: ForwardPass, bwd: BackwardPass, a, obs) -> SmoothedStats:
    """Smoothed state posteriors and summed pair posteriors.

    ``xi_sum[i, j]`` accumulates, over every adjacent step pair, the
    posterior probability of being in state i then state j given the full
    sequence; its row sums therefore equal ``gamma[:-1].sum(axis=0)``.
    """
    a_m = _a_matrix(a)
    b = _obs_matrix(obs)
    T, n = b.shape
    if (fwd.T, fwd.n) != (T, n) or (bwd.T, bwd.n) != (T, n):
        raise DimensionMismatch("passes must be paired over the same inputs")
    gamma = fwd.scaled_alpha * bwd.scaled_beta
    gamma = gamma / gamma.sum(axis=1, keepdims=True)
    xi_sum = np.zeros((n, n))
    for t in range(1, T):
        c_t = math.exp(fwd.log_scale[t])
        weighted = (b[t] * bwd.scaled_beta[t]) / c_t
        xi_sum += fwd.scaled_alpha[t - 1][:, None] * a_m * weighted[None, :]
    return SmoothedStats(gamma, xi_sum)


@dataclass(frozen=True)
class BaumWelchOptions:
    """Convergence and regularization knobs for re-estimation.

    ``smoothing_eps`` is added to every in-support entry of each updated
    row after the maximization step (then the row is renormalized) so a
    feasible move never gets exact-zero probability; set it to 0 for the
    textbook update. ``callback`` receives (iteration, matrix) after
    every update, for convergence monitoring and iterate inspection.
    """

    max_iters: int = 100
    tol: float = 1e-6
    smoothing_eps: float = 1e-6
    callback: Optional[Callable[[int, np.ndarray], None]] = None


@dataclass(frozen=True, eq=False)
class BaumWelchResult:
    a_hat: TransitionMatrix
    loglik_trace: list
    iters: int


def _pooled_estep(sequences, mu, a_m) -> tuple:
    """One E-step over all sequences: pooled xi sums and total loglik."""
    n = a_m.shape[0]
    pooled_xi = np.zeros((n, n))
    total_ll = 0.0
    for idx, seq in enumerate(sequences):
        try:
            fwd = forward(mu, a_m, seq)
        except AllZeroStep as exc:
            raise InconsistentObservations(idx, exc.step) from exc
        bwd = backward(a_m, seq, fwd)
        stats = smoothed_stats(fwd, bwd, a_m, seq)
        pooled_xi += stats.xi_sum
        total_ll += fwd.loglik
    return pooled_xi, total_ll


def baum_welch(
    sequences: Sequence,
    mu,
    a0: TransitionMatrix,
    opts: Optional[BaumWelchOptions] = None,
) -> BaumWelchResult:
    """Re-estimate the transition matrix from one or more sequences.

    Pair posteriors and their row totals are pooled across all sequences
    before each update, so every sequence contributes in proportion to
    its expected transition counts. The initial distribution and the
    observation vectors are inputs and are never re-estimated.

    Rows whose pooled denominator is zero (states never occupied under
    the current parameters) keep their previous values. Entries outside
    ``a0``'s structural support stay exactly zero throughout.

    Returns the final matrix, the trace of pooled log-likelihoods (entry
    k is the log-likelihood under the matrix after k updates, so the
    trace has ``iters + 1`` entries and is non-decreasing when
    ``smoothing_eps`` is 0), and the number of updates performed.

    Raises InconsistentObservations, tagged with the sequence index, if
    any sequence has zero likelihood under the current support.
    """
    if opts is None:
        opts = BaumWelchOptions()
    if not sequences:
        raise ValueError("need at least one observation sequence")
    mu_v = _mu_vector(mu)
    support = a0.support_mask()
    a_cur = a0.probs.copy()
    n = a0.n
    trace: list = []
    iters = 0
    for iteration in range(1, opts.max_iters + 1):
        pooled_xi, total_ll = _pooled_estep(sequences, mu_v, a_cur)
        trace.append(total_ll)
        denom = pooled_xi.sum(axis=1)
        a_new = a_cur.copy()
        rows = denom > 0.0
        a_new[rows] = pooled_xi[rows] / denom[rows, None]
        if opts.smoothing_eps > 0.0:
            a_new[rows] += opts.smoothing_eps * support[rows]
            a_new[rows] /= a_new[rows].sum(axis=1, keepdims=True)
        a_new[~support] = 0.0
        delta = float(np.max(np.abs(a_new - a_cur))) if n else 0.0
        a_cur = a_new
        iters = iteration
        if opts.callback is not None:
            opts.callback(iteration, a_cur.copy())
        if delta < opts.tol:
            break
    _, final_ll = _pooled_estep(sequences, mu_v, a_cur)
    trace.append(final_ll)
    return BaumWelchResult(
        a_hat=TransitionMatrix(a_cur, support=support),
        loglik_trace=trace,
        iters=iters,
    )


def sequence_loglik(mu, a, obs) -> float:
    """Log-likelihood of one sequence under the model (scaled forward)."""
    return forward(mu, a, obs).loglik
