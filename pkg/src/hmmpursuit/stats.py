"""Two-sample comparison used by the experiment harness.

Implements Welch's unequal-variance t-test with the two-sided p-value
computed through the regularized incomplete beta function, evaluated
here with a Lentz-style continued fraction so the package works
without scipy at runtime.
"""

import math
from dataclasses import dataclass

import numpy as np


class StatsError(Exception):
    pass


class SampleTooSmall(StatsError):
    """A sample has fewer than two values, so its variance is undefined."""


class DegenerateVariance(StatsError):
    """Both samples have zero variance; the t statistic is 0/0."""


@dataclass(frozen=True, eq=False)
class WelchResult:
    t_stat: float
    df: float
    p_value: float


# Continued-fraction evaluation of the incomplete beta.  _FPMIN guards
# divisions against exact zeros as in the usual Lentz scheme.
_FPMIN = 1e-300
_CF_EPS = 1e-15
_CF_MAX_ITERS = 300


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a > 0, b > 0, 0 <= x <= 1."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the expansion on the side where it converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def welch_t_test(sample_a, sample_b) -> WelchResult:
    """Welch's t-test for two independent samples, two-sided.

    Degrees of freedom follow the Welch-Satterthwaite approximation.
    Only one of the two samples needs nonzero variance; the test
    degenerates (and raises) only when both are constant.

    Parameters
    ----------
    sample_a, sample_b : array_like
        One-dimensional samples with at least two values each.

    Returns
    -------
    WelchResult
        t statistic, fractional degrees of freedom, two-sided p-value.
    """
    xa = np.asarray(sample_a, dtype=np.float64).ravel()
    xb = np.asarray(sample_b, dtype=np.float64).ravel()
    if xa.size < 2 or xb.size < 2:
        raise SampleTooSmall(
            f"need at least two values per sample, got {xa.size} and {xb.size}"
        )
    na, nb = xa.size, xb.size
    va = float(np.var(xa, ddof=1))
    vb = float(np.var(xb, ddof=1))
    if va == 0.0 and vb == 0.0:
        raise DegenerateVariance("both samples are constant")
    sa = va / na
    sb = vb / nb
    t = float((np.mean(xa) - np.mean(xb)) / math.sqrt(sa + sb))
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return WelchResult(t_stat=t, df=float(df), p_value=float(min(1.0, p)))
