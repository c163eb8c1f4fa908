"""Statistical machinery for the evaluation harness.

The Student-t tail probability is computed through the regularized
incomplete beta function, evaluated with the modified Lentz continued
fraction to an absolute tolerance of 1e-10.  The sign test is an exact
binomial tail over Python integers, so it is exact for any count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_BETA_TOL = 1e-10
_BETA_MAX_ITER = 500
_TINY = 1e-300


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this as a test class

    statistic: float
    p_value: float
    df: int


def mean_sd(xs: Sequence[float]) -> tuple[float, float]:
    """Sample mean and (n-1)-denominator standard deviation."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two observations")
    mean = math.fsum(xs) / n
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ArithmeticError("incomplete beta continued fraction failed to converge")


def regularized_incbeta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if x < 0.0 or x > 1.0:
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
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_tailed_p(t: float, df: int) -> float:
    """Two-tailed tail probability of Student's t with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("df must be at least 1")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return regularized_incbeta(df / 2.0, 0.5, df / (df + t * t))


def paired_t(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-tailed matched-pairs t-test on series matched by index.

    Identical series give (t=0, p=1).  A zero-variance nonzero difference
    gives an infinite statistic with p=0.
    """
    if len(a) != len(b):
        raise ValueError("paired series must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    d_mean = math.fsum(diffs) / n
    d_var = math.fsum((d - d_mean) ** 2 for d in diffs) / (n - 1)
    df = n - 1
    if d_var == 0.0:
        if d_mean == 0.0:
            return TestResult(0.0, 1.0, df)
        return TestResult(math.copysign(math.inf, d_mean), 0.0, df)
    t = d_mean / math.sqrt(d_var / n)
    return TestResult(t, t_two_tailed_p(t, df), df)


def sign_test(successes: int, failures: int) -> float:
    """Exact one-tailed binomial sign test: P[X >= successes] with X ~ B(n, 1/2)."""
    if successes < 0 or failures < 0:
        raise ValueError("counts must be non-negative")
    n = successes + failures
    if n < 1:
        raise ValueError("need at least one comparison")
    tail = sum(math.comb(n, k) for k in range(successes, n + 1))
    return tail / 2**n
