import math
from fractions import Fraction

import mpmath as mp
import pytest

from treegraft.stats import (
    TestResult,
    mean_sd,
    paired_t,
    regularized_incbeta,
    sign_test,
    t_two_tailed_p,
)


def test_mean_sd_constant():
    assert mean_sd([1.0, 1.0, 1.0]) == (1.0, 0.0)


def test_mean_sd_two_points():
    mean, sd = mean_sd([2.0, 4.0])
    assert mean == 3.0
    assert sd == pytest.approx(math.sqrt(2), abs=1e-15)


def test_mean_sd_against_exact_rational_oracle():
    # accuracy-style series; oracle recomputed with exact rational arithmetic
    xs = [70.2 + 0.37 * i - 0.011 * i * i for i in range(100)]
    fx = [Fraction(x) for x in xs]
    n = len(fx)
    fmean = sum(fx) / n
    fvar = sum((x - fmean) ** 2 for x in fx) / (n - 1)
    mean, sd = mean_sd(xs)
    assert mean == pytest.approx(float(fmean), abs=1e-9)
    assert sd == pytest.approx(math.sqrt(float(fvar)), abs=1e-9)


def test_mean_sd_permutation_invariant():
    xs = [3.5, 1.25, 9.0, -2.0, 4.75]
    assert mean_sd(xs) == mean_sd(list(reversed(xs)))


def test_mean_sd_needs_two():
    with pytest.raises(ValueError):
        mean_sd([1.0])


def test_paired_t_identical_series():
    r = paired_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r == TestResult(0.0, 1.0, 2)


def test_paired_t_swap_negates_statistic():
    a = [5.0, 6.5, 4.0, 7.25, 5.5]
    b = [4.5, 6.0, 4.5, 6.0, 5.0]
    fwd = paired_t(a, b)
    rev = paired_t(b, a)
    assert fwd.statistic == -rev.statistic
    assert fwd.p_value == rev.p_value


def test_paired_t_hand_example():
    # d = [1,2,3,4]: mean 2.5, sd sqrt(5/3), t = sqrt(15)
    r = paired_t([1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 0.0, 0.0])
    assert r.statistic == pytest.approx(math.sqrt(15), abs=1e-12)
    assert r.df == 3
    assert r.p_value == pytest.approx(0.0305, abs=5e-4)


def test_paired_t_zero_variance_nonzero_difference():
    r = paired_t([2.0, 3.0, 4.0], [1.0, 2.0, 3.0])
    assert math.isinf(r.statistic) and r.statistic > 0
    assert r.p_value == 0.0


def test_paired_t_validation():
    with pytest.raises(ValueError):
        paired_t([1.0], [2.0])
    with pytest.raises(ValueError):
        paired_t([1.0, 2.0], [1.0])


@pytest.mark.parametrize(
    "df,t,table_p",
    [
        (3, 3.182, 0.05),
        (3, 2.353, 0.10),
        (10, 2.228, 0.05),
        (10, 1.812, 0.10),
        (99, 1.984, 0.05),
        (99, 1.660, 0.10),
        (1, 12.706, 0.05),
    ],
)
def test_t_two_tailed_matches_published_tables(df, t, table_p):
    assert t_two_tailed_p(t, df) == pytest.approx(table_p, abs=5e-4)


def test_t_two_tailed_against_quadrature_oracle():
    def oracle(t, df):
        c = mp.gamma((df + 1) / 2) / (mp.sqrt(df * mp.pi) * mp.gamma(mp.mpf(df) / 2))
        tail = mp.quad(lambda x: c * (1 + x * x / df) ** (-(df + 1) / 2.0), [abs(t), mp.inf])
        return float(2 * tail)

    for df in (1, 2, 5, 30, 99):
        for t in (0.1, 0.7, 1.5, 2.5, 5.0):
            assert t_two_tailed_p(t, df) == pytest.approx(oracle(t, df), abs=1e-10)


def test_incbeta_against_mpmath():
    for a, b, x in [(0.5, 0.5, 0.3), (2.0, 5.0, 0.1), (49.5, 0.5, 0.98), (10.0, 10.0, 0.5)]:
        ref = float(mp.betainc(a, b, 0, x, regularized=True))
        assert regularized_incbeta(a, b, x) == pytest.approx(ref, abs=1e-10)
    assert regularized_incbeta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incbeta(2.0, 3.0, 1.0) == 1.0


def test_sign_test_exact_fifteen_two():
    p = sign_test(15, 2)
    assert p == 154 / 131072
    assert 0.00117 <= p <= 0.00118
    assert f"{p:.3f}" == "0.001"


def test_sign_test_single_comparison():
    assert sign_test(1, 0) == 0.5


def test_sign_test_symmetric_counts_at_least_half():
    for k in range(1, 12):
        assert sign_test(k, k) >= 0.5


def test_sign_test_matches_exact_rational_sum_up_to_30():
    for n in range(1, 31):
        for successes in range(0, n + 1):
            expected = Fraction(
                sum(math.comb(n, j) for j in range(successes, n + 1)), 2**n
            )
            assert sign_test(successes, n - successes) == float(expected)


def test_sign_test_validation():
    with pytest.raises(ValueError):
        sign_test(-1, 2)
    with pytest.raises(ValueError):
        sign_test(0, 0)
