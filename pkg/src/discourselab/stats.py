"""Two-sample pooled-variance t-test with Cohen's d.

The two-sided p-value comes from the Student t distribution evaluated through
the regularized incomplete beta function, computed here with a continued
fraction (modified Lentz) so the module has no runtime dependency beyond the
standard library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TTestResult:
    label: str
    t: float
    df: int
    p: float
    d: float
    degenerate: bool = False


def _betacf(a: float, b: float, x: float, tol: float = 1e-14,
            max_iter: int = 500) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|)."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def two_sample_ttest(group_a, group_b, label: str = "") -> TTestResult:
    """Pooled-variance Student t-test, two-sided, with pooled-SD Cohen's d.

    If both groups are constant the statistic is undefined: equal constants
    report t=0, p=1, d=0; unequal constants report infinities. Either case
    sets the ``degenerate`` flag.
    """
    a = [float(x) for x in group_a]
    b = [float(x) for x in group_b]
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValueError("both groups need at least two observations")
    df = n1 + n2 - 2
    mean_a = sum(a) / n1
    mean_b = sum(b) / n2
    ss_a = sum((x - mean_a) ** 2 for x in a)
    ss_b = sum((x - mean_b) ** 2 for x in b)
    pooled_var = (ss_a + ss_b) / df
    diff = mean_a - mean_b
    if pooled_var == 0.0:
        if diff == 0.0:
            return TTestResult(label, 0.0, df, 1.0, 0.0, degenerate=True)
        sign = math.copysign(1.0, diff)
        return TTestResult(label, sign * math.inf, df, 0.0, sign * math.inf,
                           degenerate=True)
    pooled_sd = math.sqrt(pooled_var)
    se = pooled_sd * math.sqrt(1.0 / n1 + 1.0 / n2)
    t = diff / se
    p = student_t_two_sided_p(t, df)
    d = diff / pooled_sd
    return TTestResult(label, t, df, p, d)
