"""Paired statistical comparison of balancer results.

The two-sided paired Student t-test evaluates its p-value through the
regularized incomplete beta function, computed with the continued
fraction expansion (Numerical Recipes style) so the package carries no
statistics dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BETA_CF_TOL = 1e-12
BETA_CF_MAX_ITER = 300


class DegenerateDifferences(Exception):
    """All paired differences are identical; the t statistic is undefined."""


class ZeroBaseline(Exception):
    pass


@dataclass(frozen=True)
class PairedSample:
    labels: tuple[str, ...]
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.a) == len(self.b)):
            raise ValueError("labels, a, b must have equal lengths")
        if len(self.a) < 2:
            raise ValueError("need at least 2 pairs")


@dataclass(frozen=True)
class TestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_two_sided: float
    mean_improvement_pct: float


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz method)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, BETA_CF_MAX_ITER + 1):
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
        if abs(delta - 1.0) < BETA_CF_TOL:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be > 0")
    if not 0 <= x <= 1:
        raise ValueError("x must be in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # Use the expansion on whichever side converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_p_two_sided(t: float, df: int) -> float:
    """P(|T| >= |t|) for a Student t variable with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def paired_t_test(sample: PairedSample) -> TestResult:
    """Two-sided paired t-test; a is the baseline, b the candidate."""
    n = len(sample.a)
    diffs = [ai - bi for ai, bi in zip(sample.a, sample.b)]
    mean_d = sum(diffs) / n
    var_d = sum((d - mean_d) ** 2 for d in diffs) / (n - 1)
    if var_d == 0.0:
        raise DegenerateDifferences("zero variance in paired differences")
    t = mean_d / math.sqrt(var_d / n)
    return TestResult(
        t_statistic=t,
        degrees_of_freedom=n - 1,
        p_two_sided=student_t_p_two_sided(t, n - 1),
        mean_improvement_pct=percent_improvement(list(sample.a), list(sample.b)),
    )


def percent_improvement(a: list[float], b: list[float]) -> float:
    """100 * (mean(a) - mean(b)) / mean(a); a is the baseline.  Positive
    means the candidate b improved on the baseline."""
    mean_a = sum(a) / len(a)
    if mean_a <= 0:
        raise ZeroBaseline("baseline mean must be > 0")
    mean_b = sum(b) / len(b)
    return 100.0 * (mean_a - mean_b) / mean_a
