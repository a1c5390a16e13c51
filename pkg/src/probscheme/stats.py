"""Regression, Chebyshev's inequality and the weak law, all exact.

No sampling happens here: deviation probabilities are enumerated outcome by
outcome, so each inequality is a statement about two rationals.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Optional

from .core import (
    RandomVariable,
    covariance,
    expectation,
    format_rational,
    to_rational,
    variance,
)
from .errors import (
    CorrelatedInputs,
    DegenerateRegressor,
    DomainMismatch,
    EmptySequence,
    NonPositiveEpsilon,
    VarianceBoundViolated,
)


@dataclass(frozen=True)
class RegressionResult:
    """Orthogonal projection of Y onto ``span{1, X}``.

    ``r_squared`` is ``None`` when ``var Y == 0``; the ratio is undefined
    there.
    """

    slope: Fraction
    intercept: Fraction
    fitted: RandomVariable
    residual: RandomVariable
    var_fitted: Fraction
    var_residual: Fraction
    r_squared: Optional[Fraction]


def linear_regression(X: RandomVariable, Y: RandomVariable) -> RegressionResult:
    if X.domain != Y.domain:
        raise DomainMismatch("regressor and response live on different schemes")
    var_x = variance(X)
    if var_x == 0:
        raise DegenerateRegressor("var X = 0; the regressor is constant")
    cov_xy = covariance(X, Y)
    slope = cov_xy / var_x
    intercept = expectation(Y) - slope * expectation(X)
    fitted = slope * X + intercept
    residual = Y - fitted
    var_y = variance(Y)
    return RegressionResult(
        slope=slope,
        intercept=intercept,
        fitted=fitted,
        residual=residual,
        var_fitted=cov_xy * cov_xy / var_x,
        var_residual=variance(residual),
        r_squared=cov_xy * cov_xy / (var_x * var_y) if var_y else None,
    )


class ChebyshevCheck(NamedTuple):
    lhs: Fraction
    bound: Fraction


def _positive_eps(eps) -> Fraction:
    eps = to_rational(eps)
    if eps <= 0:
        raise NonPositiveEpsilon(f"epsilon must be positive, got {format_rational(eps)}")
    return eps


def deviation_probability(X: RandomVariable, center, eps) -> Fraction:
    """``Pr(|X − center| ≥ eps)`` by enumeration."""
    center = to_rational(center)
    eps = _positive_eps(eps)
    return sum((m for v, m in zip(X.values, X.domain.masses) if abs(v - center) >= eps), Fraction(0))


def chebyshev_check(X: RandomVariable, eps) -> ChebyshevCheck:
    """``(Pr(|X − E X| ≥ ε), var X / ε²)``; the first never exceeds the second."""
    eps = _positive_eps(eps)
    return ChebyshevCheck(deviation_probability(X, expectation(X), eps), variance(X) / eps**2)


@dataclass(frozen=True)
class WLLNCertificate:
    """Outcome of :func:`wlln_certificate`.

    ``var_mean`` is the variance of the sample mean computed directly;
    ``bound`` is ``K / (n ε²)``; ``deviation`` is the enumerated
    ``Pr(|X̄ − μ̄| ≥ ε)``.
    """

    var_mean: Fraction
    bound: Fraction
    deviation: Fraction

    def __iter__(self):
        # Unpacks as the (var_mean, bound) pair.
        return iter((self.var_mean, self.bound))


def wlln_certificate(Xs: Sequence[RandomVariable], K, eps) -> WLLNCertificate:
    """Certify the weak-law bound for pairwise-uncorrelated variables.

    Raises :class:`CorrelatedInputs` or :class:`VarianceBoundViolated` if
    the hypotheses fail; they are checked, not assumed.
    """
    Xs = list(Xs)
    if not Xs:
        raise EmptySequence("need at least one random variable")
    eps = _positive_eps(eps)
    K = to_rational(K)
    domain = Xs[0].domain
    if any(X.domain != domain for X in Xs):
        raise DomainMismatch("random variables live on different schemes")
    for (i, Xi), (j, Xj) in combinations(enumerate(Xs), 2):
        c = covariance(Xi, Xj)
        if c != 0:
            raise CorrelatedInputs(f"cov(X{i + 1}, X{j + 1}) = {format_rational(c)}")
    variances = [variance(X) for X in Xs]
    for i, v in enumerate(variances):
        if v > K:
            raise VarianceBoundViolated(f"var X{i + 1} = {format_rational(v)} exceeds K = {format_rational(K)}")
    n = len(Xs)
    mean = sum(Xs[1:], Xs[0]) * Fraction(1, n)
    var_mean = variance(mean)
    # Orthogonality of the centered summands forces this identity.
    assert var_mean == sum(variances, Fraction(0)) / n**2
    bound = K / (n * eps**2)
    deviation = deviation_probability(mean, expectation(mean), eps)
    assert deviation <= var_mean / eps**2 <= bound
    return WLLNCertificate(var_mean, bound, deviation)
