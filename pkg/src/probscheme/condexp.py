"""Conditional expectation relative to a partition, and the total laws.

``E_P = π♯ ∘ π♭`` for the quotient bundle ``π`` of ``P``: average over each
block, then spread the average back over the block.  This is the orthogonal
projection onto the random variables constant on the blocks.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from typing import NamedTuple

from .algebras import Partition, partition_to_bundle, refines
from .bundles import fiber_average, pullback
from .core import (
    Event,
    RandomVariable,
    as_random_function,
    distribution_scheme,
    expectation,
    format_rational,
    probability,
    to_rational,
)
from .errors import (
    DomainMismatch,
    EmptyConditioningEvent,
    IncompleteTable,
    NonUniformScheme,
    NotARefinement,
    UnequalBlockSizes,
)


def _check(P: Partition, *Xs):
    for X in Xs:
        if X.domain != P.domain:
            raise DomainMismatch("random variable and partition live on different schemes")


def cond_expectation(X: RandomVariable, P: Partition) -> RandomVariable:
    """``E(X | P)``, constant on each block with value the block mean of X."""
    _check(P, X)
    pi = partition_to_bundle(P)
    return pullback(pi, fiber_average(pi, X))


def cond_probability(B: Event, A: Event) -> Fraction:
    """``Pr(B | A) = Pr(B ∩ A) / Pr(A)``."""
    if B.domain != A.domain:
        raise DomainMismatch("events live on different schemes")
    if not A:
        raise EmptyConditioningEvent("cannot condition on the empty event")
    return probability(B & A) / probability(A)


def cond_covariance(X: RandomVariable, Y: RandomVariable, P: Partition) -> RandomVariable:
    """``E_P((X − E_P X)(Y − E_P Y))``."""
    _check(P, X, Y)
    return cond_expectation((X - cond_expectation(X, P)) * (Y - cond_expectation(Y, P)), P)


def cond_variance(X: RandomVariable, P: Partition) -> RandomVariable:
    return cond_covariance(X, X, P)


def total_expectation_sides(Y: RandomVariable, X) -> tuple[Fraction, Fraction]:
    """``(E Y, Σ_x E(Y | X=x) Pr(X=x))`` with the right side taken on ``[X]``.

    The conditional means come from averaging Y over the fibers of
    ``Ω → [X]``; the outer sum is the expectation on the base scheme.
    """
    f = as_random_function(X)
    if f.domain != Y.domain:
        raise DomainMismatch("random variable and conditioning function live on different schemes")
    _, pi = distribution_scheme(f)
    return expectation(Y), expectation(fiber_average(pi, Y))


def check_total_expectation(Y: RandomVariable, X) -> bool:
    """Law of total expectation, checked exactly."""
    lhs, rhs = total_expectation_sides(Y, X)
    return lhs == rhs


def total_probability_sides(B: Event, P: Partition) -> tuple[Fraction, Fraction]:
    """``(Pr B, Σ_i Pr(B | A_i) Pr(A_i))`` over the blocks ``A_i`` of P."""
    if B.domain != P.domain:
        raise DomainMismatch("event and partition live on different schemes")
    rhs = Fraction(0)
    for block in P.blocks:
        A = Event(P.domain, block)
        rhs += cond_probability(B, A) * probability(A)
    return probability(B), rhs


def check_total_probability(B: Event, P: Partition) -> bool:
    lhs, rhs = total_probability_sides(B, P)
    return lhs == rhs


def lotus(table: Mapping, X: RandomVariable) -> Fraction:
    """``Σ_x f(x) Pr(X = x)`` for f given as a finite table over X's range."""
    f = {to_rational(k): to_rational(v) for k, v in table.items()}
    mass = {}
    for v, m in zip(X.values, X.domain.masses):
        mass[v] = mass.get(v, Fraction(0)) + m
    missing = [v for v in mass if v not in f]
    if missing:
        raise IncompleteTable(f"table has no entry for the value {format_rational(min(missing))}")
    return sum((f[v] * m for v, m in mass.items()), Fraction(0))


class CovarianceSides(NamedTuple):
    lhs: RandomVariable
    rhs: RandomVariable


def total_covariance_decomposition(
    X: RandomVariable, Y: RandomVariable, fine: Partition, coarse: Partition
) -> CovarianceSides:
    """Both sides of the law of total covariance.

    ``lhs = cov_coarse(X, Y)`` and
    ``rhs = E_coarse(cov_fine(X, Y)) + cov_coarse(E_fine X, E_fine Y)``.
    """
    _check(fine, X, Y)
    _check(coarse, X, Y)
    if not refines(fine, coarse):
        raise NotARefinement("the fine partition does not refine the coarse one")
    lhs = cond_covariance(X, Y, coarse)
    rhs = cond_expectation(cond_covariance(X, Y, fine), coarse) + cond_covariance(
        cond_expectation(X, fine), cond_expectation(Y, fine), coarse
    )
    return CovarianceSides(lhs, rhs)


class VarianceComponents(NamedTuple):
    tss: Fraction
    wss: Fraction
    bss: Fraction


def variance_components(X: RandomVariable, P: Partition) -> VarianceComponents:
    """Total, within-group and between-group sums of squares.

    Only for a uniform scheme split into groups of equal size ``n``;
    then ``tss == wss + bss`` with ``bss = n Σ_A (E(X|A) − E X)²``.
    """
    _check(P, X)
    if not P.domain.is_uniform:
        raise NonUniformScheme("variance components need a uniform scheme")
    sizes = {len(b) for b in P.blocks}
    if len(sizes) != 1:
        raise UnequalBlockSizes(f"groups have sizes {sorted(sizes)}")
    (n,) = sizes
    mean = expectation(X)
    group_mean = cond_expectation(X, P)
    tss = sum(((v - mean) ** 2 for v in X.values), Fraction(0))
    wss = sum(((v - g) ** 2 for v, g in zip(X.values, group_mean.values)), Fraction(0))
    bss = n * sum(((group_mean(b[0]) - mean) ** 2 for b in P.blocks), Fraction(0))
    return VarianceComponents(tss, wss, bss)

