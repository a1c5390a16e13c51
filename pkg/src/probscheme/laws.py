"""Invariant suite run by the ``laws-check`` command.

Given whatever random variables, partitions and bundles the user supplies,
evaluate every applicable identity exactly and report each as a
:class:`LawResult`.  Failures carry a witness: the first outcome where the
two sides differ, or the two differing scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any

from .algebras import (
    Partition,
    algebra_contains,
    atom_indicator,
    bundle_to_partition,
    discrete_partition,
    partition_from_functions,
    partition_to_bundle,
    refines,
    trivial_partition,
)
from .bundles import Bundle, fiber_average, fiber_scheme, fiber_sum, pullback
from .condexp import (
    check_total_expectation,
    cond_expectation,
    cond_variance,
    total_covariance_decomposition,
    total_probability_sides,
    variance_components,
)
from .core import (
    Event,
    RandomFunction,
    RandomVariable,
    expectation,
    format_label,
    inner_product,
    mass_variable,
    variance,
)
from .errors import ProbSchemeError
from .stats import chebyshev_check, linear_regression


@dataclass(frozen=True)
class LawResult:
    name: str
    holds: bool
    witness: Any = None


def _eq(name, lhs, rhs) -> LawResult:
    if isinstance(lhs, RandomVariable):
        for x, a, b in zip(lhs.domain.outcomes, lhs.values, rhs.values):
            if a != b:
                return LawResult(name, False, {"point": x, "lhs": a, "rhs": b})
        return LawResult(name, True)
    if lhs == rhs:
        return LawResult(name, True)
    return LawResult(name, False, {"lhs": lhs, "rhs": rhs})


def _index_variable(scheme, offset=1) -> RandomVariable:
    return RandomVariable(scheme, [Fraction(i + offset) for i in range(len(scheme))])


def variable_laws(X: RandomVariable, Y: RandomVariable, tag: str) -> list[LawResult]:
    out = [
        _eq(f"{tag}linearity", expectation(2 * X - 3 * Y), 2 * expectation(X) - 3 * expectation(Y)),
        LawResult(f"{tag}inner-product-positive",
                  inner_product(X, X) > 0 or (inner_product(X, X) == 0 and X.is_zero())),
    ]
    if variance(X) > 0:
        r = linear_regression(X, Y)
        one = RandomVariable.constant(X.domain, 1)
        out += [
            _eq(f"{tag}regression-residual-orthogonal-to-1", inner_product(r.residual, one), Fraction(0)),
            _eq(f"{tag}regression-residual-orthogonal-to-X", inner_product(r.residual, X), Fraction(0)),
            _eq(f"{tag}regression-pythagoras", variance(Y), r.var_residual + r.var_fitted),
            LawResult(f"{tag}regression-r-squared-in-unit-interval",
                      r.r_squared is None or 0 <= r.r_squared <= 1, r.r_squared),
        ]
        if len(set(X.values)) == 2:
            out.append(_eq(f"{tag}regression-two-point-agreement", r.fitted,
                           cond_expectation(Y, partition_from_functions([X]))))
    for eps in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        c = chebyshev_check(X, eps)
        out.append(LawResult(f"{tag}chebyshev[eps={eps}]", c.lhs <= c.bound, {"lhs": c.lhs, "bound": c.bound}))
    return out


def partition_laws(X: RandomVariable, Y: RandomVariable, P: Partition, tag: str) -> list[LawResult]:
    E = cond_expectation
    EX = E(X, P)
    Z = E(Y, P)  # an element of the algebra
    out = [
        _eq(f"{tag}idempotent", E(EX, P), EX),
        _eq(f"{tag}self-adjoint", inner_product(EX, Y), inner_product(X, E(Y, P))),
        _eq(f"{tag}identity-on-algebra", E(Z, P), Z),
        _eq(f"{tag}algebra-linear", E(Z * X, P), Z * EX),
        LawResult(f"{tag}result-in-algebra", algebra_contains(P, EX)),
        _eq(f"{tag}base-expectation", expectation(fiber_average(partition_to_bundle(P), X)), expectation(X)),
        _eq(f"{tag}total-variance",
            variance(X), expectation(cond_variance(X, P)) + variance(EX)),
    ]
    for block in P.blocks:
        one = atom_indicator(P, block)
        out.append(_eq(f"{tag}residual-orthogonal[{format_label(block[0])}]", inner_product(X - EX, one), Fraction(0)))
    labels = RandomFunction(P.domain, lambda x: P.block_of(x)[0])
    out.append(LawResult(f"{tag}total-expectation", check_total_expectation(Y, labels)))
    mean = expectation(X)
    B = Event(P.domain, [x for x, v in X.items() if v >= mean])
    out.append(_eq(f"{tag}total-probability", *total_probability_sides(B, P)))
    out.append(_eq(f"{tag}total-covariance",
                   *total_covariance_decomposition(X, Y, P, trivial_partition(P.domain))))
    try:
        vc = variance_components(X, P)
    except ProbSchemeError:
        pass
    else:
        out.append(_eq(f"{tag}components-of-variance", vc.tss, vc.wss + vc.bss))
    return out


def refinement_laws(X, Y, fine: Partition, coarse: Partition, tag: str) -> list[LawResult]:
    E = cond_expectation
    return [
        _eq(f"{tag}tower", E(E(X, fine), coarse), E(X, coarse)),
        _eq(f"{tag}total-covariance", *total_covariance_decomposition(X, Y, fine, coarse)),
    ]


def bundle_laws(pi: Bundle, X: RandomVariable | None, Z: RandomVariable | None, tag: str) -> list[LawResult]:
    X = X if X is not None else _index_variable(pi.total)
    Z = Z if Z is not None else _index_variable(pi.base, offset=2)
    out = [
        _eq(f"{tag}section", fiber_average(pi, pullback(pi, Z)), Z),
        _eq(f"{tag}pullback-preserves-expectation", expectation(pullback(pi, Z)), expectation(Z)),
        _eq(f"{tag}average-preserves-expectation", expectation(fiber_average(pi, X)), expectation(X)),
        _eq(f"{tag}module-map", fiber_average(pi, pullback(pi, Z) * X), Z * fiber_average(pi, X)),
        _eq(f"{tag}projection-formula", fiber_sum(pi, pullback(pi, Z) * X), Z * fiber_sum(pi, X)),
        _eq(f"{tag}mass-pushforward", fiber_sum(pi, mass_variable(pi.total)), mass_variable(pi.base)),
    ]
    try:
        for y in pi.base.outcomes:
            fiber_scheme(pi, y)
        out.append(LawResult(f"{tag}fiber-schemes-valid", True))
    except ProbSchemeError as e:
        out.append(LawResult(f"{tag}fiber-schemes-valid", False, str(e)))
    P = bundle_to_partition(pi)
    out.append(LawResult(f"{tag}partition-round-trip", bundle_to_partition(partition_to_bundle(P)) == P))
    return out


def run_laws(rvs=(), partitions=(), bundles=(), rfs=()) -> list[LawResult]:
    """Evaluate every applicable law on the supplied inputs."""
    results: list[LawResult] = []
    rvs = list(rvs)
    partitions = list(partitions)
    for f in rfs:
        partitions.append(partition_from_functions([f]))
    schemes = []
    for d in [v.domain for v in rvs] + [p.domain for p in partitions]:
        if d not in schemes:
            schemes.append(d)
    for s_index, scheme in enumerate(schemes):
        vs = [v for v in rvs if v.domain == scheme]
        X = vs[0] if vs else _index_variable(scheme)
        Y = vs[1] if len(vs) > 1 else X * X
        tag = f"scheme{s_index}:" if len(schemes) > 1 else ""
        results += variable_laws(X, Y, tag)
        ps = [trivial_partition(scheme), discrete_partition(scheme)]
        ps += [p for p in partitions if p.domain == scheme and p not in ps]
        for i, P in enumerate(ps):
            results += partition_laws(X, Y, P, f"{tag}partition{i}:")
        for (i, P), (j, Q) in combinations(enumerate(ps), 2):
            if refines(P, Q):
                results += refinement_laws(X, Y, P, Q, f"{tag}partition{i}<{j}:")
            elif refines(Q, P):
                results += refinement_laws(X, Y, Q, P, f"{tag}partition{j}<{i}:")
    for k, pi in enumerate(bundles):
        X = next((v for v in rvs if v.domain == pi.total), None)
        Z = next((v for v in rvs if v.domain == pi.base), None)
        results += bundle_laws(pi, X, Z, f"bundle{k}:")
    return results
