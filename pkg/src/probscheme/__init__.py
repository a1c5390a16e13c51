"""Exact finite probability schemes, bundles and their calculus."""

from .algebras import (
    Partition,
    algebra_contains,
    atom_indicator,
    bundle_to_partition,
    common_refinement,
    discrete_partition,
    factor_through,
    partition_from_functions,
    partition_to_bundle,
    refines,
    trivial_partition,
)
from .bundles import (
    Bundle,
    compose,
    fiber_average,
    fiber_scheme,
    fiber_sum,
    identity_bundle,
    induced_bundle,
    make_bundle,
    pullback,
    terminal_bundle,
)
from .condexp import (
    check_total_expectation,
    check_total_probability,
    cond_covariance,
    cond_expectation,
    cond_probability,
    cond_variance,
    lotus,
    total_covariance_decomposition,
    variance_components,
)
from .core import (
    POINT,
    Event,
    RandomFunction,
    RandomVariable,
    Scheme,
    constant,
    coordinate,
    covariance,
    die,
    distribution_scheme,
    expectation,
    indicator,
    inner_product,
    joint,
    make_scheme,
    mass_variable,
    point_scheme,
    probability,
    product_scheme,
    uniform_scheme,
    variance,
)
from .fiberprod import (
    FiberProduct,
    SchemeIso,
    Verdict,
    assoc_rebracket,
    base_change_check,
    check_scheme_iso,
    cond_independent,
    fiber_product,
    markov_build,
    markov_verify,
    mass_multiset,
    zip_up,
)
from .stats import RegressionResult, chebyshev_check, linear_regression, wlln_certificate

__version__ = "0.1.0"
