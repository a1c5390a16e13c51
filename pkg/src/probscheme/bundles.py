"""Bundles: probability-preserving surjections between schemes.

A bundle ``π: Ω → Ω′`` carries three linear maps on random variables:

* :func:`pullback` (``π♯``), precomposition ``Y ↦ Y∘π``;
* :func:`fiber_sum` (``π*``), summation over each fiber;
* :func:`fiber_average` (``π♭``), the fiberwise mean, built as
  ``m_{1/pr′} ∘ π* ∘ m_pr``.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Mapping
from fractions import Fraction

from .core import (
    POINT,
    RandomVariable,
    Scheme,
    as_label,
    format_label,
    format_rational,
    mass_variable,
    sorted_labels,
)
from .errors import (
    DomainMismatch,
    NotMeasurePreserving,
    NotSurjective,
    SchemeMismatch,
    UnknownLabel,
)


def _read_map(total: Scheme, mapping) -> tuple:
    if callable(mapping) and not isinstance(mapping, Mapping):
        return tuple(as_label(mapping(x)) for x in total.outcomes)
    normalized = {}
    for k, v in mapping.items():
        k = as_label(k)
        if k not in total:
            raise UnknownLabel(f"map is defined at {format_label(k)!r}, which is not a total outcome")
        normalized[k] = as_label(v)
    for x in total.outcomes:
        if x not in normalized:
            raise UnknownLabel(f"map is undefined at total outcome {format_label(x)!r}")
    return tuple(normalized[x] for x in total.outcomes)


class Bundle:
    """A probability-preserving map ``total → base``.

    Construction verifies surjectivity and that every fiber's mass equals the
    mass of the base point it lies over.  Use :func:`induced_bundle` when the
    base should be computed instead.
    """

    __slots__ = ("total", "base", "images", "_fibers")

    def __init__(self, total: Scheme, base: Scheme, mapping):
        images = _read_map(total, mapping)
        fibers = defaultdict(list)
        for x, y in zip(total.outcomes, images):
            if y not in base:
                raise UnknownLabel(f"{format_label(x)!r} maps to {format_label(y)!r}, which is not a base outcome")
            fibers[y].append(x)
        for y in base.outcomes:
            if y not in fibers:
                raise NotSurjective(f"base outcome {format_label(y)!r} has an empty fiber")
        for y, pm in base.items():
            fm = sum((total.mass(x) for x in fibers[y]), Fraction(0))
            if fm != pm:
                raise NotMeasurePreserving(
                    f"fiber over {format_label(y)!r} has mass {format_rational(fm)}, "
                    f"base mass is {format_rational(pm)}"
                )
        self.total = total
        self.base = base
        self.images = images
        self._fibers = {y: tuple(xs) for y, xs in fibers.items()}

    def __call__(self, label):
        return self.images[self.total.index(label)]

    def fiber(self, label) -> tuple:
        """Total outcomes over the base outcome *label*, in canonical order."""
        if label not in self.base:
            raise UnknownLabel(f"{label!r} is not a base outcome")
        return self._fibers[label]

    def as_dict(self) -> dict:
        return dict(zip(self.total.outcomes, self.images))

    def __eq__(self, other):
        if not isinstance(other, Bundle):
            return NotImplemented
        return self.total == other.total and self.base == other.base and self.images == other.images

    def __hash__(self):
        return hash((self.total, self.base, self.images))

    def __repr__(self):
        body = ", ".join(f"{format_label(x)}→{format_label(y)}" for x, y in self.as_dict().items())
        return f"Bundle({{{body}}})"


def make_bundle(total: Scheme, base: Scheme, mapping) -> Bundle:
    return Bundle(total, base, mapping)


def induced_bundle(total: Scheme, mapping: Mapping | Callable) -> Bundle:
    """Bundle induced by a surjection onto its range.

    Each range label gets the total mass of its preimage.
    """
    images = _read_map(total, mapping)
    mass = defaultdict(Fraction)
    for m, y in zip(total.masses, images):
        mass[y] += m
    labels = sorted_labels(mass)
    base = Scheme(labels, [mass[y] for y in labels])
    return Bundle(total, base, dict(zip(total.outcomes, images)))


def identity_bundle(scheme: Scheme) -> Bundle:
    return Bundle(scheme, scheme, {x: x for x in scheme.outcomes})


def terminal_bundle(scheme: Scheme) -> Bundle:
    """The unique bundle to the one-point scheme."""
    return induced_bundle(scheme, lambda x: POINT)


def compose(outer: Bundle, inner: Bundle) -> Bundle:
    """``outer ∘ inner``."""
    if inner.base != outer.total:
        raise SchemeMismatch("inner bundle's base is not the outer bundle's total scheme")
    return Bundle(inner.total, outer.base, {x: outer(y) for x, y in zip(inner.total.outcomes, inner.images)})


def fiber_scheme(pi: Bundle, label) -> Scheme:
    """The fiber over *label* with masses rescaled by ``1/pr′(label)``."""
    xs = pi.fiber(label)
    scale = pi.base.mass(label)
    return Scheme(xs, [pi.total.mass(x) / scale for x in xs])


def _check_domain(X: RandomVariable, scheme: Scheme, where: str):
    if X.domain != scheme:
        raise DomainMismatch(f"random variable does not live on the {where} scheme")


def pullback(pi: Bundle, Y: RandomVariable) -> RandomVariable:
    """``π♯Y = Y∘π``."""
    _check_domain(Y, pi.base, "base")
    return RandomVariable(pi.total, [Y(y) for y in pi.images])


def fiber_sum(pi: Bundle, X: RandomVariable) -> RandomVariable:
    """``(π*X)(ω′) = Σ_{ω ∈ π⁻¹(ω′)} X(ω)``."""
    _check_domain(X, pi.total, "total")
    sums = defaultdict(Fraction)
    for y, v in zip(pi.images, X.values):
        sums[y] += v
    return RandomVariable(pi.base, [sums[y] for y in pi.base.outcomes])


def fiber_average(pi: Bundle, X: RandomVariable) -> RandomVariable:
    """``π♭X = π*(X·pr) / pr′``, the expectation of X on each fiber scheme."""
    _check_domain(X, pi.total, "total")
    weighted = fiber_sum(pi, X * mass_variable(pi.total))
    return weighted * mass_variable(pi.base).map(lambda m: 1 / m)
