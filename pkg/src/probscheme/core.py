"""Exact scalars, outcome labels, schemes, random functions and events.

A *scheme* is a finite set of outcome labels with strictly positive rational
masses summing to one.  Random variables are rational-valued functions on a
scheme; random functions take outcome labels as values.  Everything here is
immutable and every number is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from functools import cached_property
from itertools import product as _cartesian
from numbers import Rational
from typing import Union

from .errors import (
    DomainMismatch,
    DuplicateLabel,
    EmptySequence,
    EmptySupport,
    InexactScalar,
    InvalidLabel,
    MassNotNormalized,
    NonPositiveMass,
    UnknownLabel,
)

Label = Union[str, tuple]
Scalar = Union[int, Fraction, str]

#: Characters reserved for the textual tuple syntax ``<a,b>``.
TUPLE_DELIMITERS = frozenset("<>,")

#: Label of the one-point (terminal) scheme.
POINT = "•"

_RATIONAL_RE = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*")


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def to_rational(value) -> Fraction:
    """Coerce *value* to an exact :class:`Fraction`.

    Integers, fractions and strings of the form ``"p"`` or ``"p/q"`` are
    accepted.  Floats are refused outright: there is no exact reading of
    ``0.1``.
    """
    if isinstance(value, bool):
        raise InexactScalar(f"booleans are not scalars: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        m = _RATIONAL_RE.fullmatch(value)
        if m is None:
            raise InexactScalar(f"not an exact rational: {value!r}")
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise InexactScalar(f"zero denominator: {value!r}")
        return Fraction(int(num), int(den) if den is not None else 1)
    raise InexactScalar(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Render ``q`` as ``"p"`` or ``"p/q"`` (always reduced)."""
    q = to_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------

def as_label(value) -> Label:
    """Normalize *value* to an outcome label.

    Strings are atomic labels; ints and rationals are rendered as text; lists
    and tuples become tuple labels (arity at least two).
    """
    if isinstance(value, str):
        if not value:
            raise InvalidLabel("atomic labels must be non-empty")
        if TUPLE_DELIMITERS.intersection(value):
            raise InvalidLabel(f"label {value!r} contains a reserved character (one of '<', '>', ',')")
        return value
    if isinstance(value, bool):
        raise InvalidLabel(f"booleans are not labels: {value!r}")
    if isinstance(value, Rational):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        if len(value) < 2:
            raise InvalidLabel(f"tuple labels need arity >= 2, got {value!r}")
        return tuple(as_label(v) for v in value)
    raise InvalidLabel(f"cannot use {value!r} as an outcome label")


def label_key(label: Label):
    """Sort key realizing the total order on labels.

    Atomic labels compare lexicographically, tuples componentwise, and every
    atomic label precedes every tuple.
    """
    if isinstance(label, tuple):
        return (1, tuple(label_key(x) for x in label))
    return (0, label)


def sorted_labels(labels: Iterable[Label]) -> list:
    return sorted(labels, key=label_key)


def format_label(label: Label) -> str:
    """Text form of a label: atomic labels verbatim, tuples as ``<a,b>``."""
    if isinstance(label, tuple):
        return "<" + ",".join(format_label(x) for x in label) + ">"
    return label


def parse_label(text: str) -> Label:
    """Inverse of :func:`format_label`."""
    label, pos = _parse_label_at(text, 0)
    if pos != len(text):
        raise InvalidLabel(f"trailing text in label {text!r} at offset {pos}")
    return label


def _parse_label_at(text, pos):
    if pos < len(text) and text[pos] == "<":
        items = []
        pos += 1
        while True:
            item, pos = _parse_label_at(text, pos)
            items.append(item)
            if pos >= len(text):
                raise InvalidLabel(f"unterminated tuple in {text!r}")
            if text[pos] == ",":
                pos += 1
                continue
            if text[pos] == ">":
                return as_label(tuple(items)), pos + 1
            raise InvalidLabel(f"unexpected {text[pos]!r} in {text!r}")
    end = pos
    while end < len(text) and text[end] not in TUPLE_DELIMITERS:
        end += 1
    return as_label(text[pos:end]), end


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------

class Scheme:
    """A finite probability scheme.

    Outcomes are kept sorted by :func:`label_key`; equality is label-wise.

    >>> coin = Scheme(["T", "H"], [Fraction(1, 2), Fraction(1, 2)])
    >>> coin.outcomes
    ('H', 'T')
    """

    def __init__(self, outcomes: Sequence, masses: Sequence):
        labels = [as_label(x) for x in outcomes]
        masses = [to_rational(m) for m in masses]
        if len(labels) != len(masses):
            raise ValueError(f"{len(labels)} outcomes but {len(masses)} masses")
        if not labels:
            raise EmptySupport("a scheme needs at least one outcome")
        seen = set()
        for x in labels:
            if x in seen:
                raise DuplicateLabel(f"duplicate outcome label {format_label(x)!r}")
            seen.add(x)
        for x, m in zip(labels, masses):
            if m <= 0:
                raise NonPositiveMass(f"mass of {format_label(x)!r} is {format_rational(m)}, must be > 0")
        total = sum(masses, Fraction(0))
        if total != 1:
            raise MassNotNormalized(f"masses sum to {format_rational(total)}, not 1")
        pairs = sorted(zip(labels, masses), key=lambda p: label_key(p[0]))
        self._outcomes = tuple(p[0] for p in pairs)
        self._masses = tuple(p[1] for p in pairs)
        self._index = {x: i for i, x in enumerate(self._outcomes)}

    @classmethod
    def from_mapping(cls, mass: Mapping) -> Scheme:
        return cls(list(mass.keys()), list(mass.values()))

    @property
    def outcomes(self) -> tuple:
        return self._outcomes

    @property
    def masses(self) -> tuple:
        return self._masses

    def mass(self, label) -> Fraction:
        return self._masses[self.index(label)]

    def index(self, label) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownLabel(f"{label!r} is not an outcome of this scheme") from None

    def items(self):
        return zip(self._outcomes, self._masses)

    def as_dict(self) -> dict:
        return dict(self.items())

    def __len__(self):
        return len(self._outcomes)

    def __iter__(self) -> Iterator:
        return iter(self._outcomes)

    def __contains__(self, label):
        try:
            return label in self._index
        except TypeError:
            return False

    def __eq__(self, other):
        if not isinstance(other, Scheme):
            return NotImplemented
        return self is other or (self._outcomes == other._outcomes and self._masses == other._masses)

    def __hash__(self):
        return hash((self._outcomes, self._masses))

    def __repr__(self):
        body = ", ".join(f"{format_label(x)}: {format_rational(m)}" for x, m in self.items())
        return f"Scheme({{{body}}})"

    @cached_property
    def is_uniform(self) -> bool:
        return all(m == self._masses[0] for m in self._masses)


def make_scheme(outcomes: Sequence, masses: Sequence) -> Scheme:
    """Build a canonical scheme, validating positivity and normalization."""
    return Scheme(outcomes, masses)


def uniform_scheme(labels: Iterable) -> Scheme:
    """The uniform scheme on *labels*; ``uniform_scheme(range(1, 7))`` is the fair die."""
    labels = list(labels)
    if not labels:
        raise EmptySupport("the uniform scheme needs a non-empty label set")
    return Scheme(labels, [Fraction(1, len(labels))] * len(labels))


def die(n: int) -> Scheme:
    """Uniform scheme on the labels ``"1"`` .. ``str(n)``."""
    return uniform_scheme(range(1, n + 1))


def point_scheme() -> Scheme:
    return Scheme([POINT], [1])


def product_scheme(*schemes: Scheme) -> Scheme:
    """Independent product; outcomes are flat tuples, masses multiply."""
    if len(schemes) < 2:
        raise EmptySequence("product_scheme needs at least two factors")
    outcomes, masses = [], []
    for combo in _cartesian(*(s.items() for s in schemes)):
        outcomes.append(tuple(x for x, _ in combo))
        m = Fraction(1)
        for _, q in combo:
            m *= q
        masses.append(m)
    return Scheme(outcomes, masses)


def mass_variable(scheme: Scheme) -> RandomVariable:
    """The distribution ``pr`` itself, read as a random variable."""
    return RandomVariable(scheme, scheme.masses)


# ---------------------------------------------------------------------------
# random functions and variables
# ---------------------------------------------------------------------------

def _aligned(domain: Scheme, values, convert, what):
    if isinstance(values, Mapping):
        out = []
        keys = set()
        for k in values:
            k = as_label(k)
            if k not in domain:
                raise UnknownLabel(f"{what} given at {format_label(k)!r}, which is not an outcome")
            keys.add(k)
        normalized = {as_label(k): v for k, v in values.items()}
        missing = [x for x in domain.outcomes if x not in keys]
        if missing:
            raise DomainMismatch(f"{what} missing at {format_label(missing[0])!r}")
        for x in domain.outcomes:
            out.append(convert(normalized[x]))
        return tuple(out)
    if callable(values):
        return tuple(convert(values(x)) for x in domain.outcomes)
    values = list(values)
    if len(values) != len(domain):
        raise DomainMismatch(f"{len(values)} values for a scheme with {len(domain)} outcomes")
    return tuple(convert(v) for v in values)


class RandomFunction:
    """A label-valued function on a scheme.

    ``values`` may be a mapping from outcomes, a sequence aligned with
    ``domain.outcomes``, or a callable applied to each outcome label.
    """

    __slots__ = ("domain", "values")

    def __init__(self, domain: Scheme, values):
        self.domain = domain
        self.values = _aligned(domain, values, as_label, "value")

    def __call__(self, label):
        return self.values[self.domain.index(label)]

    __getitem__ = __call__

    def items(self):
        return zip(self.domain.outcomes, self.values)

    def as_dict(self) -> dict:
        return dict(self.items())

    def range(self) -> list:
        return sorted_labels(set(self.values))

    def __eq__(self, other):
        if not isinstance(other, RandomFunction):
            return NotImplemented
        return self.domain == other.domain and self.values == other.values

    def __hash__(self):
        return hash((self.domain, self.values))

    def __repr__(self):
        body = ", ".join(f"{format_label(x)}: {format_label(v)}" for x, v in self.items())
        return f"RandomFunction({{{body}}})"


class RandomVariable:
    """A rational-valued function on a scheme.

    Supports pointwise ``+ - * /`` and integer powers; plain scalars are
    promoted to constants on the same scheme.
    """

    __slots__ = ("domain", "values")

    def __init__(self, domain: Scheme, values):
        self.domain = domain
        self.values = _aligned(domain, values, to_rational, "value")

    @classmethod
    def constant(cls, domain: Scheme, c) -> RandomVariable:
        c = to_rational(c)
        return cls(domain, [c] * len(domain))

    @classmethod
    def from_labels(cls, domain: Scheme) -> RandomVariable:
        """``X(ω) = ω`` for schemes whose labels read as rationals."""
        return cls(domain, lambda x: to_rational(x))

    def __call__(self, label) -> Fraction:
        return self.values[self.domain.index(label)]

    __getitem__ = __call__

    def items(self):
        return zip(self.domain.outcomes, self.values)

    def as_dict(self) -> dict:
        return dict(self.items())

    def map(self, f: Callable) -> RandomVariable:
        return RandomVariable(self.domain, [f(v) for v in self.values])

    def as_function(self) -> RandomFunction:
        return RandomFunction(self.domain, [format_rational(v) for v in self.values])

    # -- arithmetic --

    def _other(self, other):
        if isinstance(other, RandomVariable):
            if other.domain != self.domain:
                raise DomainMismatch("random variables live on different schemes")
            return other.values
        return (to_rational(other),) * len(self.values)

    def _zip(self, other, op):
        rhs = self._other(other)
        return RandomVariable(self.domain, [op(a, b) for a, b in zip(self.values, rhs)])

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._zip(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._zip(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._zip(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._zip(other, lambda a, b: b / a)

    def __neg__(self):
        return RandomVariable(self.domain, [-v for v in self.values])

    def __pow__(self, k: int):
        return RandomVariable(self.domain, [v ** k for v in self.values])

    def __abs__(self):
        return RandomVariable(self.domain, [abs(v) for v in self.values])

    def is_zero(self) -> bool:
        return not any(self.values)

    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def __eq__(self, other):
        if not isinstance(other, RandomVariable):
            return NotImplemented
        return self.domain == other.domain and self.values == other.values

    def __hash__(self):
        return hash((self.domain, self.values))

    def __repr__(self):
        body = ", ".join(f"{format_label(x)}: {format_rational(v)}" for x, v in self.items())
        return f"RandomVariable({{{body}}})"


def as_random_function(X) -> RandomFunction:
    """Random variables are random functions whose values print as rationals."""
    if isinstance(X, RandomFunction):
        return X
    if isinstance(X, RandomVariable):
        return X.as_function()
    raise TypeError(f"expected a random function, got {type(X).__name__}")


def constant(domain: Scheme, c) -> RandomVariable:
    return RandomVariable.constant(domain, c)


def coordinate(domain: Scheme, i: int) -> RandomFunction:
    """Projection of tuple-labelled outcomes onto component *i*."""
    return RandomFunction(domain, lambda x: x[i])


def _same_domain(*vs):
    d = vs[0].domain
    for v in vs[1:]:
        if v.domain != d:
            raise DomainMismatch("arguments live on different schemes")
    return d


# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------

class Event:
    """A subset of a scheme's outcomes."""

    __slots__ = ("domain", "members")

    def __init__(self, domain: Scheme, members: Iterable):
        members = frozenset(as_label(m) for m in members)
        for m in members:
            if m not in domain:
                raise UnknownLabel(f"{format_label(m)!r} is not an outcome")
        self.domain = domain
        self.members = members

    def __and__(self, other: Event) -> Event:
        _same_domain(self, other)
        return Event(self.domain, self.members & other.members)

    def __or__(self, other: Event) -> Event:
        _same_domain(self, other)
        return Event(self.domain, self.members | other.members)

    def complement(self) -> Event:
        return Event(self.domain, set(self.domain.outcomes) - self.members)

    def __contains__(self, label):
        return label in self.members

    def __len__(self):
        return len(self.members)

    def __bool__(self):
        return bool(self.members)

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.domain == other.domain and self.members == other.members

    def __hash__(self):
        return hash((self.domain, self.members))

    def __repr__(self):
        return "Event({" + ", ".join(format_label(x) for x in sorted_labels(self.members)) + "})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def expectation(X: RandomVariable) -> Fraction:
    """``Σ X(ω) pr(ω)``."""
    return sum((v * m for v, m in zip(X.values, X.domain.masses)), Fraction(0))


def inner_product(X: RandomVariable, Y: RandomVariable) -> Fraction:
    """``E(XY)``; an inner product because all masses are positive."""
    _same_domain(X, Y)
    return sum((a * b * m for a, b, m in zip(X.values, Y.values, X.domain.masses)), Fraction(0))


def indicator(A: Event) -> RandomVariable:
    return RandomVariable(A.domain, [Fraction(int(x in A.members)) for x in A.domain.outcomes])


def probability(A: Event) -> Fraction:
    return expectation(indicator(A))


def covariance(X: RandomVariable, Y: RandomVariable) -> Fraction:
    _same_domain(X, Y)
    return inner_product(X - expectation(X), Y - expectation(Y))


def variance(X: RandomVariable) -> Fraction:
    return covariance(X, X)


def level_set(X, value) -> Event:
    """The event ``{X = value}``."""
    if isinstance(X, RandomVariable):
        value = to_rational(value)
    else:
        value = as_label(value)
    return Event(X.domain, [x for x, v in X.items() if v == value])


def joint(Xs: Sequence) -> RandomFunction | RandomVariable:
    """``ω ↦ ⟨X₁(ω), …, Xₙ(ω)⟩``; a single argument is returned unchanged."""
    Xs = list(Xs)
    if not Xs:
        raise EmptySequence("joint of an empty sequence")
    if len(Xs) == 1:
        return Xs[0]
    domain = _same_domain(*Xs)
    fs = [as_random_function(X) for X in Xs]
    return RandomFunction(domain, list(zip(*(f.values for f in fs))))


def distribution_scheme(X):
    """The scheme ``[X]`` on the range of *X* and the bundle ``Ω → [X]``.

    Returns ``(scheme, bundle)``; only attained values appear, so every base
    mass is positive.
    """
    from .bundles import induced_bundle

    f = as_random_function(X)
    bundle = induced_bundle(f.domain, f.as_dict())
    return bundle.base, bundle
