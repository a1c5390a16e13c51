"""Partitions as the canonical form of subalgebras of random variables.

A unital subalgebra of ``ℝ^Ω`` is determined by its atoms, the blocks of
the partition of outcomes it cannot tell apart; the same blocks are the
fibers of the associated bundle.  Only the partition is stored.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Sequence
from fractions import Fraction

from .bundles import Bundle, induced_bundle
from .core import (
    RandomVariable,
    Scheme,
    as_label,
    as_random_function,
    format_label,
    label_key,
    sorted_labels,
)
from .errors import DomainMismatch, EmptySequence, InvalidPartition, NotARefinement, UnknownBlock, UnknownLabel


class Partition:
    """A partition of a scheme's outcomes into non-empty blocks.

    Blocks are stored sorted, and ordered by their least element.
    """

    __slots__ = ("domain", "blocks", "_block_of")

    def __init__(self, domain: Scheme, blocks: Iterable[Iterable]):
        canon = []
        owner = {}
        for i, block in enumerate(blocks):
            labels = sorted_labels({as_label(x) for x in block})
            if not labels:
                raise InvalidPartition("blocks must be non-empty")
            for x in labels:
                if x not in domain:
                    raise UnknownLabel(f"{format_label(x)!r} is not an outcome of the scheme")
                if x in owner:
                    raise InvalidPartition(f"{format_label(x)!r} appears in more than one block")
                owner[x] = True
            canon.append(tuple(labels))
        missing = [x for x in domain.outcomes if x not in owner]
        if missing:
            raise InvalidPartition(f"{format_label(missing[0])!r} is not covered by any block")
        canon.sort(key=lambda b: label_key(b[0]))
        self.domain = domain
        self.blocks = tuple(canon)
        self._block_of = {x: b for b in self.blocks for x in b}

    def block_of(self, label) -> tuple:
        try:
            return self._block_of[label]
        except KeyError:
            raise UnknownLabel(f"{label!r} is not an outcome") from None

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.domain == other.domain and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.domain, self.blocks))

    def __repr__(self):
        inner = " | ".join(" ".join(format_label(x) for x in b) for b in self.blocks)
        return f"Partition({inner})"


def discrete_partition(scheme: Scheme) -> Partition:
    """All singletons: the algebra of every random variable."""
    return Partition(scheme, [[x] for x in scheme.outcomes])


def trivial_partition(scheme: Scheme) -> Partition:
    """One block: the algebra of constants."""
    return Partition(scheme, [scheme.outcomes])


def _check_same(P: Partition, scheme: Scheme):
    if P.domain != scheme:
        raise DomainMismatch("partition and argument live on different schemes")


def partition_from_functions(Xs: Sequence, scheme: Scheme | None = None) -> Partition:
    """Joint level sets of *Xs*, i.e. the atoms of the algebra they generate.

    With no functions the result is the single-block partition of *scheme*.
    """
    Xs = [as_random_function(X) for X in Xs]
    if not Xs:
        if scheme is None:
            raise EmptySequence("an empty sequence needs an explicit scheme")
        return trivial_partition(scheme)
    domain = scheme if scheme is not None else Xs[0].domain
    for X in Xs:
        if X.domain != domain:
            raise DomainMismatch("random functions live on different schemes")
    groups = defaultdict(list)
    for i, x in enumerate(domain.outcomes):
        groups[tuple(X.values[i] for X in Xs)].append(x)
    return Partition(domain, groups.values())


def partition_to_bundle(P: Partition) -> Bundle:
    """Quotient bundle; each block is labelled by its least outcome."""
    return induced_bundle(P.domain, {x: b[0] for b in P.blocks for x in b})


def bundle_to_partition(pi: Bundle) -> Partition:
    return Partition(pi.total, [pi.fiber(y) for y in pi.base.outcomes])


def algebra_contains(P: Partition, X) -> bool:
    """Whether *X* is constant on every block of *P*."""
    _check_same(P, X.domain)
    for block in P.blocks:
        first = X(block[0])
        if any(X(x) != first for x in block[1:]):
            return False
    return True


def atom_indicator(P: Partition, block: Iterable) -> RandomVariable:
    labels = tuple(sorted_labels(as_label(x) for x in block))
    if labels not in P.blocks:
        raise UnknownBlock(f"{[format_label(x) for x in labels]} is not a block of the partition")
    members = set(labels)
    return RandomVariable(P.domain, [Fraction(int(x in members)) for x in P.domain.outcomes])


def refines(P: Partition, Q: Partition) -> bool:
    """True iff every block of *P* lies inside a block of *Q*."""
    _check_same(P, Q.domain)
    return all(len({Q.block_of(x) for x in block}) == 1 for block in P.blocks)


def factor_through(P: Partition, Q: Partition) -> Bundle:
    """The bundle σ with ``partition_to_bundle(Q) = σ ∘ partition_to_bundle(P)``.

    Exists exactly when *P* refines *Q*.
    """
    if not refines(P, Q):
        raise NotARefinement("the first partition does not refine the second")
    fine = partition_to_bundle(P)
    coarse = partition_to_bundle(Q)
    return Bundle(fine.base, coarse.base, {b[0]: Q.block_of(b[0])[0] for b in P.blocks})


def common_refinement(P: Partition, Q: Partition) -> Partition:
    """Non-empty intersections of P-blocks with Q-blocks."""
    _check_same(P, Q.domain)
    groups = defaultdict(list)
    for x in P.domain.outcomes:
        groups[(P.block_of(x), Q.block_of(x))].append(x)
    return Partition(P.domain, groups.values())
