"""Fiber products of bundles and what they encode.

For bundles ``π₁: Ω₁ → Ω₀ ← Ω₂ :π₂`` the fiber product lives on the pairs
``⟨ω₁, ω₂⟩`` over a common base point and gives them mass
``pr₁(ω₁) pr₂(ω₂) / pr₀(ω₀)``: over each base point it is the independent
product of the two fiber schemes.  Conditional independence and the Markov
property become statements that a canonical map into such a product is an
isomorphism of schemes; each check here builds that map and verifies it.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .bundles import Bundle, compose, fiber_sum, induced_bundle, pullback
from .core import (
    RandomVariable,
    Scheme,
    as_random_function,
    coordinate,
    distribution_scheme,
    joint,
)
from .errors import (
    BaseMismatch,
    CompositionMismatch,
    DomainMismatch,
    EmptySequence,
    InvalidLabel,
    MarginalMismatch,
    ShapeMismatch,
    TooShort,
)


@dataclass(frozen=True)
class FiberProduct:
    product: Scheme
    theta1: Bundle
    theta2: Bundle
    down: Bundle


def fiber_product(pi1: Bundle, pi2: Bundle) -> FiberProduct:
    if pi1.base != pi2.base:
        raise BaseMismatch("the two bundles have different base schemes")
    base = pi1.base
    outcomes, masses = [], []
    for w0, m0 in base.items():
        for w1 in pi1.fiber(w0):
            m1 = pi1.total.mass(w1)
            for w2 in pi2.fiber(w0):
                outcomes.append((w1, w2))
                masses.append(m1 * pi2.total.mass(w2) / m0)
    product = Scheme(outcomes, masses)
    theta1 = Bundle(product, pi1.total, {p: p[0] for p in product.outcomes})
    theta2 = Bundle(product, pi2.total, {p: p[1] for p in product.outcomes})
    return FiberProduct(product, theta1, theta2, compose(pi1, theta1))


def base_change_check(pi1: Bundle, pi2: Bundle, a2: RandomVariable) -> tuple[RandomVariable, RandomVariable]:
    """``(θ₁* θ₂♯ a₂, π₁♯ π₂* a₂)``; the two agree for every a₂ on Ω₂."""
    if pi1.base != pi2.base:
        raise BaseMismatch("the two bundles have different base schemes")
    if a2.domain != pi2.total:
        raise DomainMismatch("a2 must live on the total scheme of the second bundle")
    fp = fiber_product(pi1, pi2)
    return fiber_sum(fp.theta1, pullback(fp.theta2, a2)), pullback(pi1, fiber_sum(pi2, a2))


# ---------------------------------------------------------------------------
# isomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeIso:
    """A candidate isomorphism ``source → target`` given by a label map."""

    source: Scheme
    target: Scheme
    mapping: Mapping = field(hash=False)

    def __call__(self, label):
        return self.mapping[label]


@dataclass(frozen=True)
class Verdict:
    """A boolean answer with a witness explaining a negative one.

    Truthiness follows ``holds``; unpacks as ``(holds, witness)``.
    """

    holds: bool
    witness: Any = None

    def __bool__(self):
        return self.holds

    def __iter__(self):
        return iter((self.holds, self.witness))


def mass_multiset(scheme: Scheme) -> tuple:
    return tuple(sorted(scheme.masses))


def check_scheme_iso(iso: SchemeIso) -> Verdict:
    """Check that ``iso`` is a mass-preserving bijection.

    Negative verdicts carry the first failure found, as a dict whose
    ``"kind"`` is one of ``"undefined"``, ``"outside"``, ``"collision"``,
    ``"unattained"`` or ``"mass"``.
    """
    src, tgt = iso.source, iso.target
    hit = {}
    for x in src.outcomes:
        if x not in iso.mapping:
            return Verdict(False, {"kind": "undefined", "point": x})
        y = iso.mapping[x]
        if y not in tgt:
            return Verdict(False, {"kind": "outside", "point": x, "image": y})
        if y in hit:
            return Verdict(False, {"kind": "collision", "point": x, "other": hit[y], "image": y})
        hit[y] = x
    for y in tgt.outcomes:
        if y not in hit:
            return Verdict(False, {"kind": "unattained", "point": y, "target_mass": tgt.mass(y)})
    for x, m in src.items():
        y = iso.mapping[x]
        if tgt.mass(y) != m:
            return Verdict(False, {"kind": "mass", "point": x, "image": y, "source_mass": m, "target_mass": tgt.mass(y)})
    return Verdict(True)


def relabel(scheme: Scheme, mapping: Mapping) -> SchemeIso:
    """Transport *scheme* along an injective relabeling."""
    target = Scheme([mapping[x] for x in scheme.outcomes], scheme.masses)
    return SchemeIso(scheme, target, dict(mapping))


# ---------------------------------------------------------------------------
# conditional independence
# ---------------------------------------------------------------------------

def _gluing_verdict(source: Scheme, fp: FiberProduct, embed) -> Verdict:
    """Whether ``embed: source → fp.product`` is an isomorphism of schemes."""
    mapping = {x: embed(x) for x in source.outcomes}
    return check_scheme_iso(SchemeIso(source, fp.product, mapping))


def cond_independent(X, Y, Z) -> Verdict:
    """Whether X and Y are conditionally independent given Z.

    Builds ``[⟨X,Y,Z⟩] → [⟨X,Z⟩] ×_[Z] [⟨Y,Z⟩]``, ``⟨x,y,z⟩ ↦ ⟨⟨x,z⟩,⟨y,z⟩⟩``,
    and checks it is onto and mass-preserving.
    """
    X, Y, Z = (as_random_function(f) for f in (X, Y, Z))
    if not (X.domain == Y.domain == Z.domain):
        raise DomainMismatch("X, Y and Z live on different schemes")
    xyz, _ = distribution_scheme(joint([X, Y, Z]))
    xz, _ = distribution_scheme(joint([X, Z]))
    yz, _ = distribution_scheme(joint([Y, Z]))
    fp = fiber_product(induced_bundle(xz, lambda p: p[1]), induced_bundle(yz, lambda p: p[1]))
    return _gluing_verdict(xyz, fp, lambda t: ((t[0], t[2]), (t[1], t[2])))


# ---------------------------------------------------------------------------
# zip-up and associativity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZipUp:
    bundle: Bundle
    iso: SchemeIso
    over_xi: Bundle


def zip_up(tower1: Sequence[Bundle], tower2: Sequence[Bundle]) -> ZipUp:
    """Zip up ``Ω₂ → Ω₁ → Ω₀ ← Ω′₁ ← Ω′₂``.

    ``tower1 = (π₁₂, π₀₁)`` and ``tower2 = (π′₁₂, π′₀₁)``.  Returns the
    zip-up bundle ``Ω₂ ×_Ω₀ Ω′₂ → Ξ = Ω₁ ×_Ω₀ Ω′₁``, the canonical
    isomorphism onto ``(Ω₂ ×_Ω₁ Ξ) ×_Ξ (Ξ ×_Ω′₁ Ω′₂)``, and that fiber
    product's own bundle to Ξ (``over_xi``) so callers can confirm the
    isomorphism lies over Ξ.
    """
    p12, p01 = tower1
    q12, q01 = tower2
    if p12.base != p01.total or q12.base != q01.total:
        raise CompositionMismatch("each tower must compose: top bundle's base is the middle scheme")
    if p01.base != q01.base:
        raise BaseMismatch("the towers end in different base schemes")
    top = fiber_product(compose(p01, p12), compose(q01, q12))
    xi = fiber_product(p01, q01)
    bundle = Bundle(top.product, xi.product, {p: (p12(p[0]), q12(p[1])) for p in top.product.outcomes})
    left = fiber_product(p12, xi.theta1)  # points ⟨ω₂, ξ⟩
    right = fiber_product(xi.theta2, q12)  # points ⟨ξ, ω′₂⟩
    glued = fiber_product(left.theta2, right.theta1)
    mapping = {}
    for w2, v2 in top.product.outcomes:
        x = (p12(w2), q12(v2))
        mapping[(w2, v2)] = ((w2, x), (x, v2))
    over_xi = compose(left.theta2, glued.theta1)
    return ZipUp(bundle, SchemeIso(top.product, glued.product, mapping), over_xi)


def assoc_rebracket(alpha1: Bundle, alpha2: Bundle, beta2: Bundle, beta3: Bundle) -> SchemeIso:
    """``Ω₁ ×_Γ₀ (Ω₂ ×_Γ₁ Ω₃) → (Ω₁ ×_Γ₀ Ω₂) ×_Γ₁ Ω₃``, ``⟨a,⟨b,c⟩⟩ ↦ ⟨⟨a,b⟩,c⟩``.

    Shape: ``Ω₁ -α₁→ Γ₀ ←α₂- Ω₂ -β₂→ Γ₁ ←β₃- Ω₃``.
    """
    if alpha1.base != alpha2.base or beta2.base != beta3.base or alpha2.total != beta2.total:
        raise ShapeMismatch("bundles do not form the shape Ω₁ → Γ₀ ← Ω₂ → Γ₁ ← Ω₃")
    inner = fiber_product(beta2, beta3)
    left = fiber_product(alpha1, compose(alpha2, inner.theta1))
    outer = fiber_product(alpha1, alpha2)
    right = fiber_product(compose(beta2, outer.theta2), beta3)
    mapping = {p: ((p[0], p[1][0]), p[1][1]) for p in left.product.outcomes}
    return SchemeIso(left.product, right.product, mapping)


# ---------------------------------------------------------------------------
# Markov chains
# ---------------------------------------------------------------------------

def _head(t, k):
    """The first *k* components of a path tuple, unwrapped when ``k == 1``."""
    return t[0] if k == 1 else t[:k]


def markov_verify(Xs: Sequence) -> Verdict:
    """Check the stepwise gluing criterion for a Markov chain.

    For each ``2 ≤ i ≤ n`` the canonical map
    ``[⟨X₁..Xᵢ⟩] → [⟨X₁..Xᵢ₋₁⟩] ×_[Xᵢ₋₁] [⟨Xᵢ₋₁,Xᵢ⟩]`` must be an isomorphism.
    A negative verdict's witness holds the least failing ``i`` (1-based) and
    the isomorphism failure.
    """
    fs = [as_random_function(X) for X in Xs]
    if len(fs) < 2:
        raise TooShort("a chain needs at least two random functions")
    domain = fs[0].domain
    if any(f.domain != domain for f in fs):
        raise DomainMismatch("random functions live on different schemes")
    for i in range(3, len(fs) + 1):
        # i == 2 always glues: the base is [X₁] itself.
        path, _ = distribution_scheme(joint(fs[:i]))
        prefix, _ = distribution_scheme(joint(fs[: i - 1]))
        pair, _ = distribution_scheme(joint(fs[i - 2 : i]))
        fp = fiber_product(induced_bundle(prefix, lambda t: t[-1]), induced_bundle(pair, lambda t: t[0]))
        verdict = _gluing_verdict(path, fp, lambda t: (t[:-1], (t[-2], t[-1])))
        if not verdict:
            return Verdict(False, {"index": i, **verdict.witness})
    return Verdict(True)


def first_failing_index(verdict: Verdict):
    return None if verdict.holds else verdict.witness["index"]


def _marginal(scheme: Scheme, k: int) -> Scheme:
    return induced_bundle(scheme, lambda p: p[k]).base


def markov_build(pair_schemes: Sequence[Scheme]) -> Scheme:
    """Glue adjacent-pair schemes into the path scheme of a Markov chain.

    Path masses are ``pr(s₁,s₂) Π_{i≥2} pr(sᵢ,sᵢ₊₁)/pr(sᵢ)``; outcomes are
    flat tuples ``⟨s₁, …, sₙ⟩``.
    """
    pairs = list(pair_schemes)
    if not pairs:
        raise EmptySequence("need at least one pair scheme")
    for k, s in enumerate(pairs):
        if any(not isinstance(p, tuple) or len(p) != 2 for p in s.outcomes):
            raise InvalidLabel(f"pair scheme {k} has outcomes that are not pairs")
    for k in range(len(pairs) - 1):
        if _marginal(pairs[k], 1) != _marginal(pairs[k + 1], 0):
            raise MarginalMismatch(
                f"second marginal of pair scheme {k} differs from first marginal of pair scheme {k + 1}"
            )
    path = pairs[0]
    for pair in pairs[1:]:
        fp = fiber_product(induced_bundle(path, lambda t: t[-1]), induced_bundle(pair, lambda t: t[0]))
        path = relabel(fp.product, {p: p[0] + (p[1][1],) for p in fp.product.outcomes}).target
    return path


def path_coordinates(path: Scheme) -> list:
    """Coordinate random functions ``X₁, …, Xₙ`` of a path scheme."""
    lengths = {len(t) if isinstance(t, tuple) else 0 for t in path.outcomes}
    if len(lengths) != 1 or 0 in lengths:
        raise InvalidLabel("path scheme outcomes must be tuples of one common length")
    (n,) = lengths
    return [coordinate(path, i) for i in range(n)]
