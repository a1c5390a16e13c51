from fractions import Fraction as F
from itertools import permutations

import pytest

from probscheme import (
    Event,
    RandomFunction,
    SchemeIso,
    assoc_rebracket,
    base_change_check,
    check_scheme_iso,
    cond_independent,
    die,
    distribution_scheme,
    fiber_product,
    fiber_scheme,
    fiber_sum,
    indicator,
    induced_bundle,
    joint,
    make_scheme,
    markov_build,
    markov_verify,
    mass_multiset,
    mass_variable,
    product_scheme,
    terminal_bundle,
    uniform_scheme,
    zip_up,
)
from probscheme.core import coordinate
from probscheme.errors import (
    BaseMismatch,
    CompositionMismatch,
    MarginalMismatch,
    ShapeMismatch,
    TooShort,
)
from probscheme.fiberprod import first_failing_index, path_coordinates, relabel

from instances import N_RANDOM, random_bundle_onto, random_pair_of_bundles, random_rv, random_scheme, rng

D6 = die(6)
A = Event(D6, ["1", "2", "3"])
B = Event(D6, ["1", "3", "5"])
COIN = uniform_scheme(["0", "1"])


def parity_bundle(scheme):
    return induced_bundle(scheme, lambda x: "even" if int(x) % 2 == 0 else "odd")


def test_parity_fiber_product():
    pi = parity_bundle(D6)
    fp = fiber_product(pi, pi)
    assert len(fp.product) == 18
    # (1/6)(1/6)/(1/2)
    assert fp.product.mass(("1", "3")) == F(1, 18)
    assert fp.down.base == pi.base


def test_fiber_product_over_point_is_product():
    fp = fiber_product(terminal_bundle(COIN), terminal_bundle(D6))
    assert fp.product == product_scheme(COIN, D6)


def test_base_mismatch():
    with pytest.raises(BaseMismatch):
        fiber_product(parity_bundle(D6), terminal_bundle(COIN))


def test_marginals_fiberwise_independence_base_change():
    r = rng(6)
    for _ in range(N_RANDOM):
        pi1, pi2 = random_pair_of_bundles(r)
        fp = fiber_product(pi1, pi2)
        pr = mass_variable(fp.product)
        assert fiber_sum(fp.theta1, pr) == mass_variable(pi1.total)
        assert fiber_sum(fp.theta2, pr) == mass_variable(pi2.total)
        for w0 in pi1.base.outcomes:
            f1, f2 = fiber_scheme(pi1, w0), fiber_scheme(pi2, w0)
            assert fiber_scheme(fp.down, w0) == product_scheme(f1, f2)
        a2 = random_rv(r, pi2.total)
        lhs, rhs = base_change_check(pi1, pi2, a2)
        assert lhs == rhs


def test_check_scheme_iso_witnesses():
    s = make_scheme(["a", "b"], [F(1, 3), F(2, 3)])
    t = make_scheme(["x", "y"], [F(1, 3), F(2, 3)])
    assert check_scheme_iso(SchemeIso(s, t, {"a": "x", "b": "y"}))
    kinds = [
        ({"a": "x"}, "undefined"),
        ({"a": "x", "b": "z"}, "outside"),
        ({"a": "x", "b": "x"}, "collision"),
        ({"a": "y", "b": "x"}, "mass"),
    ]
    for mapping, kind in kinds:
        holds, witness = check_scheme_iso(SchemeIso(s, t, mapping))
        assert not holds and witness["kind"] == kind
    small = make_scheme(["a"], [1])
    v = check_scheme_iso(SchemeIso(small, uniform_scheme(["x", "y"]), {"a": "x"}))
    assert v.witness["kind"] == "unattained"


def test_relabel_is_iso():
    iso = relabel(D6, {x: f"face{x}" for x in D6})
    assert check_scheme_iso(iso)


def test_no_categorical_product():
    joint_scheme, _ = distribution_scheme(joint([indicator(A), indicator(B)]))
    square = product_scheme(COIN, COIN)
    assert mass_multiset(joint_scheme) != mass_multiset(square)
    for perm in permutations(square.outcomes):
        mapping = dict(zip(joint_scheme.outcomes, perm))
        assert not check_scheme_iso(SchemeIso(joint_scheme, square, mapping))


def test_low_odd_not_independent():
    Z = RandomFunction(D6, lambda x: "c")
    v = cond_independent(indicator(A), indicator(B), Z)
    assert not v
    assert v.witness["kind"] == "mass"
    assert {v.witness["source_mass"], v.witness["target_mass"]} == {F(1, 3), F(1, 4)}


def test_independent_coordinates():
    s = product_scheme(D6, COIN)
    Z = RandomFunction(s, lambda x: "c")
    assert cond_independent(coordinate(s, 0), coordinate(s, 1), Z)


def test_glued_triple_is_conditionally_independent():
    pi = parity_bundle(D6)
    fp = fiber_product(pi, pi)
    X = coordinate(fp.product, 0)
    Y = coordinate(fp.product, 1)
    Z = RandomFunction(fp.product, lambda p: fp.down(p))
    assert cond_independent(X, Y, Z)
    # but not independent once the base is forgotten
    assert not cond_independent(X, Y, RandomFunction(fp.product, lambda p: "c"))


def _tower(r, base, prefix):
    middle = random_bundle_onto(r, base, 4, prefix + "m")
    top = random_bundle_onto(r, middle.total, 4, prefix + "t")
    return top, middle


def test_zip_up_and_associativity():
    r = rng(7)
    for _ in range(60):
        base = random_scheme(r, 1, 2, prefix="z")
        t1, t2 = _tower(r, base, "a"), _tower(r, base, "b")
        z = zip_up(t1, t2)
        assert check_scheme_iso(z.iso)
        for p in z.iso.source.outcomes:
            assert z.over_xi(z.iso(p)) == z.bundle(p)
        g0 = random_scheme(r, 1, 2, prefix="g")
        a1 = random_bundle_onto(r, g0, 4, "o")
        a2 = random_bundle_onto(r, g0, 4, "q")
        b2 = induced_bundle(a2.total, {x: f"h{i % 2}" for i, x in enumerate(a2.total.outcomes)})
        b3 = random_bundle_onto(r, b2.base, 4, "c")
        assert check_scheme_iso(assoc_rebracket(a1, a2, b2, b3))


def test_zip_up_shape_errors():
    pi = parity_bundle(D6)
    with pytest.raises(CompositionMismatch):
        zip_up((pi, pi), (pi, pi))
    with pytest.raises(ShapeMismatch):
        assoc_rebracket(pi, terminal_bundle(COIN), pi, pi)


WORKED_PAIR = make_scheme(
    [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")],
    [F(3, 8), F(1, 8), F(1, 8), F(3, 8)],
)


def test_worked_chain_path_mass():
    path = markov_build([WORKED_PAIR, WORKED_PAIR])
    assert path.mass(("0", "0", "0")) == F(3, 8) * F(3, 8) / F(1, 2) == F(9, 32)
    Xs = path_coordinates(path)
    assert markov_verify(Xs)
    assert markov_verify(Xs[::-1])


def test_single_pair_builds_itself():
    assert markov_build([WORKED_PAIR]) == WORKED_PAIR


def test_marginal_mismatch():
    skew = make_scheme([("0", "0"), ("1", "1")], [F(1, 4), F(3, 4)])
    with pytest.raises(MarginalMismatch):
        markov_build([WORKED_PAIR, skew])


def test_copy_counterexample_fails_at_three():
    s = product_scheme(COIN, COIN)
    X1, X2 = coordinate(s, 0), coordinate(s, 1)
    v = markov_verify([X1, X2, X1])
    assert not v and first_failing_index(v) == 3
    assert markov_verify([X1, X2])


def test_markov_needs_two():
    with pytest.raises(TooShort):
        markov_verify([coordinate(product_scheme(COIN, COIN), 0)])


def test_random_built_chains_verify():
    r = rng(8)
    for _ in range(40):
        states = random_scheme(r, 1, 3, prefix="s")
        pairs, current = [], states
        for _ in range(r.randint(1, 3)):
            # a random transition from the current marginal
            pts, masses = [], []
            nxt = [f"s{i}" for i in range(r.randint(1, 3))]
            for x, m in current.items():
                w = [r.randint(1, 4) for _ in nxt]
                for y, wy in zip(nxt, w):
                    pts.append((x, y))
                    masses.append(m * F(wy, sum(w)))
            pair = make_scheme(pts, masses)
            pairs.append(pair)
            current = induced_bundle(pair, lambda p: p[1]).base
        path = markov_build(pairs)
        Xs = path_coordinates(path)
        assert markov_verify(Xs)
        assert markov_verify(Xs[::-1])
