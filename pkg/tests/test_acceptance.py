"""Acceptance criteria, one test per criterion, every equality exact.

Each test records its verdict in ``VERDICTS``; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""

import io
import json
from contextlib import contextmanager
from fractions import Fraction as F
from itertools import permutations
from pathlib import Path

from probscheme import (
    Event,
    Partition,
    RandomFunction,
    RandomVariable,
    SchemeIso,
    assoc_rebracket,
    base_change_check,
    check_scheme_iso,
    check_total_expectation,
    cond_expectation,
    cond_independent,
    cond_variance,
    die,
    distribution_scheme,
    expectation,
    fiber_average,
    fiber_product,
    fiber_scheme,
    fiber_sum,
    indicator,
    induced_bundle,
    inner_product,
    joint,
    linear_regression,
    lotus,
    make_scheme,
    markov_build,
    markov_verify,
    mass_multiset,
    mass_variable,
    partition_from_functions,
    partition_to_bundle,
    product_scheme,
    pullback,
    total_covariance_decomposition,
    uniform_scheme,
    variance,
    variance_components,
    wlln_certificate,
    zip_up,
)
from probscheme.algebras import algebra_contains
from probscheme.cli import main
from probscheme.core import coordinate, format_rational
from probscheme.condexp import total_probability_sides
from probscheme.documents import read_document, serialize_document
from probscheme.fiberprod import first_failing_index, path_coordinates

from instances import (
    N_RANDOM,
    oracle_block_means,
    oracle_cond_independent,
    oracle_markov_failure,
    oracle_prob,
    oracle_regression,
    random_bundle,
    random_bundle_onto,
    random_labels_rf,
    random_pair_of_bundles,
    random_partition,
    random_refinement_pair,
    random_rv,
    random_scheme,
    rng,
)

GOLDEN = Path(__file__).parent / "golden"
VERDICTS = {}

D6 = die(6)
A = Event(D6, ["1", "2", "3"])
B = Event(D6, ["1", "3", "5"])
W = RandomVariable.from_labels(D6)
COIN = uniform_scheme(["0", "1"])


@contextmanager
def criterion(number, title):
    VERDICTS[number] = (False, title)
    yield
    VERDICTS[number] = (True, title)


def test_criterion_01_low_odd():
    with criterion(1, "joint of low-face and odd-face indicators on a die"):
        scheme, _ = distribution_scheme(joint([indicator(A), indicator(B)]))
        assert scheme.outcomes == (("0", "0"), ("0", "1"), ("1", "0"), ("1", "1"))
        assert scheme.masses == (F(1, 3), F(1, 6), F(1, 6), F(1, 3))


def test_criterion_02_bundle_functors():
    with criterion(2, "section, expectation preservation, module map, projection formula"):
        r = rng(100)
        for _ in range(N_RANDOM):
            pi = random_bundle(r, random_scheme(r))
            X, Z = random_rv(r, pi.total), random_rv(r, pi.base)
            assert fiber_average(pi, pullback(pi, Z)) == Z
            assert expectation(pullback(pi, Z)) == expectation(Z)
            assert expectation(fiber_average(pi, X)) == expectation(X)
            assert fiber_average(pi, pullback(pi, Z) * X) == Z * fiber_average(pi, X)
            assert fiber_sum(pi, pullback(pi, Z) * X) == Z * fiber_sum(pi, X)


def test_criterion_03_projection():
    with criterion(3, "conditional expectation is an orthogonal projection; tower law"):
        r = rng(200)
        E = cond_expectation
        for _ in range(N_RANDOM):
            s = random_scheme(r)
            X, Y = random_rv(r, s), random_rv(r, s)
            P = random_partition(r, s)
            EX, EY = E(X, P), E(Y, P)
            assert list(EX.values) == oracle_block_means(X, P.blocks)
            assert E(EX, P) == EX
            assert inner_product(EX, Y) == inner_product(X, EY)
            assert algebra_contains(P, EY) and E(EY, P) == EY
            assert E(EY * X, P) == EY * EX
            fine, coarse = random_refinement_pair(r, s)
            assert E(E(X, fine), coarse) == E(X, coarse)
            assert expectation(fiber_average(partition_to_bundle(P), X)) == expectation(X)
            assert expectation(EX) == expectation(X)


def test_criterion_04_laws():
    with criterion(4, "total expectation, LOTUS, total probability/covariance/variance, TSS = WSS + BSS"):
        r = rng(300)
        for _ in range(N_RANDOM):
            s = random_scheme(r)
            X, Y = random_rv(r, s), random_rv(r, s)
            L = random_labels_rf(r, s)
            assert check_total_expectation(Y, L)
            by_value = sum(
                (sum(Y(w) * s.mass(w) for w in s.outcomes if L(w) == v) for v in set(L.values)), F(0)
            )
            assert by_value == expectation(Y)
            table = {format_rational(v): format_rational(v * v - 1) for v in set(X.values)}
            assert lotus(table, X) == sum((X(w) ** 2 - 1) * m for w, m in s.items())
            P = random_partition(r, s)
            ev = Event(s, [w for w in s.outcomes if r.random() < 0.5])
            lhs, rhs = total_probability_sides(ev, P)
            assert lhs == rhs == oracle_prob(s, lambda w: w in ev)
            fine, coarse = random_refinement_pair(r, s)
            cl, cr = total_covariance_decomposition(X, Y, fine, coarse)
            assert cl == cr
            assert variance(X) == expectation(cond_variance(X, P)) + variance(cond_expectation(X, P))
        for n, m in [(2, 3), (3, 2), (1, 6)]:
            s = die(n * m)
            groups = Partition(s, [[str(gi * n + k + 1) for k in range(n)] for gi in range(m)])
            for _ in range(N_RANDOM // 3):
                vc = variance_components(random_rv(r, s), groups)
                assert vc.tss == vc.wss + vc.bss


def test_criterion_05_regression():
    with criterion(5, "regression orthogonality, Pythagoras, r² range, two-point agreement, a=7 b=-28/3"):
        res = linear_regression(W, W * W)
        assert (res.slope, res.intercept) == oracle_regression(W, W * W) == (7, F(-28, 3))
        r = rng(400)
        seen = 0
        while seen < N_RANDOM:
            s = random_scheme(r, min_n=2)
            X, Y = random_rv(r, s), random_rv(r, s)
            if variance(X) == 0:
                continue
            seen += 1
            res = linear_regression(X, Y)
            assert (res.slope, res.intercept) == oracle_regression(X, Y)
            assert inner_product(res.residual, RandomVariable.constant(s, 1)) == 0
            assert inner_product(res.residual, X) == 0
            assert variance(Y) == variance(Y - res.fitted) + variance(res.fitted)
            assert res.r_squared is None or 0 <= res.r_squared <= 1
        two = 0
        while two < N_RANDOM:
            s = random_scheme(r, min_n=2)
            lo, hi = sorted(r.sample(range(-5, 6), 2))
            vals = [lo, hi] + [r.choice([lo, hi]) for _ in range(len(s) - 2)]
            r.shuffle(vals)
            X = RandomVariable(s, vals)
            Y = random_rv(r, s)
            two += 1
            assert linear_regression(X, Y).fitted == cond_expectation(Y, partition_from_functions([X]))


def test_criterion_06_wlln():
    with criterion(6, "variance of the mean and weak-law bound on product schemes"):
        r = rng(500)
        checked = 0
        for n in range(1, 5):
            for _ in range(20):
                # independent coordinates with random small supports are pairwise uncorrelated
                factors = [random_scheme(r, 1, 3, prefix=f"c{i}_") for i in range(n)]
                s = product_scheme(*factors) if n > 1 else factors[0]
                Xs = []
                for i, f in enumerate(factors):
                    vals = {x: F(r.randint(-3, 3)) for x in f.outcomes}
                    Xs.append(RandomVariable(s, (lambda x, i=i, v=vals: v[x[i]]) if n > 1 else vals))
                K = max(variance(X) for X in Xs)
                if K == 0:
                    K = F(1)
                for eps in (F(1, 4), F(1, 2), F(1)):
                    cert = wlln_certificate(Xs, K, eps)
                    assert cert.var_mean == sum((variance(X) for X in Xs), F(0)) / n**2
                    mean = sum(Xs[1:], Xs[0]) * F(1, n)
                    mu = expectation(mean)
                    dev = oracle_prob(s, lambda w: abs(mean(w) - mu) >= eps)
                    assert cert.deviation == dev <= K / (n * eps**2)
                    checked += 1
        assert checked >= 200


def test_criterion_07_fiber_products():
    with criterion(7, "fiber product marginals, fiberwise independence, base change"):
        r = rng(600)
        for _ in range(N_RANDOM):
            pi1, pi2 = random_pair_of_bundles(r)
            fp = fiber_product(pi1, pi2)
            pr = mass_variable(fp.product)
            assert fiber_sum(fp.theta1, pr) == mass_variable(pi1.total)
            assert fiber_sum(fp.theta2, pr) == mass_variable(pi2.total)
            for w0 in pi1.base.outcomes:
                assert fiber_scheme(fp.down, w0) == product_scheme(fiber_scheme(pi1, w0), fiber_scheme(pi2, w0))
            lhs, rhs = base_change_check(pi1, pi2, random_rv(r, pi2.total))
            assert lhs == rhs


def test_criterion_08_conditional_independence():
    with criterion(8, "conditional independence: glued triples, low/odd witness, oracle agreement"):
        v = cond_independent(indicator(A), indicator(B), RandomFunction(D6, lambda x: "c"))
        assert not v
        assert v.witness["kind"] == "mass"
        src, tgt = v.witness["source_mass"], v.witness["target_mass"]
        assert {src, tgt} == {F(1, 3), F(1, 4)}
        # the witness point really has mass 1/3 in the joint and 1/4 in the glued product
        joint_scheme, _ = distribution_scheme(joint([indicator(A), indicator(B), RandomFunction(D6, lambda x: "c")]))
        assert joint_scheme.mass(v.witness["point"]) == src
        r = rng(700)
        for _ in range(N_RANDOM):
            pi1, pi2 = random_pair_of_bundles(r)
            fp = fiber_product(pi1, pi2)
            X, Y = coordinate(fp.product, 0), coordinate(fp.product, 1)
            Z = RandomFunction(fp.product, fp.down)
            assert cond_independent(X, Y, Z)
            assert oracle_cond_independent(X, Y, Z)
        agree = 0
        for _ in range(N_RANDOM):
            s = random_scheme(r)
            X, Y, Z = (random_labels_rf(r, s, k) for k in (2, 3, 2))
            assert bool(cond_independent(X, Y, Z)) == oracle_cond_independent(X, Y, Z)
            agree += 1
        assert agree == N_RANDOM


def _tower(r, base, prefix):
    middle = random_bundle_onto(r, base, 4, prefix + "m")
    top = random_bundle_onto(r, middle.total, 4, prefix + "t")
    return top, middle


def test_criterion_09_zip_up_and_associativity():
    with criterion(9, "zip-up and associativity isomorphisms on random towers"):
        r = rng(800)
        for _ in range(N_RANDOM):
            base = random_scheme(r, 1, 2, prefix="z")
            z = zip_up(_tower(r, base, "a"), _tower(r, base, "b"))
            assert check_scheme_iso(z.iso)
            assert all(z.over_xi(z.iso(p)) == z.bundle(p) for p in z.iso.source.outcomes)
            g0 = random_scheme(r, 1, 2, prefix="g")
            a1 = random_bundle_onto(r, g0, 4, "o")
            a2 = random_bundle_onto(r, g0, 4, "q")
            b2 = random_bundle(r, a2.total, prefix="h")
            b3 = random_bundle_onto(r, b2.base, 4, "c")
            assert check_scheme_iso(assoc_rebracket(a1, a2, b2, b3))


def _random_pairs(r):
    pairs, current = [], random_scheme(r, 1, 3, prefix="s")
    for _ in range(r.randint(1, 3)):
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
    return pairs


def test_criterion_10_markov():
    with criterion(10, "Markov build/verify, reversal, X3 = X1 fails at 3, path mass 9/32"):
        r = rng(900)
        for _ in range(N_RANDOM):
            Xs = path_coordinates(markov_build(_random_pairs(r)))
            assert markov_verify(Xs)
            assert markov_verify(Xs[::-1])
            assert oracle_markov_failure(Xs) is None
        for _ in range(N_RANDOM):
            s = random_scheme(r, 2, 8)
            Xs = [random_labels_rf(r, s, 2) for _ in range(r.randint(2, 4))]
            v = markov_verify(Xs)
            assert first_failing_index(v) == oracle_markov_failure(Xs)
            if v:
                assert markov_verify(Xs[::-1])
        sq = product_scheme(COIN, COIN)
        X1, X2 = coordinate(sq, 0), coordinate(sq, 1)
        assert first_failing_index(markov_verify([X1, X2, X1])) == 3
        pair = make_scheme([("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")], [F(3, 8), F(1, 8), F(1, 8), F(3, 8)])
        path = markov_build([pair, pair])
        assert path.mass(("0", "0", "0")) == F(3, 8) * F(3, 8) / F(1, 2) == F(9, 32)


def test_criterion_11_no_categorical_product():
    with criterion(11, "low/odd joint is not the uniform square; all 24 bijections rejected"):
        joint_scheme, _ = distribution_scheme(joint([indicator(A), indicator(B)]))
        square = product_scheme(COIN, COIN)
        assert mass_multiset(joint_scheme) != mass_multiset(square) == (F(1, 4),) * 4
        candidates = list(permutations(square.outcomes))
        assert len(candidates) == 24
        for perm in candidates:
            verdict = check_scheme_iso(SchemeIso(joint_scheme, square, dict(zip(joint_scheme.outcomes, perm))))
            assert not verdict and verdict.witness["kind"] == "mass"


def _cli(*args):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(args), stdin=io.StringIO(), stdout=out, stderr=err)
    return code, out.getvalue()


def test_criterion_12_cli(tmp_path):
    with criterion(12, "CLI golden round trips, condexp and regress values, exit statuses"):
        names = [p for p in sorted(GOLDEN.glob("*.json")) if ".raw." not in p.name and ".byref." not in p.name]
        kinds = set()
        for p in names:
            kinds.add(read_document(p).kind)
            code, out = _cli("validate", "--in", str(p))
            assert code == 0 and out == p.read_text(encoding="utf-8") == serialize_document(read_document(p))
        assert kinds == {"scheme", "rv", "rf", "bundle", "partition", "pairs"}
        code, out = _cli("condexp", "--in", str(GOLDEN / "square.rv.json"), "--in", str(GOLDEN / "halves.partition.json"))
        assert code == 0
        assert list(json.loads(out)["values"].values()) == ["14/3"] * 3 + ["77/3"] * 3
        code, out = _cli("regress", "--in", str(GOLDEN / "face.rv.json"), "--in", str(GOLDEN / "square.rv.json"))
        assert code == 0 and (json.loads(out)["slope"], json.loads(out)["intercept"]) == ("7", "-28/3")
        code, out = _cli("dist-scheme", "--in", str(GOLDEN / "joint.rf.json"))
        assert code == 0 and out == (GOLDEN / "low_odd.scheme.json").read_text(encoding="utf-8")
        # X is a function of Z, so the check holds
        code, _ = _cli("condindep", "--in", str(GOLDEN / "halves.rf.json"), "--in", str(GOLDEN / "joint.rf.json"),
                       "--in", str(GOLDEN / "halves.rf.json"))
        assert code == 0
        bad = tmp_path / "bad.json"
        bad.write_text('{"outcomes":["a"],"mass":{"a":"1/2"}}', encoding="utf-8")
        assert _cli("validate", "--in", str(bad))[0] == 2
        sq = tmp_path / "copy.json"
        sq.write_text(json.dumps({"kind": "scheme", "outcomes": [["0", "0", "0"], ["0", "1", "0"], ["1", "0", "1"], ["1", "1", "1"]],
                                  "mass": {"<0,0,0>": "1/4", "<0,1,0>": "1/4", "<1,0,1>": "1/4", "<1,1,1>": "1/4"}}),
                      encoding="utf-8")
        code, out = _cli("markov-check", "--in", str(sq))
        assert code == 1 and json.loads(out)["first_failing_index"] == 3
