import random
from fractions import Fraction

import pytest

from weylflow.flows import Realization, compute_flow, flow_momenta
from weylflow.scalars import GaussianRational
from weylflow.series import GradedSeries
from weylflow.weyl import (
    AlgebraSignature,
    WeylElement,
    bch_reference,
    commutator_tower,
    conjugated_momentum,
    coordinate_exponent,
    exponent_element,
    flow_normal_form,
    scalar_exponent,
    verify_normal_ordering,
)

from support import random_realization

I = GaussianRational(0, 1)
EUCLID_1 = AlgebraSignature(1, (1,))
MINK_1 = AlgebraSignature(1, (-1,))
EUCLID_2 = AlgebraSignature(2, (1, 1))


def element(sig, kmax, entries):
    return WeylElement(sig, kmax, entries)


def random_element(rng, sig, kmax, max_terms=4):
    n = sig.n
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        def idx(top):
            return tuple(rng.randint(0, top) for _ in range(n))

        key = (idx(2), idx(2), idx(1))
        coeff = GaussianRational(
            Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
            Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
        )
        prior = terms.get(key)
        terms[key] = coeff if prior is None else prior + coeff
    return WeylElement(sig, kmax, terms)


class TestCanonicalCommutators:
    def test_p_times_x(self):
        # p x = x p - i eta, both signatures
        for sig in (EUCLID_1, MINK_1):
            x = WeylElement.coordinate(sig, 2, 0)
            p = WeylElement.momentum(sig, 2, 0)
            eta = sig.metric[0]
            assert p * x == x * p + WeylElement.scalar(sig, 2, GaussianRational(0, -eta))
            assert p.commutator(x) == WeylElement.scalar(
                sig, 2, GaussianRational(0, -eta)
            )

    def test_same_kind_commute(self):
        x0 = WeylElement.coordinate(EUCLID_2, 1, 0)
        x1 = WeylElement.coordinate(EUCLID_2, 1, 1)
        p0 = WeylElement.momentum(EUCLID_2, 1, 0)
        p1 = WeylElement.momentum(EUCLID_2, 1, 1)
        assert x0 * x1 == x1 * x0
        assert p0 * p1 == p1 * p0
        assert p0.commutator(x1).is_zero

    def test_xp_squared(self):
        # (x p)(x p) = x^2 p^2 - i x p for eta = +1
        xp = element(EUCLID_1, 0, {((1,), (1,), (0,)): 1})
        assert xp * xp == element(
            EUCLID_1, 0, {((2,), (2,), (0,)): 1, ((1,), (1,), (0,)): -I}
        )

    def test_p2_x2(self):
        # p^2 x^2 = x^2 p^2 - 4 i eta x p - 2 for eta^2 = 1
        for sig in (EUCLID_1, MINK_1):
            eta = sig.metric[0]
            p2 = element(sig, 0, {((0,), (2,), (0,)): 1})
            x2 = element(sig, 0, {((2,), (0,), (0,)): 1})
            assert p2 * x2 == element(
                sig,
                0,
                {
                    ((2,), (2,), (0,)): 1,
                    ((1,), (1,), (0,)): I * (-4 * eta),
                    ((0,), (0,), (0,)): -2,
                },
            )

    def test_commutator_tower(self):
        # [x^3, p] = 3 i eta x^2, iterated once more: [[x^3, p], p] = 6 (i eta)^2 x
        for sig in (EUCLID_1, MINK_1):
            eta = sig.metric[0]
            x3 = element(sig, 0, {((3,), (0,), (0,)): 1})
            p = WeylElement.momentum(sig, 0, 0)
            once = commutator_tower(x3, p, 1)
            assert once == element(sig, 0, {((2,), (0,), (0,)): I * (3 * eta)})
            twice = commutator_tower(x3, p, 2)
            assert twice == element(sig, 0, {((1,), (0,), (0,)): (I * eta) ** 2 * 6})


def test_associativity_random():
    rng = random.Random(301)
    for _ in range(500):
        sig = rng.choice((EUCLID_1, MINK_1, EUCLID_2))
        a = random_element(rng, sig, 2, max_terms=2)
        b = random_element(rng, sig, 2, max_terms=2)
        c = random_element(rng, sig, 2, max_terms=2)
        assert (a * b) * c == a * (b * c)


def test_distributivity_random():
    rng = random.Random(302)
    for _ in range(100):
        sig = rng.choice((EUCLID_1, EUCLID_2))
        a = random_element(rng, sig, 2)
        b = random_element(rng, sig, 2)
        c = random_element(rng, sig, 2)
        assert a * (b + c) == a * b + a * c


def test_series_embedding_is_multiplicative():
    rng = random.Random(303)
    from support import graded_series

    for _ in range(100):
        f = graded_series(rng, 2, 3)
        g = graded_series(rng, 2, 3)
        lhs = WeylElement.from_series(f, EUCLID_2) * WeylElement.from_series(g, EUCLID_2)
        assert lhs == WeylElement.from_series(f * g, EUCLID_2)


class TestExp:
    def test_rejects_k_free_terms(self):
        p = WeylElement.momentum(EUCLID_1, 3, 0)
        with pytest.raises(ValueError):
            p.exp()

    def test_exp_of_zero(self):
        z = WeylElement.zero(EUCLID_1, 3)
        assert z.exp() == WeylElement.scalar(EUCLID_1, 3, 1)

    def test_commuting_exponents_multiply(self):
        rng = random.Random(304)
        for _ in range(30):
            f = WeylElement.from_series(
                GradedSeries(
                    1, 3, {((1,), (rng.randint(0, 2),)): Fraction(rng.randint(-2, 2))}
                ),
                EUCLID_1,
            )
            g = WeylElement.from_series(
                GradedSeries(
                    1, 3, {((1,), (rng.randint(0, 2),)): Fraction(rng.randint(-2, 2))}
                ),
                EUCLID_1,
            )
            assert f.exp() * g.exp() == (f + g).exp()

    def test_inverse(self):
        rng = random.Random(305)
        for _ in range(20):
            e = random_element(rng, EUCLID_1, 3)
            e = e - WeylElement(EUCLID_1, 3, {k: c for k, c in e.terms.items() if sum(k[2]) == 0})
            assert e.exp() * (-e).exp() == WeylElement.scalar(EUCLID_1, 3, 1)


class TestXZero:
    def test_at_x_zero_filters(self):
        e = element(EUCLID_1, 1, {((1,), (0,), (0,)): 1, ((0,), (2,), (1,)): 3})
        assert e.at_x_zero() == element(EUCLID_1, 1, {((0,), (2,), (1,)): 3})

    def test_to_series_requires_x_free(self):
        e = element(EUCLID_1, 1, {((1,), (0,), (0,)): 1})
        with pytest.raises(ValueError):
            e.to_series()

    def test_series_round_trip(self):
        s = GradedSeries(2, 3, {((1, 0), (0, 2)): Fraction(5, 3)})
        assert WeylElement.from_series(s, EUCLID_2).to_series() == s


class TestOracle:
    def test_verify_small_suite(self):
        rng = random.Random(306)
        seen_minkowski = 0
        for _ in range(8):
            n = rng.choice((1, 2))
            metric = tuple(rng.choice((1, -1)) for _ in range(n))
            if metric[0] == -1:
                seen_minkowski += 1
            r = random_realization(rng, n, degree=2, metric=metric, with_chi=True)
            ok, diff = verify_normal_ordering(r, 3)
            assert ok, diff.pretty()
        assert seen_minkowski >= 1

    def test_discrepancy_reported_for_wrong_flow(self):
        # hand the oracle a broken flow result and expect a nonzero discrepancy
        p = GradedSeries.p_var(1, 0, 0)
        r = Realization(n=1, metric=(1,), phi=((p * p,),), chi=(p,))
        fr = compute_flow(r, 3)
        sig = AlgebraSignature(r.n, r.metric)
        broken = compute_flow(r.scaled(Fraction(1, 2)), 3)
        lhs = exponent_element(r, 3).exp()
        rhs = flow_normal_form(broken, sig)
        assert not (lhs - rhs).is_zero
        assert (lhs - flow_normal_form(fr, sig)).is_zero

    def test_conjugation_recovers_momenta(self):
        rng = random.Random(308)
        for _ in range(6):
            n = rng.choice((1, 2))
            r = random_realization(rng, n, degree=2, with_chi=True)
            momenta = flow_momenta(r, 4)
            for mu in range(n):
                assert conjugated_momentum(r, mu, 4) == momenta[mu]

    def test_phase_sits_at_x_zero(self):
        rng = random.Random(309)
        r = random_realization(rng, 1, degree=2, with_chi=True)
        fr = compute_flow(r, 4)
        sig = AlgebraSignature(r.n, r.metric)
        normal = flow_normal_form(fr, sig)
        expected = WeylElement.from_series(
            (fr.phase * I).exp_truncated(), sig
        )
        assert normal.at_x_zero() == expected


class TestBch:
    def test_rejects_deep_truncation(self):
        a = WeylElement.from_series(GradedSeries.k_var(1, 0, 4), EUCLID_1)
        with pytest.raises(ValueError):
            bch_reference(a, a)

    def test_rejects_k_free_exponents(self):
        a = WeylElement.momentum(EUCLID_1, 3, 0)
        b = WeylElement.from_series(GradedSeries.k_var(1, 0, 3), EUCLID_1)
        with pytest.raises(ValueError):
            bch_reference(a, b)

    def test_matches_direct_product(self):
        rng = random.Random(310)
        for _ in range(10):
            r = random_realization(rng, 1, degree=2, with_chi=True)
            a = -coordinate_exponent(r, 3)
            b = exponent_element(r, 3)
            assert bch_reference(a, b) == a.exp() * b.exp()

    def test_recovers_phase_factor(self):
        rng = random.Random(311)
        for _ in range(5):
            r = random_realization(rng, 1, degree=2, with_chi=True)
            a = -coordinate_exponent(r, 3)
            b = exponent_element(r, 3)
            fr = compute_flow(r, 3)
            target = WeylElement.from_series(
                (fr.phase * I).exp_truncated(), AlgebraSignature(r.n, r.metric)
            )
            assert bch_reference(a, b) == target


def test_scalar_exponent_is_x_free():
    rng = random.Random(312)
    r = random_realization(rng, 2, degree=2, with_chi=True)
    assert scalar_exponent(r, 3).is_x_free()
    assert not coordinate_exponent(r, 3).is_x_free()


def test_signature_validation():
    with pytest.raises(ValueError):
        AlgebraSignature(1, (0,))
    with pytest.raises(ValueError):
        AlgebraSignature(2, (1,))
