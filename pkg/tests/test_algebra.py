import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from twistgpd.algebra import (
    Element,
    c0_multiply,
    convolve,
    fiber_sum_function,
    i_norm,
    i_norm_hp,
    involve,
    iota_embed,
    iso_i_norm,
    psi_restrict,
    quotient_i_norm,
    unit_function,
)
from twistgpd.cocycle import Bicharacter, FiniteTable, PullbackFromGroup, Trivial, TwoCocycle
from twistgpd.errors import BundleIncompatible, ModelMismatch, NotInterior
from twistgpd.groupoid import CylinderShift, GroupBundle, GroupModel, Pair, TransformationFinite
from twistgpd.groups import cyclic, product_of_cyclics, zd
from twistgpd.phase import Cyclo, Phase

from helpers import random_cocycle, random_exact_element, random_groupoid

I = Cyclo.root(1, 4)
HP_SLACK = mpmath.mpf(10) ** -40


def rotation():
    model = GroupModel(zd(2))
    return model, Bicharacter(model, [[0, "1/4"], [0, 0]])


class TestConvolution:
    def test_pair_matrix_units(self):
        P = Pair(2)
        f = Element.build(P, [((0, 1), 1), ((1, 0), 1)])
        ff = convolve(Trivial(P), f, f)
        assert ff == Element.identity(P)

    def test_rotation_exchange_phase(self):
        model, sigma = rotation()
        U, V = Element.delta(model, (1, 0)), Element.delta(model, (0, 1))
        assert convolve(sigma, U, V) == convolve(sigma, V, U).scale(I)

    def test_twisted_table_on_pair(self):
        P = Pair(2)
        sigma = FiniteTable(P, 2, {((0, 1), (1, 0)): 1})
        # not normalized-trivial: e01 * e10 picks up -1
        e01, e10 = Element.delta(P, (0, 1)), Element.delta(P, (1, 0))
        assert convolve(sigma, e01, e10) == Element.delta(P, (0, 0), -1)

    def test_float_coefficients_propagate(self):
        model = GroupModel(zd(1))
        f = Element.build(model, [((0,), 0.5), ((1,), 1)])
        g = convolve(Trivial(model), f, f)
        assert not g.exact and g.allclose(Element.build(model, [((0,), 0.25), ((1,), 1.0), ((2,), 1.0)]))

    def test_model_mismatch(self):
        with pytest.raises(ModelMismatch):
            convolve(Trivial(Pair(2)), Element.identity(Pair(2)), Element.identity(Pair(3)))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000))
    def test_axioms_on_random_groupoids(self, seed):
        rnd = random.Random(seed)
        model, comps = random_groupoid(rnd, 80)
        sigma = random_cocycle(rnd, model, comps)
        f, g, h = (random_exact_element(rnd, model) for _ in range(3))
        assert convolve(sigma, convolve(sigma, f, g), h) == convolve(sigma, f, convolve(sigma, g, h))
        assert involve(sigma, convolve(sigma, f, g)) == convolve(sigma, involve(sigma, g), involve(sigma, f))
        assert involve(sigma, involve(sigma, f)) == f
        assert i_norm_hp(involve(sigma, f)) == i_norm_hp(f)
        # 50-digit arithmetic; equality cases differ only in the last digits
        with mpmath.workdps(50):
            assert i_norm_hp(convolve(sigma, f, g)) <= i_norm_hp(f) * i_norm_hp(g) + HP_SLACK


class TestBundles:
    def test_shift_bundles_multiply(self):
        C = CylinderShift(2)
        a = Element.bundle(C, {0: 1}, 1)
        b = Element.bundle(C, {0: 0}, -1)
        # (C1, 1) * (C2, -1) = (C1 & translate(C2, 1), 0)
        prod = convolve(Trivial(C), a, b)
        assert prod == Element.bundle(C, {0: 1, 1: 0}, 0)

    def test_identity_is_neutral(self):
        C = CylinderShift(2, [(1, 1)])
        f = Element.build(C, [(({0: 0, 1: 1}, 2), 3), (({-1: 1}, -1), I)])
        one = Element.identity(C)
        assert convolve(Trivial(C), one, f) == f == convolve(Trivial(C), f, one)

    def test_overlapping_descriptions_compare_equal(self):
        C = CylinderShift(2)
        split = Element.build(C, [(({0: 0}, 1), 1), (({0: 1}, 1), 1)])
        assert split == Element.bundle(C, {}, 1)

    def test_involution_and_associativity(self):
        C = CylinderShift(2)
        rnd = random.Random(4)
        sigma = Trivial(C)
        els = []
        for _ in range(3):
            items = [({rnd.randint(-2, 2): rnd.randint(0, 1)}, rnd.randint(-2, 2)) for _ in range(3)]
            els.append(Element.build(C, [(k, Cyclo.root(rnd.randrange(4), 4)) for k in items]))
        f, g, h = els
        assert convolve(sigma, convolve(sigma, f, g), h) == convolve(sigma, f, convolve(sigma, g, h))
        assert involve(sigma, convolve(sigma, f, g)) == convolve(sigma, involve(sigma, g), involve(sigma, f))
        assert involve(sigma, involve(sigma, f)) == f

    def test_general_cocycles_rejected_on_bundles(self):
        C = CylinderShift(2)
        sigma = PullbackFromGroup(C, Bicharacter(GroupModel(zd(1)), [["1/3"]]))
        f = Element.bundle(C, {}, 1)
        assert convolve(sigma, f, f) == Element.bundle(C, {}, 2, Cyclo.root(1, 3))
        with pytest.raises(BundleIncompatible):
            convolve(FakeTwist(C), f, f)


class FakeTwist(TwoCocycle):
    variant = "fake"

    def phase(self, a, b):
        return Phase(0)

    def describe(self):
        return {"kind": "fake"}


class TestNorms:
    def test_oracle_value(self):
        f = Element.build(GroupModel(zd(1)), [((0,), 1), ((1,), 1), ((2,), I)])
        assert i_norm_hp(f) == 3 and i_norm(f) == 3.0

    def test_fiber_sums(self):
        P = Pair(3)
        f = Element.build(P, [((0, 1), 2), ((2, 1), Fraction(-1, 2)), ((1, 1), I)])
        assert fiber_sum_function(f, 1) == 3.5
        assert fiber_sum_function(f, 0) == 2.0
        assert i_norm(f) == 3.5

    def test_bundle_norm(self):
        C = CylinderShift(2)
        f = Element.build(C, [(({0: 0}, 1), 1), (({0: 1}, 1), 1), (({}, 0), 1)])
        assert i_norm(f) == 2.0

    def test_c0_multiply(self):
        P = Pair(2)
        f = Element.build(P, [((0, 1), 1), ((1, 0), 2)])
        g = {0: 5, 1: 7}
        assert c0_multiply(g, f) == Element.build(P, [((0, 1), 5), ((1, 0), 14)])
        assert c0_multiply(g, f, "right") == Element.build(P, [((0, 1), 7), ((1, 0), 10)])
        with pytest.raises(ModelMismatch):
            c0_multiply(f, f)

    def test_unit_function_on_bundles(self):
        C = CylinderShift(2)
        g = unit_function(C, [({0: 1}, 2)])
        f = Element.bundle(C, {}, 1)
        assert c0_multiply(g, f) == Element.bundle(C, {0: 1}, 1, 2)


def isotropy_models():
    yield GroupBundle([0, 1], [cyclic(2), product_of_cyclics([2, 2])])
    yield TransformationFinite(["a", "b"], cyclic(4), generators=[[1, 0]])
    model, _ = random_groupoid(random.Random(11), 100)
    yield model


class TestIsotropyMaps:
    @pytest.mark.parametrize("model", list(isotropy_models()), ids=repr)
    def test_iota_and_psi(self, model):
        rnd = random.Random(1)
        sigma = Trivial(model)
        iso = [a for a in model.arrows() if model.in_isotropy(a)]
        f = Element.build(model, [(rnd.choice(iso), Cyclo.root(rnd.randrange(6), 6)) for _ in range(5)])
        g = Element.build(model, [(rnd.choice(iso), Fraction(rnd.randint(1, 4))) for _ in range(5)])
        ef, eg = iota_embed(model, f), iota_embed(model, g)
        assert i_norm_hp(ef) == i_norm_hp(f)
        assert iota_embed(model, convolve(sigma, f, g)) == convolve(sigma, ef, eg)
        for x in model.units():
            px, pg = psi_restrict(f, x), psi_restrict(g, x)
            assert psi_restrict(convolve(sigma, f, g), x) == px.convolve(sigma, pg)
            assert px.l1_hp() <= i_norm_hp(f)
            assert quotient_i_norm(f, x) == px.l1()
        fibers = [psi_restrict(f, x) for x in model.units()]
        assert iso_i_norm(fibers) == i_norm(f)

    def test_non_isotropy_support_rejected(self):
        P = Pair(2)
        with pytest.raises(NotInterior):
            psi_restrict(Element.delta(P, (0, 1)), 0)

    def test_uncertified_bundle_rejected(self):
        C = CylinderShift(2)
        with pytest.raises(NotInterior):
            iota_embed(C, Element.bundle(C, {0: 0}, 2))

    def test_isolated_orbit_bundle_restricts(self):
        from twistgpd.shift import Point

        C = CylinderShift(2, [(0, 0), (1, 1)])
        f = Element.build(C, [(({0: 0}, 2), 1), (({0: 0}, 0), I)])
        fv = psi_restrict(f, Point.periodic([0, 1]))
        assert fv.terms == {2: Cyclo.from_rational(1), 0: I}
