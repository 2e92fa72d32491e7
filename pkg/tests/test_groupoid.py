import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from twistgpd.errors import MalformedSpec, NotComposable, StructureError, UnknownArrow
from twistgpd.formats import build_model
from twistgpd.groupoid import (
    ArrowBundle,
    CylinderShift,
    FiniteExplicit,
    GroupBundle,
    GroupModel,
    Pair,
    ShiftArrow,
    TransformationFinite,
    Tri,
)
from twistgpd.groups import cyclic, product_of_cyclics, zd
from twistgpd.shift import Point

from helpers import random_groupoid


def z4_on_two_points():
    return TransformationFinite(["a", "b"], cyclic(4), generators=[[1, 0]])


class TestConstruction:
    def test_pair_counts(self):
        P = build_model({"kind": "pair", "n": 3})
        assert len(P.arrows()) == 9 and len(P.units()) == 3

    def test_full_shift_accepted(self):
        C = build_model({"kind": "cylinder_shift", "alphabet": 2})
        assert isinstance(C, CylinderShift) and C.language.is_nonempty()

    def test_broken_range_rule_has_witness(self):
        # two units, one arrow 2: 0 -> 1 whose product with its inverse lands on the wrong unit
        with pytest.raises(StructureError) as err:
            FiniteExplicit(
                [0, 1], [0, 1, 0, 1], [0, 1, 1, 0], [0, 1, 3, 2],
                {(0, 0): 0, (1, 1): 1, (2, 1): 2, (0, 2): 2, (3, 0): 3, (1, 3): 3, (2, 3): 1, (3, 2): 1},
            )
        assert err.value.context["witness"]

    def test_missing_composition_entry(self):
        with pytest.raises(StructureError):
            FiniteExplicit([0], [0, 0], [0, 0], [0, 1], {(0, 0): 0, (0, 1): 1, (1, 0): 1})

    def test_malformed_specs(self):
        with pytest.raises(MalformedSpec):
            build_model({"kind": "cylinder_shift", "alphabet": -2})
        with pytest.raises(MalformedSpec):
            build_model({"kind": "pair", "n": 3, "colour": "red"})
        with pytest.raises(MalformedSpec):
            build_model({"kind": "torus"})

    def test_empty_subshift_rejected(self):
        with pytest.raises(StructureError):
            CylinderShift(2, [(0,), (1,)])

    def test_non_commuting_generators_rejected(self):
        with pytest.raises(StructureError):
            TransformationFinite([0, 1, 2], zd(2), generators=[[1, 0, 2], [0, 2, 1]])

    def test_table_action_must_be_right_action(self):
        # S3 is not available as a generator action; a bad table for Z3 fails the action law
        with pytest.raises(StructureError):
            TransformationFinite([0, 1, 2], cyclic(3), table=[[0, 1, 2], [1, 0, 2], [2, 2, 0]])


class TestStructureMaps:
    def test_compose_examples(self):
        P = Pair(3)
        assert P.compose((0, 1), (1, 2)) == (0, 2)
        assert GroupModel(zd(1)).compose((2,), (3,)) == (5,)
        with pytest.raises(NotComposable):
            P.compose((0, 1), (2, 0))

    def test_invert_examples(self):
        assert Pair(3).invert((0, 2)) == (2, 0)
        assert GroupModel(zd(2)).invert((1, -3)) == (-1, 3)
        C = CylinderShift(2)
        x = Point.from_parts([0], [1, 1, 0], [1])
        inv = C.invert(ShiftArrow(x, 2))
        assert inv == ShiftArrow(x.shift(2), -2)
        assert C.compose(ShiftArrow(x, 2), inv) == ShiftArrow(x, 0)

    def test_endpoints(self):
        assert Pair(3).endpoints((0, 2)) == (0, 2)
        swap = TransformationFinite(["a", "b"], cyclic(2), generators=[[1, 0]])
        assert swap.endpoints(("a", (1,))) == ("a", "b")
        for u in Pair(3).units():
            a = Pair(3).unit_arrow(u)
            assert Pair(3).endpoints(a) == (u, u)

    def test_unknown_arrow(self):
        with pytest.raises(UnknownArrow):
            Pair(2).canon((0, 5))


class TestFibers:
    def test_pair_source_fiber(self):
        assert set(Pair(4).fiber(1, "source").arrows) == {(0, 1), (1, 1), (2, 1), (3, 1)}

    def test_shift_source_fiber(self):
        C = CylinderShift(2)
        zero = Point.constant(0)
        fib = C.fiber(zero, "source", 5)
        assert fib.truncated
        assert {a.shift for a in fib.arrows} == {-2, -1, 0, 1, 2}
        assert all(C.source(a) == zero and a.point == zero.shift(-a.shift) for a in fib.arrows)

    def test_trivial_action_fiber_is_group(self):
        T = TransformationFinite(["p"], cyclic(2), generators=[[0]])
        assert set(T.fiber("p", "source").arrows) == {("p", (0,)), ("p", (1,))}

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_fibers_partition_arrows(self, seed):
        model, _ = random_groupoid(random.Random(seed), 120)
        for direction in ("source", "range"):
            seen = [a for u in model.units() for a in model.fiber(u, direction, 10_000).arrows]
            assert sorted(seen) == sorted(model.arrows())

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_axioms_on_random_groupoids(self, seed):
        model, _ = random_groupoid(random.Random(seed), 120)
        model.check_axioms()
        rnd = random.Random(seed)
        arrows = model.arrows()
        for _ in range(50):
            a = rnd.choice(arrows)
            b = rnd.choice(model.fiber(model.source(a), "range", 1000).arrows)
            ab = model.compose(a, b)
            assert model.range(ab) == model.range(a) and model.source(ab) == model.source(b)
            assert model.invert(ab) == model.compose(model.invert(b), model.invert(a))


class TestIsotropy:
    def test_pair_isotropy_trivial(self):
        for x in Pair(4).units():
            assert Pair(4).isotropy_group(x).trivial

    def test_stabilizer_of_quotient_action(self):
        entry = z4_on_two_points().isotropy_group("a")
        assert sorted(g for _, g in entry.elements) == [(0,), (2,)]
        assert entry.group.order() == 2

    def test_stabilizer_matches_brute_force(self):
        T = TransformationFinite(list(range(4)), product_of_cyclics([2, 4]), generators=[[1, 0, 2, 3], [0, 1, 3, 2]])
        for x in T.points:
            brute = sorted(g for g in T.group.elements() if T.act(x, g) == x)
            assert sorted(g for _, g in T.isotropy_group(x).elements) == brute

    def test_z2_stabilizer_lattice(self):
        T = TransformationFinite([0, 1], zd(2), generators=[[1, 0], [1, 0]])
        sub, truncated = T.stabilizer(0)
        assert not truncated
        assert all(T.act(0, sub.embed(v)) == 0 for v in sub.enumerate(30))
        (a, b), (c, d) = sub.basis
        assert abs(a * d - b * c) == 2  # index-2 sublattice: x + y even
        assert T.act(0, (1, 0)) == 1 and T.act(0, (1, 1)) == 0

    def test_periodic_point_isotropy(self):
        C = CylinderShift(2)
        x = Point.periodic([0, 1])
        shifts = {a.shift for a in C.isotropy_group(x, 3).elements}
        assert {2, -2} <= shifts and all(s % 2 == 0 for s in shifts)

    def test_discrete_interior_matches_membership(self):
        model, _ = random_groupoid(random.Random(3), 100)
        for a in model.arrows():
            d = model.interior_isotropy_test(a)
            assert (d.outcome is Tri.YES) == model.in_isotropy(a)
            assert d.outcome is not Tri.UNKNOWN


class TestInteriorAndPrincipality:
    def test_shift_one_bundle_moves_points(self):
        d = CylinderShift(2).interior_isotropy_test(ArrowBundle.of({}, 1), 3)
        assert d.outcome is Tri.NO
        x = d.witness.point
        assert x.shift(1) != x

    def test_period_two_window_is_unknown(self):
        b = ArrowBundle.of({-2: 0, -1: 1, 0: 0, 1: 1, 2: 0}, 2)
        assert CylinderShift(2).interior_isotropy_test(b, 2).outcome is Tri.UNKNOWN

    def test_isolated_orbit_bundle_is_interior(self):
        C = CylinderShift(2, [(0, 0), (1, 1)])
        assert C.interior_isotropy_test(ArrowBundle.of({0: 0}, 2), 2).outcome is Tri.YES

    def test_principality_examples(self):
        assert Pair(5).is_topologically_principal().outcome is Tri.YES
        T = TransformationFinite(["p"], cyclic(2), generators=[[0]])
        d = T.is_topologically_principal()
        assert d.outcome is Tri.NO and d.witness == ("p", (1,))

    def test_full_shift_principal_at_depth_four(self):
        d = CylinderShift(2).is_topologically_principal(4)
        assert d.outcome is Tri.YES
        assert d.evidence["bundles_checked"] > 0

    def test_golden_mean_principal(self):
        assert CylinderShift(2, [(1, 1)]).is_topologically_principal(4).outcome is Tri.YES

    def test_periodic_subshift_not_principal(self):
        d = CylinderShift(2, [(0, 0), (1, 1)]).is_topologically_principal(3)
        assert d.outcome is Tri.NO

    def test_group_bundle_principal_only_when_trivial(self):
        assert GroupBundle([0, 1], [cyclic(2), cyclic(3)]).is_topologically_principal().outcome is Tri.NO

    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_window_test_is_consistent_with_points(self, depth):
        # a No witness really is moved, a Yes bundle has only periodic sample points
        C = CylinderShift(2, [(1, 1)])
        for b in itertools.islice(C.basic_bundles(depth), 60):
            d = C.interior_isotropy_test(b, depth)
            if d.outcome is Tri.NO:
                x = d.witness.point
                assert b.cylinder.matches(x) and x.shift(b.shift) != x
