"""Phases, cyclotomic numbers, groups and subshift words."""
import cmath
import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistgpd.errors import MalformedSpec, StructureError
from twistgpd.groups import (
    DirectSumGroup,
    LamplighterGroup,
    TableGroup,
    build_group,
    cyclic,
    lattice_basis,
    product_of_cyclics,
    zd,
)
from twistgpd.phase import Cyclo, Phase
from twistgpd.shift import Cylinder, Language, Point

from helpers import S3_TABLE

levels = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12])


@st.composite
def cyclos(draw):
    n = draw(levels)
    terms = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(-3, 3), st.integers(1, 4)), max_size=3))
    out = Cyclo.zero()
    for j, a, b in terms:
        out = out + Cyclo.root(j, n) * Cyclo.from_rational(Fraction(a, b))
    return out


class TestPhase:
    def test_addition_is_mod_one(self):
        assert Phase("3/4") + Phase("1/2") == Phase("1/4")
        assert -Phase("1/3") == Phase("2/3")
        assert not Phase(1)

    def test_value_has_unit_modulus(self):
        for q in ("1/7", "5/12", "0"):
            assert abs(abs(Phase(q).value()) - 1) < 1e-12
        assert abs(Phase("1/4").value() - 1j) < 1e-15

    def test_float_phase_is_inexact(self):
        assert not Phase(0.25).exact and Phase("1/4").exact


class TestCyclo:
    @settings(max_examples=60, deadline=None)
    @given(cyclos(), cyclos(), cyclos())
    def test_field_laws(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert (a + b) - b == a
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()

    @settings(max_examples=60, deadline=None)
    @given(cyclos())
    def test_complex_value_consistent(self, a):
        b = a.conjugate()
        assert abs(complex(a).conjugate() - complex(b)) < 1e-9
        assert abs(abs(complex(a)) ** 2 - complex(a * b).real) < 1e-9

    def test_equality_across_levels(self):
        assert Cyclo.root(1, 4) == Cyclo.root(3, 12)
        assert Cyclo.root(1, 3) + Cyclo.root(2, 3) == Cyclo.from_rational(-1)
        assert Cyclo.root(1, 4) * Cyclo.root(1, 4) == Cyclo.from_rational(-1)

    def test_gaussian_parts(self):
        assert Cyclo.gaussian(Fraction(1, 2), 3).gaussian_parts() == (Fraction(1, 2), Fraction(3))
        assert Cyclo.root(1, 3).gaussian_parts() is None

    def test_root_value(self):
        assert abs(complex(Cyclo.root(1, 12)) - cmath.exp(2j * cmath.pi / 12)) < 1e-14


GROUPS = [zd(2), cyclic(5), product_of_cyclics([2, 0, 3]), TableGroup(S3_TABLE), DirectSumGroup(2), LamplighterGroup(3)]


class TestGroups:
    @pytest.mark.parametrize("G", GROUPS, ids=repr)
    def test_axioms_on_a_ball(self, G):
        els = G.enumerate(12)
        e = G.identity()
        for a, b, c in itertools.product(els[:8], repeat=3):
            assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        for a in els:
            assert G.mul(a, e) == a == G.mul(e, a)
            assert G.mul(a, G.inv(a)) == e

    def test_lamplighter_is_nonabelian(self):
        G = LamplighterGroup(2)
        a, t = G.generators()
        assert G.mul(a, t) != G.mul(t, a)

    def test_orders(self):
        assert cyclic(6).order() == 6 and zd(1).order() is None
        assert TableGroup(S3_TABLE).order() == 6

    def test_build_group(self):
        assert build_group({"family": "product", "orders": [2, 2]}).order() == 4
        with pytest.raises(MalformedSpec):
            build_group({"family": "cyclic", "n": 1})
        with pytest.raises(MalformedSpec):
            build_group({"family": "zd"})
        with pytest.raises(StructureError):
            TableGroup([[0, 1], [0, 1]])

    def test_lattice_basis_spans(self):
        basis = lattice_basis([(2, 0), (0, 2), (1, 1)], 2)
        (a, b), (c, d) = basis
        assert abs(a * d - b * c) == 2


class TestShift:
    def test_point_canonical_forms(self):
        assert Point.periodic([0, 1, 0, 1]) == Point.periodic([0, 1])
        assert Point.periodic([1, 0]) == Point.periodic([0, 1]).shift(1)
        x = Point.from_parts([0], [1], [0])
        assert x.at(0) == 1 and x.at(5) == 0 and x.at(-5) == 0
        assert x.shift(3).at(-3) == 1
        assert Point.from_description(x.describe()) == x

    def test_period(self):
        assert Point.periodic([0, 0, 1]).period == 3
        assert Point.from_parts([0], [1], [0]).period is None

    @given(st.dictionaries(st.integers(-4, 4), st.integers(0, 1), max_size=4), st.integers(-3, 3))
    def test_translate_matches_shift(self, constraint, k):
        C = Cylinder.of(constraint)
        x = Point.from_parts([0, 1], [1, 1, 0, 1], [1, 0, 0])
        assert C.matches(x) == C.translate(k).matches(x.shift(-k))

    def test_words_respect_forbidden(self):
        L = Language(2, [(1, 1)])
        words = list(L.words(0, 4))
        assert len(words) == 13  # Fibonacci count of length-5 golden-mean words
        assert all("11" not in "".join(map(str, w)) for w in words)

    def test_isolated_cycles(self):
        assert Language(2, [(0, 0), (1, 1)]).isolated_cycles()
        assert not Language(2).isolated_cycles()
        assert not Language(2, [(1, 1)]).isolated_cycles()

    def test_forced_point(self):
        L = Language(2, [(0, 0), (1, 1)])
        x = L.forced_point((0, 1, 0), 0)
        assert x == Point.periodic([0, 1])
        assert Language(2).forced_point((0, 1), 0) is None
