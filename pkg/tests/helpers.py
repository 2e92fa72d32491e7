"""Random finite groupoids and cocycles for property tests."""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from twistgpd.algebra import Element
from twistgpd.cocycle import FiniteTable
from twistgpd.groupoid import FiniteExplicit
from twistgpd.groups import TableGroup, cyclic, product_of_cyclics
from twistgpd.phase import Cyclo, Phase

S3_TABLE = [
    [0, 1, 2, 3, 4, 5],
    [1, 2, 0, 5, 3, 4],
    [2, 0, 1, 4, 5, 3],
    [3, 4, 5, 0, 1, 2],
    [4, 5, 3, 2, 0, 1],
    [5, 3, 4, 1, 2, 0],
]


def small_groups():
    return [
        cyclic(2), cyclic(3), cyclic(4), cyclic(6),
        product_of_cyclics([2, 2]), product_of_cyclics([2, 4]), product_of_cyclics([3, 3]),
        product_of_cyclics([2, 6]),
        TableGroup(S3_TABLE),
    ]


class Component:
    """Transitive piece Pair(n) x G with arrows (i, g, j)."""

    def __init__(self, n, group, offset):
        self.n, self.group, self.offset = n, group, offset
        els = group.elements()
        self.els = els
        e = group.identity()
        # unit arrows first so that unit i has id offset + i
        self.arrows = [(i, e, i) for i in range(n)]
        self.arrows += [(i, g, j) for i in range(n) for g in els for j in range(n) if not (i == j and g == e)]
        self.index = {a: offset + k for k, a in enumerate(self.arrows)}


def transitive_union(parts):
    """FiniteExplicit disjoint union of Pair(n) x G pieces; returns (model, components)."""
    comps, offset = [], 0
    for n, G in parts:
        c = Component(n, G, offset)
        comps.append(c)
        offset += len(c.arrows)
    rng_map, src_map, inv, units, comp = [], [], [], [], {}
    for c in comps:
        for (i, g, j) in c.arrows:
            rng_map.append(c.offset + i)
            src_map.append(c.offset + j)
            inv.append(c.index[(j, c.group.inv(g), i)])
        units += [c.offset + i for i in range(c.n)]
        for (i, g, j), (j2, h, k) in itertools.product(c.arrows, repeat=2):
            if j == j2:
                comp[(c.index[(i, g, j)], c.index[(j2, h, k)])] = c.index[(i, c.group.mul(g, h), k)]
    return FiniteExplicit(units, rng_map, src_map, inv, comp, validate=False), comps


def random_groupoid(rnd: random.Random, max_arrows: int = 200):
    parts, total = [], 0
    groups = small_groups()
    for _ in range(rnd.randint(1, 3)):
        G = rnd.choice(groups)
        n = rnd.randint(1, 3)
        size = n * n * G.order()
        if total + size > max_arrows:
            continue
        parts.append((n, G))
        total += size
    if not parts:
        parts = [(1, cyclic(2))]
    return transitive_union(parts)


def _group_phase(G, theta, g, h):
    """Bilinear phase g^T theta h on a product of cyclics, as a Fraction."""
    return sum(theta[a][b] * g[a] * h[b] for a in range(len(g)) for b in range(len(h)))


def random_bicharacter(rnd, G, level):
    """Theta with entries in (1/gcd(n_a, n_b)) Z whose denominators divide ``level``."""
    if not hasattr(G, "orders"):
        return None
    theta = []
    for a, na in enumerate(G.orders):
        row = []
        for b, nb in enumerate(G.orders):
            g = math.gcd(na, nb, level)
            row.append(Fraction(rnd.randrange(g), g) if g > 1 else Fraction(0))
        theta.append(row)
    return theta


def random_cocycle(rnd, model, comps, level=None):
    """Exact FiniteTable: a bicharacter class per component plus a random coboundary, denominators <= 12."""
    m = level or rnd.choice([2, 3, 4, 6, 12])
    b = {}
    for c in comps:
        for a in c.arrows:
            i, g, j = a
            if not (i == j and g == c.group.identity()):
                b[c.index[a]] = Fraction(rnd.randrange(m), m)
    entries = {}
    for c in comps:
        theta = random_bicharacter(rnd, c.group, m)
        for (i, g, j), (j2, h, k) in itertools.product(c.arrows, repeat=2):
            if j != j2:
                continue
            a, d = c.index[(i, g, j)], c.index[(j2, h, k)]
            ad = c.index[(i, c.group.mul(g, h), k)]
            q = b.get(a, 0) + b.get(d, 0) - b.get(ad, 0)
            if theta is not None:
                q += _group_phase(c.group, theta, g, h)
            q %= 1
            if q:
                entries[(a, d)] = Phase(q)
    return FiniteTable(model, m, entries)


def random_exact_element(rnd, model, terms=4, roots=(1, 2, 3, 4, 6, 12)):
    arrows = model.arrows()
    items = []
    for _ in range(terms):
        a = rnd.choice(arrows)
        k = rnd.choice(roots)
        c = Cyclo.root(rnd.randrange(k), k) * Cyclo.from_rational(Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)))
        items.append((a, c))
    return Element.build(model, items)


def random_gaussian_element(rnd, model, terms=4, arrows=None):
    arrows = arrows or model.arrows()
    items = [
        (rnd.choice(arrows), Cyclo.gaussian(Fraction(rnd.randint(-5, 5), rnd.randint(1, 4)),
                                           Fraction(rnd.randint(-5, 5), rnd.randint(1, 4))))
        for _ in range(terms)
    ]
    return Element.build(model, items)
