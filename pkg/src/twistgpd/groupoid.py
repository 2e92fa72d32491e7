"""Discrete étale groupoid models.

Six constructors share one interface: structure maps (``range``, ``source``,
``compose``, ``invert``), fiber enumeration, isotropy, and interior-of-
isotropy tests.  All models except :class:`CylinderShift` are discrete, so
for them the interior of the isotropy equals the isotropy itself.

Transformation convention, used everywhere: the arrow ``(x, g)`` has range
``x`` and source ``x . g`` for a right action.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable

import numpy as np

from .errors import (
    MalformedSpec,
    NotComposable,
    StructureError,
    UnknownArrow,
    UnsupportedModel,
)
from .groups import AbelianGroup, FiniteSubgroup, Group, LatticeSubgroup, TableGroup, lattice_basis, zd
from .shift import Cylinder, Language, Point

__all__ = [
    "Tri",
    "Decision",
    "Fiber",
    "IsotropyEntry",
    "FiniteTables",
    "GroupoidModel",
    "FiniteExplicit",
    "GroupModel",
    "Pair",
    "GroupBundle",
    "TransformationFinite",
    "CylinderShift",
    "ShiftArrow",
    "ArrowBundle",
]


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Decision:
    outcome: Tri
    depth: int | None = None
    witness: Any = None
    note: str = ""
    evidence: dict = field(default_factory=dict)

    def __bool__(self):
        raise TypeError("use .outcome; a three-valued answer has no truth value")

    def record(self) -> dict:
        out = {"outcome": self.outcome.value}
        if self.depth is not None:
            out["depth"] = self.depth
        if self.witness is not None:
            out["witness"] = repr(self.witness)
        if self.note:
            out["note"] = self.note
        if self.evidence:
            out["evidence"] = self.evidence
        return out


@dataclass(frozen=True)
class Fiber:
    arrows: tuple
    truncated: bool


@dataclass
class IsotropyEntry:
    """Isotropy group at one unit, with a group handle when one is derivable."""

    unit: Hashable
    elements: list
    truncated: bool
    tag: str
    group: Group | None = None
    embed: Callable | None = None

    @property
    def trivial(self) -> bool:
        return not self.truncated and len(self.elements) == 1


@dataclass(frozen=True)
class FiniteTables:
    """Index tables of a finite groupoid; ``comp[a, b] == -1`` when not composable."""

    arrows: tuple
    index: dict
    rng: np.ndarray
    src: np.ndarray
    inv: np.ndarray
    comp: np.ndarray
    units: tuple  # arrow indices of unit arrows

    @property
    def size(self) -> int:
        return len(self.arrows)


class GroupoidModel:
    kind = "abstract"
    discrete = True

    def __init__(self):
        self.weak_containment = "derive"

    # -- to be provided by subclasses -------------------------------------------
    def range(self, a):
        raise NotImplementedError

    def source(self, a):
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def unit_arrow(self, x):
        raise NotImplementedError

    def canon(self, a):
        """Canonical form of an arrow descriptor; UnknownArrow if invalid."""
        raise NotImplementedError

    def canon_unit(self, x):
        raise NotImplementedError

    def units(self) -> list:
        raise UnsupportedModel(f"{self.kind} has an infinite unit space")

    def arrows(self) -> list:
        raise UnsupportedModel(f"{self.kind} has infinitely many arrows")

    def _source_fiber(self, x):
        """Iterator over G_x, finite models may rely on the default."""
        return (a for a in self.arrows() if self.source(a) == x)

    def _range_fiber(self, x):
        return (a for a in self.arrows() if self.range(a) == x)

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def amenable_by_construction(self) -> bool:
        return False

    def describe(self) -> dict:
        raise NotImplementedError

    # -- shared behaviour ----------------------------------------------------------

    def endpoints(self, a):
        return self.range(a), self.source(a)

    def composable(self, a, b) -> bool:
        return self.source(a) == self.range(b)

    def compose(self, a, b):
        if self.source(a) != self.range(b):
            raise NotComposable(f"s({a!r}) != r({b!r})", witness=(a, b))
        return self._mul(a, b)

    def is_unit(self, a) -> bool:
        return a == self.unit_arrow(self.range(a))

    def in_isotropy(self, a) -> bool:
        return self.range(a) == self.source(a)

    def fiber(self, x, direction: str = "source", bound: int = 64) -> Fiber:
        x = self.canon_unit(x)
        if direction not in ("source", "range"):
            raise ValueError("direction must be 'source' or 'range'")
        it = self._source_fiber(x) if direction == "source" else self._range_fiber(x)
        out = list(itertools.islice(it, bound + 1))
        truncated = len(out) > bound
        return Fiber(tuple(out[:bound]), truncated)

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        fib = self.fiber(x, "source", bound=10**9 if self.is_finite else bound)
        iso = [a for a in fib.arrows if self.range(a) == x]
        return IsotropyEntry(x, iso, fib.truncated, "enumerated", None)

    def interior_isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        """Iso°(G)_x; equal to the isotropy group on discrete models."""
        return self.isotropy_group(x, bound)

    def interior_isotropy_test(self, b, depth: int = 3) -> Decision:
        a = self.canon(b.arrow if isinstance(b, ArrowBundle) else b)
        if self.in_isotropy(a):
            return Decision(Tri.YES, depth, None, "discrete topology: singletons are open")
        return Decision(Tri.NO, depth, a, "arrow has distinct range and source")

    def is_topologically_principal(self, depth: int = 3) -> Decision:
        for x in self.units():
            entry = self.isotropy_group(x)
            nontriv = [a for a in entry.elements if not self.is_unit(a)]
            if nontriv:
                return Decision(Tri.NO, depth, nontriv[0], f"nontrivial isotropy at unit {x!r}")
        return Decision(Tri.YES, depth, None, "every isotropy group is trivial", {"units": len(self.units())})

    @cached_property
    def _tables(self) -> FiniteTables:
        arrows = tuple(self.arrows())
        index = {a: i for i, a in enumerate(arrows)}
        n = len(arrows)
        rng = np.array([index[self.unit_arrow(self.range(a))] for a in arrows], dtype=np.int64)
        src = np.array([index[self.unit_arrow(self.source(a))] for a in arrows], dtype=np.int64)
        inv = np.array([index[self.invert(a)] for a in arrows], dtype=np.int64)
        comp = np.full((n, n), -1, dtype=np.int64)
        by_range: dict[int, list[int]] = {}
        for j in range(n):
            by_range.setdefault(int(rng[j]), []).append(j)
        for i, a in enumerate(arrows):
            for j in by_range.get(int(src[i]), ()):
                comp[i, j] = index[self._mul(a, arrows[j])]
        units = tuple(sorted(set(int(u) for u in rng)))
        return FiniteTables(arrows, index, rng, src, inv, comp, units)

    def tables(self) -> FiniteTables:
        if not self.is_finite:
            raise UnsupportedModel(f"{self.kind} model is infinite")
        return self._tables

    def check_axioms(self, triples: bool = True):
        """Exhaustive axiom check on finite models; raises StructureError with a witness."""
        t = self.tables()
        n = t.size
        for i in range(n):
            r, s, v = t.rng[i], t.src[i], t.inv[i]
            if t.comp[r, i] != i or t.comp[i, s] != i:
                raise StructureError("unit laws fail", witness=(t.arrows[i],))
            if t.rng[v] != s or t.comp[i, v] != r or t.comp[v, i] != s:
                raise StructureError("inverse laws fail", witness=(t.arrows[i],))
            for j in range(n):
                k = t.comp[i, j]
                if k < 0:
                    continue
                if t.rng[k] != r or t.src[k] != t.src[j]:
                    raise StructureError("r(ab)=r(a), s(ab)=s(b) fails", witness=(t.arrows[i], t.arrows[j]))
        if triples:
            for i in range(n):
                for j in np.nonzero(t.comp[i] >= 0)[0]:
                    ij = t.comp[i, j]
                    row = t.comp[j]
                    for k in np.nonzero(row >= 0)[0]:
                        if t.comp[ij, k] != t.comp[i, row[k]]:
                            raise StructureError(
                                "composition is not associative",
                                witness=(t.arrows[i], t.arrows[j], t.arrows[k]),
                            )

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


# --------------------------------------------------------------------------------
# finite explicit


class FiniteExplicit(GroupoidModel):
    """Arbitrary finite groupoid on arrow ids 0..n-1 with tables supplied by the user."""

    kind = "finite"

    def __init__(self, units, range_map, source_map, inverse, compose_table, *, validate=True):
        super().__init__()
        n = len(range_map)
        if len(source_map) != n or len(inverse) != n:
            raise MalformedSpec("range, source and inverse tables must have equal length")
        self.n = n
        self._units = tuple(sorted(int(u) for u in units))
        self._r = tuple(int(v) for v in range_map)
        self._s = tuple(int(v) for v in source_map)
        self._inv = tuple(int(v) for v in inverse)
        comp = {}
        for (a, b), c in dict(compose_table).items():
            comp[(int(a), int(b))] = int(c)
        self._comp = comp
        ids = set(range(n))
        unit_set = set(self._units)
        for name, tab in (("range", self._r), ("source", self._s)):
            bad = [v for v in tab if v not in unit_set]
            if bad:
                raise MalformedSpec(f"{name} table points outside the unit list: {bad[:3]}")
        if not unit_set <= ids or any(v not in ids for v in self._inv):
            raise MalformedSpec("unit or inverse ids out of range")
        if any(a not in ids or b not in ids or c not in ids for (a, b), c in comp.items()):
            raise MalformedSpec("composition table refers to unknown arrows")
        for u in self._units:
            if self._r[u] != u or self._s[u] != u:
                raise StructureError("unit arrow is not fixed by range/source", witness=(u,))
        for a in range(n):
            for b in range(n):
                if self._s[a] == self._r[b] and (a, b) not in comp:
                    raise StructureError("composable pair missing from composition table", witness=(a, b))
                if self._s[a] != self._r[b] and (a, b) in comp:
                    raise StructureError("composition given for a non-composable pair", witness=(a, b))
        if validate:
            self.check_axioms()

    @property
    def is_finite(self):
        return True

    @property
    def amenable_by_construction(self):
        return True

    def range(self, a):
        return self._r[a]

    def source(self, a):
        return self._s[a]

    def _mul(self, a, b):
        return self._comp[(a, b)]

    def invert(self, a):
        return self._inv[a]

    def unit_arrow(self, x):
        return x

    def canon(self, a):
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or not 0 <= a < self.n:
            raise UnknownArrow(f"arrow id {a!r} out of range 0..{self.n - 1}", arrow=a)
        return int(a)

    def canon_unit(self, x):
        if x not in self._units:
            raise UnknownArrow(f"{x!r} is not a unit", unit=x)
        return x

    def units(self):
        return list(self._units)

    def arrows(self):
        return list(range(self.n))

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        iso = [a for a in range(self.n) if self._r[a] == x and self._s[a] == x]
        iso.remove(x)
        members = [x] + iso
        idx = {a: i for i, a in enumerate(members)}
        table = [[idx[self._comp[(a, b)]] for b in members] for a in members]
        grp = TableGroup(table)
        return IsotropyEntry(x, members, False, "isotropy table", grp, lambda i, m=members: m[i])

    def describe(self):
        return {
            "kind": "finite",
            "units": list(self._units),
            "range": list(self._r),
            "source": list(self._s),
            "inverse": list(self._inv),
            "compose": [[a, b, c] for (a, b), c in sorted(self._comp.items())],
        }

    @classmethod
    def from_model(cls, model: GroupoidModel) -> "FiniteExplicit":
        """Re-present any finite model on integer arrow ids."""
        t = model.tables()
        comp = {}
        for i in range(t.size):
            for j in np.nonzero(t.comp[i] >= 0)[0]:
                comp[(i, int(j))] = int(t.comp[i, j])
        return cls(t.units, t.rng.tolist(), t.src.tolist(), t.inv.tolist(), comp, validate=False)


# --------------------------------------------------------------------------------
# groups, pairs, bundles


class GroupModel(GroupoidModel):
    """A discrete group viewed as a groupoid with the single unit ``0``."""

    kind = "group"

    def __init__(self, group: Group):
        super().__init__()
        self.group = group

    @property
    def is_finite(self):
        return self.group.is_finite

    @property
    def amenable_by_construction(self):
        return self.group.amenable

    def range(self, a):
        return 0

    source = range

    def _mul(self, a, b):
        return self.group.mul(a, b)

    def invert(self, a):
        return self.group.inv(a)

    def unit_arrow(self, x):
        return self.group.identity()

    def canon(self, a):
        try:
            return self.group.normalize(a)
        except (ValueError, TypeError, KeyError) as exc:
            raise UnknownArrow(str(exc), arrow=a) from None

    def canon_unit(self, x):
        if x != 0:
            raise UnknownArrow("a group has the single unit 0", unit=x)
        return 0

    def units(self):
        return [0]

    def arrows(self):
        return self.group.elements()

    def _source_fiber(self, x):
        return iter(self.group._ball())

    _range_fiber = _source_fiber

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        self.canon_unit(x)
        g = self.group
        els = g.elements() if g.is_finite else g.enumerate(bound)
        return IsotropyEntry(0, els, not g.is_finite, "whole group", g, lambda a: a)

    def describe(self):
        return {"kind": "group", "group": self.group.describe()}


class Pair(GroupoidModel):
    """Pair groupoid on n points: arrows (i, j) with range i and source j."""

    kind = "pair"

    def __init__(self, n: int):
        super().__init__()
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise MalformedSpec(f"pair groupoid needs n >= 1, got {n!r}")
        self.n = n

    @property
    def is_finite(self):
        return True

    @property
    def amenable_by_construction(self):
        return True

    def range(self, a):
        return a[0]

    def source(self, a):
        return a[1]

    def _mul(self, a, b):
        return (a[0], b[1])

    def invert(self, a):
        return (a[1], a[0])

    def unit_arrow(self, x):
        return (x, x)

    def canon(self, a):
        try:
            i, j = a
        except (TypeError, ValueError):
            raise UnknownArrow(f"{a!r} is not a pair", arrow=a) from None
        if not all(isinstance(v, (int, np.integer)) and 0 <= v < self.n for v in (i, j)):
            raise UnknownArrow(f"{a!r} outside 0..{self.n - 1}", arrow=a)
        return (int(i), int(j))

    def canon_unit(self, x):
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
            raise UnknownArrow(f"{x!r} is not a unit", unit=x)
        return int(x)

    def units(self):
        return list(range(self.n))

    def arrows(self):
        return [(i, j) for i in range(self.n) for j in range(self.n)]

    def _source_fiber(self, x):
        return ((i, x) for i in range(self.n))

    def _range_fiber(self, x):
        return ((x, j) for j in range(self.n))

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        triv = AbelianGroup(())
        return IsotropyEntry(x, [(x, x)], False, "principal", triv, lambda _a, x=x: (x, x))

    def describe(self):
        return {"kind": "pair", "n": self.n}


class GroupBundle(GroupoidModel):
    """Disjoint union of groups over a finite unit list; arrows (unit, g)."""

    kind = "group_bundle"

    def __init__(self, units, groups):
        super().__init__()
        units = list(units)
        groups = list(groups)
        if len(units) != len(groups) or not units:
            raise MalformedSpec("group bundle needs one group per unit")
        if len(set(units)) != len(units):
            raise MalformedSpec("duplicate unit labels")
        self._units = units
        self.groups = dict(zip(units, groups))

    @property
    def is_finite(self):
        return all(g.is_finite for g in self.groups.values())

    @property
    def amenable_by_construction(self):
        return all(g.amenable for g in self.groups.values())

    def range(self, a):
        return a[0]

    source = range

    def _mul(self, a, b):
        return (a[0], self.groups[a[0]].mul(a[1], b[1]))

    def invert(self, a):
        return (a[0], self.groups[a[0]].inv(a[1]))

    def unit_arrow(self, x):
        return (x, self.groups[x].identity())

    def canon(self, a):
        try:
            u, g = a
            return (self.canon_unit(u), self.groups[u].normalize(g))
        except (TypeError, ValueError, KeyError) as exc:
            raise UnknownArrow(f"{a!r}: {exc}", arrow=a) from None

    def canon_unit(self, x):
        if x not in self.groups:
            raise UnknownArrow(f"{x!r} is not a unit", unit=x)
        return x

    def units(self):
        return list(self._units)

    def arrows(self):
        return [(u, g) for u in self._units for g in self.groups[u].elements()]

    def _source_fiber(self, x):
        return ((x, g) for g in self.groups[x]._ball())

    _range_fiber = _source_fiber

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        g = self.groups[x]
        els = g.elements() if g.is_finite else g.enumerate(bound)
        return IsotropyEntry(x, [(x, e) for e in els], not g.is_finite, "fiber group", g, lambda e, x=x: (x, e))

    def describe(self):
        return {
            "kind": "group_bundle",
            "units": list(self._units),
            "groups": [self.groups[u].describe() for u in self._units],
        }


# --------------------------------------------------------------------------------
# transformation groupoids


def _perm_power(p, k):
    n = len(p)
    out = list(range(n))
    base = list(p)
    if k < 0:
        inv = [0] * n
        for i, j in enumerate(base):
            inv[j] = i
        base, k = inv, -k
    while k:
        if k & 1:
            out = [base[i] for i in out]
        base = [base[i] for i in base]
        k >>= 1
    return tuple(out)


def _perm_order(p):
    q = tuple(p)
    ident = tuple(range(len(p)))
    k = 1
    while q != ident:
        q = tuple(p[i] for i in q)
        k += 1
    return k


class TransformationFinite(GroupoidModel):
    """Right action of a group on a finite point set; arrows (x, g), r = x, s = x.g.

    The action is given either as one permutation of point indices per
    generator (abelian families) or as a full table ``action[x][g_index]``
    over ``group.elements()`` (finite groups).
    """

    kind = "transformation"

    def __init__(self, points, group: Group, *, generators=None, table=None):
        super().__init__()
        points = list(points)
        if not points or len(set(points)) != len(points):
            raise MalformedSpec("points must be a nonempty list of distinct labels")
        self.points = points
        self.pindex = {p: i for i, p in enumerate(points)}
        self.group = group
        n = len(points)
        if (generators is None) == (table is None):
            raise MalformedSpec("give exactly one of 'generators' or 'table' for the action")
        if generators is not None:
            if not isinstance(group, AbelianGroup):
                raise MalformedSpec("generator actions are supported for abelian families; use a table")
            gens = [tuple(int(v) for v in p) for p in generators]
            if len(gens) != group.rank or any(sorted(p) != list(range(n)) for p in gens):
                raise MalformedSpec("need one permutation of point indices per generator")
            for i, (p, order) in enumerate(zip(gens, group.orders)):
                if order and _perm_power(p, order) != tuple(range(n)):
                    raise StructureError("generator permutation order does not divide the cyclic order", witness=(i,))
            for p, q in itertools.combinations(gens, 2):
                if tuple(p[i] for i in q) != tuple(q[i] for i in p):
                    raise StructureError("generator permutations do not commute", witness=(p, q))
            self._gens = gens
            self._gen_orders = [_perm_order(p) for p in gens]
            self._table = None
        else:
            if not group.is_finite:
                raise MalformedSpec("table actions need a finite group")
            els = group.elements()
            self._gidx = {g: i for i, g in enumerate(els)}
            tab = [[int(v) for v in row] for row in table]
            if len(tab) != n or any(len(row) != len(els) or any(not 0 <= v < n for v in row) for row in tab):
                raise MalformedSpec("action table must be points x group elements of point indices")
            self._table = tab
            self._gens = None
            e = self._gidx[group.identity()]
            for x in range(n):
                if tab[x][e] != x:
                    raise StructureError("identity does not act trivially", witness=(points[x],))
                for g, h in itertools.product(els, repeat=2):
                    lhs = tab[tab[x][self._gidx[g]]][self._gidx[h]]
                    rhs = tab[x][self._gidx[group.mul(g, h)]]
                    if lhs != rhs:
                        raise StructureError("not a right action: (x.g).h != x.(gh)", witness=(points[x], g, h))

    def act(self, x, g):
        i = self.pindex[x]
        if self._table is not None:
            return self.points[self._table[i][self._gidx[g]]]
        for p, k, o in zip(self._gens, g, self._gen_orders):
            i = _perm_power(p, k % o)[i]
        return self.points[i]

    @property
    def is_finite(self):
        return self.group.is_finite

    @property
    def amenable_by_construction(self):
        return self.group.amenable

    def range(self, a):
        return a[0]

    def source(self, a):
        return self.act(a[0], a[1])

    def _mul(self, a, b):
        return (a[0], self.group.mul(a[1], b[1]))

    def invert(self, a):
        return (self.act(a[0], a[1]), self.group.inv(a[1]))

    def unit_arrow(self, x):
        return (x, self.group.identity())

    def canon(self, a):
        try:
            x, g = a
            return (self.canon_unit(x), self.group.normalize(g))
        except (TypeError, ValueError) as exc:
            raise UnknownArrow(f"{a!r}: {exc}", arrow=a) from None

    def canon_unit(self, x):
        if x not in self.pindex:
            raise UnknownArrow(f"{x!r} is not a point", unit=x)
        return x

    def units(self):
        return list(self.points)

    def arrows(self):
        return [(x, g) for x in self.points for g in self.group.elements()]

    def _source_fiber(self, x):
        # (y, g) with y.g = x, i.e. y = x.g^-1
        for g in self.group._ball():
            yield (self.act(x, self.group.inv(g)), g)

    def _range_fiber(self, x):
        return ((x, g) for g in self.group._ball())

    def stabilizer(self, x, bound: int = 64):
        """Stabilizer of x as a group handle, computed from the action."""
        G = self.group
        if G.is_finite:
            fixed = [g for g in G.elements() if self.act(x, g) == x]
            return FiniteSubgroup(G, fixed), False
        if isinstance(G, AbelianGroup) and all(o == 0 for o in G.orders):
            # the action factors through prod Z_{o_i}, o_i = generator permutation orders
            box = [range(o) for o in self._gen_orders]
            vecs = [t for t in itertools.product(*box) if self.act(x, t) == x]
            vecs += [tuple(o if i == j else 0 for j in range(G.rank)) for i, o in enumerate(self._gen_orders)]
            basis = lattice_basis(vecs, G.rank)
            return LatticeSubgroup(G, basis), False
        return None, True

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        sub, truncated = self.stabilizer(x, bound)
        if sub is None:
            els = [g for g in self.group.enumerate(bound) if self.act(x, g) == x]
            return IsotropyEntry(x, [(x, g) for g in els], True, "stabilizer (bounded search)", None)
        if isinstance(sub, FiniteSubgroup):
            els = [(x, g) for g in sub.members]
            return IsotropyEntry(x, els, False, "stabilizer", sub, lambda i, x=x, s=sub: (x, s.embed(i)))
        els = [(x, sub.embed(v)) for v in sub.enumerate(bound)]
        return IsotropyEntry(x, els, True, "stabilizer lattice", sub, lambda v, x=x, s=sub: (x, s.embed(v)))

    def is_topologically_principal(self, depth: int = 3) -> Decision:
        if not self.group.is_finite:
            x = self.points[0]
            entry = self.isotropy_group(x, 2)
            return Decision(Tri.NO, depth, entry.elements[1], "finite orbit of an infinite group has infinite isotropy")
        return super().is_topologically_principal(depth)

    def describe(self):
        out = {"kind": "transformation", "points": list(self.points), "group": self.group.describe()}
        if self._table is not None:
            out["action"] = {"table": [list(r) for r in self._table]}
        else:
            out["action"] = {"generators": [list(p) for p in self._gens]}
        return out


# --------------------------------------------------------------------------------
# cylinder shifts


@dataclass(frozen=True)
class ShiftArrow:
    point: Point
    shift: int

    def __repr__(self):
        return f"({self.point!r}, {self.shift})"


@dataclass(frozen=True)
class ArrowBundle:
    """Compact open bisection {(x, n) : x matches the cylinder}; or a single arrow on discrete models."""

    cylinder: Cylinder | None = None
    shift: int = 0
    arrow: Any = None

    @classmethod
    def of(cls, constraint, shift: int) -> "ArrowBundle":
        return cls(Cylinder.of(constraint), int(shift))

    def __repr__(self):
        if self.arrow is not None:
            return f"Bundle({self.arrow!r})"
        return f"Bundle({self.cylinder.as_dict()}, shift={self.shift})"


class CylinderShift(GroupoidModel):
    """Transformation groupoid X x| Z of a subshift X of {0..k-1}^Z, product topology.

    Units are eventually periodic points; arrows are :class:`ShiftArrow`.
    """

    kind = "cylinder_shift"
    discrete = False

    def __init__(self, alphabet: int, forbidden=(), *, check_depth: int = 8):
        super().__init__()
        self.language = Language(alphabet, forbidden)
        self.alphabet = alphabet
        self.check_depth = check_depth
        if not self.language.is_nonempty():
            raise StructureError("forbidden words leave an empty subshift", witness=self.language.forbidden)
        self.group = zd(1)

    @property
    def forbidden(self):
        return self.language.forbidden

    @property
    def amenable_by_construction(self):
        return True

    def range(self, a):
        return a.point

    def source(self, a):
        return a.point.shift(a.shift)

    def _mul(self, a, b):
        return ShiftArrow(a.point, a.shift + b.shift)

    def invert(self, a):
        return ShiftArrow(a.point.shift(a.shift), -a.shift)

    def unit_arrow(self, x):
        return ShiftArrow(x, 0)

    def canon_unit(self, x):
        if isinstance(x, dict):
            x = Point.from_description(x)
        if not isinstance(x, Point):
            raise UnknownArrow(f"{x!r} is not a point", unit=x)
        if not self.language.contains(x):
            raise UnknownArrow(f"{x!r} is not in the subshift", unit=x)
        return x

    def canon(self, a):
        if isinstance(a, tuple) and len(a) == 2:
            a = ShiftArrow(*a)
        if not isinstance(a, ShiftArrow) or isinstance(a.shift, bool) or not isinstance(a.shift, int):
            raise UnknownArrow(f"{a!r} is not a shift arrow", arrow=a)
        return ShiftArrow(self.canon_unit(a.point), a.shift)

    def _shifts(self):
        yield 0
        n = 1
        while True:
            yield -n
            yield n
            n += 1

    def _source_fiber(self, x):
        return (ShiftArrow(x.shift(-n), n) for n in self._shifts())

    def _range_fiber(self, x):
        return (ShiftArrow(x, n) for n in self._shifts())

    def isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        if not x.is_periodic:
            return IsotropyEntry(x, [ShiftArrow(x, 0)], False, "aperiodic point", zd(0), lambda _v, x=x: ShiftArrow(x, 0))
        p = x.period
        sub = LatticeSubgroup(self.group, [(p,)])
        els = [ShiftArrow(x, v[0] * p) for v in sub.enumerate(bound)]
        return IsotropyEntry(x, els, True, f"periodic point, isotropy {p}Z", sub, lambda v, x=x, p=p: ShiftArrow(x, v[0] * p))

    def interior_isotropy_group(self, x, bound: int = 64) -> IsotropyEntry:
        x = self.canon_unit(x)
        if self.language.on_isolated_cycle(x):
            entry = self.isotropy_group(x, bound)
            entry.tag = "isolated periodic point: isotropy is open"
            return entry
        return IsotropyEntry(x, [ShiftArrow(x, 0)], False, "no neighbourhood of x is periodic", zd(0),
                             lambda _v, x=x: ShiftArrow(x, 0))

    def interior_isotropy_test(self, b, depth: int = 3) -> Decision:
        """Is the whole bundle inside Iso(G) (hence inside its interior, being open)?

        No: an admissible window word on [-depth, depth] (widened to cover the
        constraint) already disagrees with its own n-shift.  Yes: every
        admissible window word forces a unique point and that point is
        n-periodic.  Otherwise Unknown at this depth.
        """
        if isinstance(b, ShiftArrow):
            b = ArrowBundle(Cylinder.word(b.point.window(-depth, depth), -depth), b.shift)
        n = b.shift
        if n == 0:
            return Decision(Tri.YES, depth, None, "shift 0: the bundle lies in the unit space")
        lo, hi = -depth, depth
        if b.cylinder.bounds():
            clo, chi = b.cylinder.bounds()
            lo, hi = min(lo, clo), max(hi, chi)
        words = []
        for w in self.language.words(lo, hi, b.cylinder):
            for i in range(len(w) - abs(n)):
                if w[i] != w[i + abs(n)]:
                    witness = ShiftArrow(self.language.extend(w, lo), n)
                    return Decision(Tri.NO, depth, witness, "window word moved by the shift",
                                    {"window": [lo, hi], "word": list(w)})
            words.append(w)
        if not words:
            return Decision(Tri.YES, depth, None, "empty bundle")
        forced = [self.language.forced_point(w, lo) for w in words]
        if all(x is not None and x.shift(n) == x for x in forced):
            return Decision(Tri.YES, depth, None, "every point of the bundle is forced and periodic",
                            {"points": len(forced)})
        return Decision(Tri.UNKNOWN, depth, None, "no certificate within the depth window")

    def basic_bundles(self, depth: int):
        """Admissible cylinders on [-r, r], r < depth, with shifts 1 <= |n| <= depth."""
        for r in range(depth):
            for w in self.language.words(-r, r):
                cyl = Cylinder.word(w, -r)
                for n in range(1, depth + 1):
                    yield ArrowBundle(cyl, n)
                    yield ArrowBundle(cyl, -n)

    def is_topologically_principal(self, depth: int = 3) -> Decision:
        iso = self.language.isolated_cycles()
        if iso:
            x = Point.periodic(iso[0])
            return Decision(Tri.NO, depth, ShiftArrow(x, x.period),
                            "isolated periodic orbit: its isotropy is open", {"isolated_orbits": len(iso)})
        checked = 0
        for bundle in self.basic_bundles(depth):
            # widen the window by the shift so a radius-(depth-1) cylinder still has room to move
            d = self.interior_isotropy_test(bundle, depth + abs(bundle.shift))
            checked += 1
            if d.outcome is Tri.YES:
                return Decision(Tri.NO, depth, bundle, "bundle of periodic points", {"bundles_checked": checked})
            if d.outcome is Tri.UNKNOWN:
                return Decision(Tri.UNKNOWN, depth, bundle, "bundle undecided at this depth",
                                {"bundles_checked": checked})
        return Decision(
            Tri.YES,
            depth,
            None,
            "every basic bundle up to the depth carries a moved point; the block graph has no isolated orbit",
            {"bundles_checked": checked, "block_length": self.language.block},
        )

    def describe(self):
        return {"kind": "cylinder_shift", "alphabet": self.alphabet, "forbidden": [list(w) for w in self.forbidden]}


ArrowLike = Hashable
