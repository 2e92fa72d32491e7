"""Discrete groups used as groupoids, acting groups and isotropy groups.

Elements are hashable normal forms.  Every family knows whether it is
finite, abelian or amenable *by construction*; nothing here tries to decide
those properties for an arbitrary presentation.
"""
from __future__ import annotations

import itertools
import math
from typing import Hashable, Iterator

from .errors import MalformedSpec, StructureError

__all__ = [
    "Group",
    "AbelianGroup",
    "TableGroup",
    "LamplighterGroup",
    "DirectSumGroup",
    "FiniteSubgroup",
    "LatticeSubgroup",
    "zd",
    "cyclic",
    "product_of_cyclics",
]


class Group:
    """Interface shared by every group family."""

    family = "abstract"
    #: constructor facts, never computed for arbitrary input
    abelian = False
    amenable = False

    def identity(self) -> Hashable:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def normalize(self, a):
        """Canonical form of a user-supplied element; raises ValueError if invalid."""
        raise NotImplementedError

    def order(self) -> int | None:
        return None

    @property
    def is_finite(self) -> bool:
        return self.order() is not None

    def elements(self) -> list:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.enumerate(self.order())

    def enumerate(self, bound: int) -> list:
        """First ``bound`` elements in ball order (identity first)."""
        return list(itertools.islice(self._ball(), bound))

    def _ball(self) -> Iterator:
        raise NotImplementedError

    def generators(self) -> list:
        raise NotImplementedError

    def contains(self, a) -> bool:
        try:
            self.normalize(a)
        except (ValueError, TypeError):
            return False
        return True

    def power(self, a, k: int):
        out = self.identity()
        base = a if k >= 0 else self.inv(a)
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()

    def describe(self) -> dict:
        return {"family": self.family}


class AbelianGroup(Group):
    """Z^a x Z_{n_1} x ... with ``orders`` entries 0 meaning Z."""

    abelian = True
    amenable = True

    def __init__(self, orders):
        orders = tuple(int(n) for n in orders)
        if any(n < 0 or n == 1 for n in orders):
            raise MalformedSpec(f"cyclic orders must be 0 (for Z) or >= 2, got {orders}")
        self.orders = orders
        self.rank = len(orders)

    @property
    def family(self):
        if all(n == 0 for n in self.orders):
            return "zd"
        if len(self.orders) == 1:
            return "cyclic"
        return "product"

    def _key(self):
        return self.orders

    def identity(self):
        return (0,) * self.rank

    def _red(self, t):
        return tuple(x % n if n else x for x, n in zip(t, self.orders))

    def mul(self, a, b):
        return self._red(tuple(x + y for x, y in zip(a, b)))

    def inv(self, a):
        return self._red(tuple(-x for x in a))

    def normalize(self, a):
        if isinstance(a, bool):
            raise TypeError("bool is not a group element")
        if isinstance(a, int):
            a = (a,)
        a = tuple(a)
        if len(a) != self.rank or not all(isinstance(x, int) and not isinstance(x, bool) for x in a):
            raise ValueError(f"{a!r} is not an element of {self}")
        return self._red(a)

    def order(self):
        if any(n == 0 for n in self.orders):
            return None
        return math.prod(self.orders)

    def generators(self):
        return [tuple(1 if i == j else 0 for j in range(self.rank)) for i in range(self.rank)]

    def _ball(self):
        seen = set()
        total = self.order()
        if self.rank == 0:
            yield ()
            return
        r = 0
        while True:
            for t in itertools.product(range(-r, r + 1), repeat=self.rank):
                if max(abs(x) for x in t) != r:
                    continue
                e = self._red(t)
                if e not in seen:
                    seen.add(e)
                    yield e
            if total is not None and len(seen) >= total:
                return
            r += 1

    def sup_norm(self, a) -> int:
        return max((abs(x) for x in a), default=0)

    def describe(self):
        if self.family == "zd":
            return {"family": "zd", "d": self.rank}
        if self.family == "cyclic":
            return {"family": "cyclic", "n": self.orders[0]}
        return {"family": "product", "orders": list(self.orders)}

    def __repr__(self):
        if not self.orders:
            return "Trivial"
        return " x ".join("Z" if n == 0 else f"Z{n}" for n in self.orders)


def zd(d: int) -> AbelianGroup:
    return AbelianGroup((0,) * d)


def cyclic(n: int) -> AbelianGroup:
    return AbelianGroup((n,))


def product_of_cyclics(orders) -> AbelianGroup:
    return AbelianGroup(tuple(orders))


class TableGroup(Group):
    """Finite group given by its multiplication table on 0..n-1."""

    family = "table"
    amenable = True

    def __init__(self, table):
        try:
            table = tuple(tuple(int(x) for x in row) for row in table)
        except (TypeError, ValueError) as exc:
            raise MalformedSpec(f"multiplication table must be integer rows: {exc}") from None
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise MalformedSpec("multiplication table must be square and nonempty")
        if any(not 0 <= x < n for row in table for x in row):
            raise MalformedSpec("table entries must lie in 0..n-1")
        self.table = table
        self.n = n
        ids = [e for e in range(n) if all(table[e][a] == a and table[a][e] == a for a in range(n))]
        if not ids:
            raise StructureError("no identity element", witness=None)
        self._e = ids[0]
        self._inv = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == self._e and table[b][a] == self._e]
            if not inv:
                raise StructureError(f"element {a} has no inverse", witness=(a,))
            self._inv.append(inv[0])
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise StructureError("table is not associative", witness=(a, b, c))
        self.abelian = all(table[a][b] == table[b][a] for a in range(n) for b in range(n))

    def _key(self):
        return self.table

    def identity(self):
        return self._e

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def normalize(self, a):
        if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < self.n:
            raise ValueError(f"{a!r} is not an element of a group of order {self.n}")
        return a

    def order(self):
        return self.n

    def generators(self):
        return list(range(self.n))

    def _ball(self):
        yield self._e
        for a in range(self.n):
            if a != self._e:
                yield a

    def describe(self):
        return {"family": "table", "table": [list(r) for r in self.table]}

    def __repr__(self):
        return f"TableGroup(order={self.n})"


def _lamps(items, m):
    out = {}
    for pos, val in items:
        out[pos] = (out.get(pos, 0) + val) % m
    return tuple(sorted((p, v) for p, v in out.items() if v))


class DirectSumGroup(Group):
    """Finitely supported functions Z -> Z_m under pointwise addition."""

    family = "direct_sum"
    abelian = True
    amenable = True
    locally_finite = True

    def __init__(self, m: int):
        if int(m) < 2:
            raise MalformedSpec("lamp group order must be >= 2")
        self.m = int(m)

    def _key(self):
        return (self.m,)

    def identity(self):
        return ()

    def mul(self, a, b):
        return _lamps(a + b, self.m)

    def inv(self, a):
        return _lamps(((p, -v) for p, v in a), self.m)

    def normalize(self, a):
        if isinstance(a, dict):
            a = [(int(p), int(v)) for p, v in a.items()]
        return _lamps(tuple((int(p), int(v)) for p, v in a), self.m)

    def generators(self):
        return [((0, 1),)]

    def _ball(self):
        seen = set()
        r = 0
        while True:
            window = range(-r, r + 1)
            for vals in itertools.product(range(self.m), repeat=len(window)):
                e = _lamps(zip(window, vals), self.m)
                if e not in seen:
                    seen.add(e)
                    yield e
            r += 1

    def describe(self):
        return {"family": "direct_sum", "m": self.m}

    def __repr__(self):
        return f"(+)_Z Z{self.m}"


class LamplighterGroup(Group):
    """Wreath product Z_m wr Z = ((+)_Z Z_m) x| Z; elements (lamps, shift)."""

    family = "lamplighter"
    amenable = True

    def __init__(self, m: int):
        self.base = DirectSumGroup(m)
        self.m = self.base.m

    def _key(self):
        return (self.m,)

    def identity(self):
        return ((), 0)

    @staticmethod
    def _translate(lamps, a):
        return tuple((p + a, v) for p, v in lamps)

    def mul(self, x, y):
        (f, a), (g, b) = x, y
        return (_lamps(f + self._translate(g, a), self.m), a + b)

    def inv(self, x):
        f, a = x
        return (_lamps(((p, -v) for p, v in self._translate(f, -a)), self.m), -a)

    def normalize(self, x):
        lamps, shift = x
        if isinstance(shift, bool) or not isinstance(shift, int):
            raise ValueError("shift must be an integer")
        return (self.base.normalize(lamps), shift)

    def generators(self):
        return [(((0, 1),), 0), ((), 1)]

    def _ball(self):
        seen = set()
        r = 0
        while True:
            window = range(-r, r + 1)
            for shift in sorted(window, key=lambda s: (abs(s), s)):
                for vals in itertools.product(range(self.m), repeat=len(window)):
                    e = (_lamps(zip(window, vals), self.m), shift)
                    if e not in seen:
                        seen.add(e)
                        yield e
            r += 1

    def describe(self):
        return {"family": "lamplighter", "m": self.m}

    def __repr__(self):
        return f"Z{self.m} wr Z"


class FiniteSubgroup(Group):
    """A finite subgroup of a parent group, re-indexed as 0..k-1."""

    family = "subgroup"
    amenable = True

    def __init__(self, parent: Group, elements):
        self.parent = parent
        elements = list(elements)
        e = parent.identity()
        if e in elements:
            elements.remove(e)
        self.members = [e] + elements
        self.index = {g: i for i, g in enumerate(self.members)}
        for a in self.members:
            for b in self.members:
                if parent.mul(a, b) not in self.index:
                    raise StructureError("elements are not closed under multiplication", witness=(a, b))
        self.abelian = parent.abelian or all(
            parent.mul(a, b) == parent.mul(b, a) for a in self.members for b in self.members
        )

    def _key(self):
        return (id(self.parent), tuple(self.members))

    def identity(self):
        return 0

    def mul(self, a, b):
        return self.index[self.parent.mul(self.members[a], self.members[b])]

    def inv(self, a):
        return self.index[self.parent.inv(self.members[a])]

    def normalize(self, a):
        if isinstance(a, int) and 0 <= a < len(self.members):
            return a
        raise ValueError(f"{a!r} not in subgroup")

    def embed(self, a):
        return self.members[a]

    def order(self):
        return len(self.members)

    def generators(self):
        return list(range(len(self.members)))

    def _ball(self):
        return iter(range(len(self.members)))

    def describe(self):
        return {"family": "subgroup", "parent": self.parent.describe(), "elements": [repr(m) for m in self.members]}

    def __repr__(self):
        return f"subgroup of order {len(self.members)} in {self.parent!r}"


class LatticeSubgroup(AbelianGroup):
    """Full-rank-or-less sublattice of Z^d, identified with Z^k via ``basis``."""

    family = "lattice"

    def __init__(self, parent: AbelianGroup, basis):
        super().__init__((0,) * len(basis))
        self.parent = parent
        self.basis = [tuple(b) for b in basis]

    def _key(self):
        return (self.parent.orders, tuple(self.basis))

    def embed(self, a):
        out = [0] * self.parent.rank
        for c, b in zip(a, self.basis):
            for i, x in enumerate(b):
                out[i] += c * x
        return self.parent.normalize(tuple(out))

    def describe(self):
        return {"family": "lattice", "parent": self.parent.describe(), "basis": [list(b) for b in self.basis]}

    def __repr__(self):
        return f"lattice {self.basis} in {self.parent!r}"


def lattice_basis(vectors, dim: int) -> list[tuple[int, ...]]:
    """Echelon basis of the integer span of ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    basis = []
    for col in range(dim):
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda r: abs(r[col]))
            for r in nz:
                if r is not piv:
                    q = r[col] // piv[col]
                    r[:] = [x - q * y for x, y in zip(r, piv)]
            rows = [r for r in rows if any(r)]
        nz = [r for r in rows if r[col] != 0]
        if nz:
            piv = nz[0]
            if piv[col] < 0:
                piv[:] = [-x for x in piv]
            basis.append(tuple(piv))
            rows = [r for r in rows if r is not piv]
    return basis


def build_group(spec: dict) -> Group:
    """Construct a group from its JSON-compatible description."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise MalformedSpec("group spec needs a 'family' field")
    fam = spec["family"]
    allowed = {
        "zd": {"d"},
        "cyclic": {"n"},
        "product": {"orders"},
        "table": {"table"},
        "lamplighter": {"m"},
        "direct_sum": {"m"},
    }
    if fam not in allowed:
        raise MalformedSpec(f"unknown group family {fam!r}")
    extra = set(spec) - allowed[fam] - {"family"}
    if extra:
        raise MalformedSpec(f"unknown fields for {fam} group: {sorted(extra)}")
    missing = allowed[fam] - set(spec)
    if missing:
        raise MalformedSpec(f"missing fields for {fam} group: {sorted(missing)}")
    try:
        if fam == "zd":
            d = _nonneg_int(spec["d"], "d")
            return zd(d)
        if fam == "cyclic":
            n = _nonneg_int(spec["n"], "n")
            if n < 2:
                raise MalformedSpec("cyclic order must be >= 2")
            return cyclic(n)
        if fam == "product":
            return product_of_cyclics([_nonneg_int(n, "orders") for n in spec["orders"]])
        if fam == "table":
            return TableGroup(spec["table"])
        if fam == "lamplighter":
            return LamplighterGroup(_nonneg_int(spec["m"], "m"))
        return DirectSumGroup(_nonneg_int(spec["m"], "m"))
    except TypeError as exc:
        raise MalformedSpec(str(exc)) from None


def _nonneg_int(v, name):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise MalformedSpec(f"{name} must be a nonnegative integer, got {v!r}")
    return v
