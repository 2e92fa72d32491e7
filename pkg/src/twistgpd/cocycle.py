"""Normalized 2-cocycles with values in the circle, written as additive phases.

Four variants are offered: :class:`Trivial`, :class:`FiniteTable`,
:class:`Bicharacter` (``sigma(m, n) = m^T Theta n`` on an abelian group) and
:class:`PullbackFromGroup` (a group cocycle read off the group coordinate of
a transformation groupoid).  Cohomology is decided at a fixed level ``m``,
i.e. with coefficients in the m-th roots of unity, by a Smith normal form
solve over the integers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import (
    CocycleViolation,
    EnumerationTruncated,
    IncompatibleDenominator,
    IncompatibleVariant,
    MalformedSpec,
    NotComposable,
)
from .groupoid import CylinderShift, GroupModel, GroupoidModel, ShiftArrow, TransformationFinite
from .groups import AbelianGroup, Group, LatticeSubgroup, TableGroup
from .phase import Phase, as_fraction
from .shift import Point

__all__ = [
    "TwoCocycle",
    "Trivial",
    "FiniteTable",
    "Bicharacter",
    "PullbackFromGroup",
    "Restricted",
    "OneCochain",
    "ValidationReport",
    "NotCohomologousAtLevel",
    "MackeyGroup",
    "validate_cocycle",
    "coboundary_from",
    "cohomologous",
    "restrict_to_fiber",
    "mackey_group",
    "sample_arrows",
    "build_cocycle",
]

ZERO = Phase(0)


class TwoCocycle:
    """A 2-cocycle bound to one groupoid model."""

    variant = "abstract"

    def __init__(self, model: GroupoidModel):
        self.model = model
        #: provenance of the weak-containment flag for this twist, see the engine
        self.weak_containment = None

    def phase(self, a, b) -> Phase:
        """sigma(a, b) without the composability check."""
        raise NotImplementedError

    def eval(self, a, b) -> Phase:
        if not self.model.composable(a, b):
            raise NotComposable(f"({a!r}, {b!r}) is not a composable pair", witness=(a, b))
        return self.phase(a, b)

    __call__ = eval

    @property
    def exact(self) -> bool:
        return True

    @property
    def denominator(self) -> int | None:
        """Least m with every value an m-th root of unity; None for float twists."""
        return 1

    @property
    def is_trivial(self) -> bool:
        return False

    def describe(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


class Trivial(TwoCocycle):
    variant = "trivial"

    def phase(self, a, b):
        return ZERO

    @property
    def is_trivial(self):
        return True

    def describe(self):
        return {"kind": "trivial"}


class FiniteTable(TwoCocycle):
    """Explicit values k/m on composable pairs of a finite model; absent pairs are 0."""

    variant = "table"

    def __init__(self, model, denominator: int, entries):
        super().__init__(model)
        if not model.is_finite:
            raise IncompatibleVariant("table cocycles need a finite model", model=model.kind)
        if isinstance(denominator, bool) or not isinstance(denominator, int) or denominator < 1:
            raise MalformedSpec(f"denominator must be a positive integer, got {denominator!r}")
        self.m = denominator
        table = {}
        for (a, b), k in dict(entries).items():
            a, b = model.canon(a), model.canon(b)
            if not model.composable(a, b):
                raise NotComposable(f"table entry on non-composable pair ({a!r}, {b!r})", witness=(a, b))
            p = Phase(Fraction(k, denominator)) if isinstance(k, int) else Phase(k)
            if p.exact and denominator % p.denominator:
                raise IncompatibleDenominator(f"value {p} is not a multiple of 1/{denominator}")
            if p:
                table[(a, b)] = p
        self.table = table

    def phase(self, a, b):
        return self.table.get((a, b), ZERO)

    @property
    def exact(self):
        return all(p.exact for p in self.table.values())

    @property
    def denominator(self):
        if not self.exact:
            return None
        return math.lcm(1, *(p.denominator for p in self.table.values()))

    @property
    def is_trivial(self):
        return not self.table

    def perturbed(self, a, b, k: int = 1) -> "FiniteTable":
        """Copy with the entry at (a, b) moved by k/m."""
        entries = dict(self.table)
        entries[(a, b)] = entries.get((a, b), ZERO) + Phase(Fraction(k, self.m))
        return FiniteTable(self.model, self.m, entries)

    def describe(self):
        return {
            "kind": "table",
            "denominator": self.m,
            "entries": [[a, b, str(p.q * self.m)] for (a, b), p in sorted(self.table.items(), key=lambda kv: repr(kv[0]))],
        }


def _theta_entry(v):
    if isinstance(v, float):
        return v
    return as_fraction(v)


class Bicharacter(TwoCocycle):
    """sigma(m, n) = m^T Theta n on an abelian group (Z factors, or finite ones where well defined)."""

    variant = "bicharacter"

    def __init__(self, model, theta):
        super().__init__(model)
        group = model.group if isinstance(model, GroupModel) else None
        if not isinstance(group, AbelianGroup):
            raise IncompatibleVariant("bicharacters live on abelian group models", model=model.kind)
        d = group.rank
        rows = [list(r) for r in theta]
        if len(rows) != d or any(len(r) != d for r in rows):
            raise MalformedSpec(f"theta must be {d}x{d}")
        self.theta = tuple(tuple(_theta_entry(v) for v in r) for r in rows)
        self.group = group
        for i, j in itertools.product(range(d), repeat=2):
            t = self.theta[i][j]
            for o in (group.orders[i], group.orders[j]):
                if o and (t * o) % 1 != 0:
                    raise IncompatibleVariant(
                        f"theta[{i}][{j}] = {t} is not well defined modulo the order {o}", entry=(i, j)
                    )

    def phase(self, a, b):
        th = self.theta
        total = 0
        for i, ai in enumerate(a):
            if ai:
                row = th[i]
                for j, bj in enumerate(b):
                    if bj:
                        total += ai * row[j] * bj
        return Phase(total)

    @property
    def exact(self):
        return all(not isinstance(t, float) for r in self.theta for t in r)

    @property
    def denominator(self):
        if not self.exact:
            return None
        return math.lcm(1, *(t.denominator for r in self.theta for t in r))

    @property
    def is_trivial(self):
        return all(t == 0 for r in self.theta for t in r)

    def antisymmetric_part(self):
        d = len(self.theta)
        return tuple(tuple(self.theta[i][j] - self.theta[j][i] for j in range(d)) for i in range(d))

    def describe(self):
        return {"kind": "bicharacter", "theta": [[str(t) if not isinstance(t, float) else t for t in r] for r in self.theta]}


def _group_coordinate(model):
    if isinstance(model, TransformationFinite):
        return lambda a: a[1]
    if isinstance(model, CylinderShift):
        return lambda a: (a.shift,)
    if isinstance(model, GroupModel):
        return lambda a: a
    return None


class PullbackFromGroup(TwoCocycle):
    """sigma((x, g), (x.g, h)) = c(g, h) for a cocycle c on the acting group."""

    variant = "pullback"

    def __init__(self, model, group_cocycle: TwoCocycle):
        super().__init__(model)
        coord = _group_coordinate(model)
        if coord is None:
            raise IncompatibleVariant("pullback cocycles need a transformation or group model", model=model.kind)
        inner_model = group_cocycle.model
        if not isinstance(inner_model, GroupModel) or inner_model.group != model.group:
            raise IncompatibleVariant("group cocycle lives on a different group")
        self.inner = group_cocycle
        self._coord = coord

    def phase(self, a, b):
        return self.inner.phase(self._coord(a), self._coord(b))

    @property
    def exact(self):
        return self.inner.exact

    @property
    def denominator(self):
        return self.inner.denominator

    @property
    def is_trivial(self):
        return self.inner.is_trivial

    def describe(self):
        return {"kind": "pullback", "group_cocycle": self.inner.describe()}


class Restricted(TwoCocycle):
    """Group cocycle (h, k) -> sigma(embed h, embed k) on an isotropy group."""

    variant = "restricted"

    def __init__(self, model: GroupModel, parent: TwoCocycle, embed: Callable):
        super().__init__(model)
        self.parent = parent
        self.embed = embed

    def phase(self, a, b):
        return self.parent.phase(self.embed(a), self.embed(b))

    @property
    def exact(self):
        return self.parent.exact

    @property
    def denominator(self):
        if not self.exact:
            return None
        if self.model.is_finite:
            els = self.model.group.elements()
            return math.lcm(1, *(self.phase(a, b).denominator for a in els for b in els))
        return self.parent.denominator

    @property
    def is_trivial(self):
        if self.parent.is_trivial:
            return True
        if self.model.is_finite:
            els = self.model.group.elements()
            return all(not self.phase(a, b) for a in els for b in els)
        return False

    def describe(self):
        return {"kind": "restricted", "parent": self.parent.describe()}


# --------------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    valid: bool
    pairs: int
    triples: int
    exhaustive: bool
    depth: int
    witness: tuple | None = None
    notes: list = field(default_factory=list)

    def record(self):
        out = {
            "valid": self.valid,
            "pairs_checked": self.pairs,
            "triples_checked": self.triples,
            "exhaustive": self.exhaustive,
            "depth": self.depth,
        }
        if self.witness is not None:
            out["witness"] = [repr(w) for w in self.witness]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _sample_points(model: CylinderShift, depth: int) -> list:
    lang = model.language
    pts = []
    for p in range(1, depth + 1):
        for w in lang.words(0, p - 1):
            x = Point.periodic(w)
            if lang.contains(x) and x not in pts:
                pts.append(x)
    for w in itertools.islice(lang.words(-depth, depth), 4 * depth):
        x = lang.extend(w, -depth)
        if x not in pts:
            pts.append(x)
    return pts


def sample_arrows(model: GroupoidModel, depth: int) -> tuple[list, bool]:
    """Arrows used for depth-bounded checks, and whether the list is the whole groupoid."""
    if model.is_finite:
        return model.arrows(), True
    shifts = range(-depth, depth + 1)
    if isinstance(model, CylinderShift):
        return [ShiftArrow(x, n) for x in _sample_points(model, depth) for n in shifts], False
    group = model.group
    if isinstance(group, AbelianGroup):
        ranges = [shifts if o == 0 else range(o) for o in group.orders]
        elements = [group.normalize(t) for t in itertools.product(*ranges)]
    else:
        elements = group.enumerate((2 * depth + 1) ** 2)
    if isinstance(model, GroupModel):
        return elements, False
    if isinstance(model, TransformationFinite):
        return [(x, g) for x in model.points for g in elements], False
    return [a for u in model.units() for a in model.fiber(u, "source", len(elements)).arrows], False


def _pairs(model, arrows, exhaustive):
    """Composable pairs with both members in ``arrows``."""
    if exhaustive:
        t = model.tables()
        for i, j in zip(*(t.comp >= 0).nonzero()):
            yield t.arrows[i], t.arrows[j]
        return
    by_range = {}
    for b in arrows:
        by_range.setdefault(model.range(b), []).append(b)
    for a in arrows:
        for b in by_range.get(model.source(a), ()):
            yield a, b


def validate_cocycle(model: GroupoidModel, sigma: TwoCocycle, depth: int = 2) -> ValidationReport:
    """Check normalization and the cocycle identity; raise CocycleViolation with a witness."""
    if sigma.model is not model and sigma.model.describe() != model.describe():
        raise IncompatibleVariant("cocycle was built for a different model")
    arrows, exhaustive = sample_arrows(model, depth)
    for g in arrows:
        r, s = model.unit_arrow(model.range(g)), model.unit_arrow(model.source(g))
        if sigma.phase(r, g) or sigma.phase(g, s):
            raise CocycleViolation("cocycle is not normalized", witness=(g,))
    if sigma.is_trivial:
        return ValidationReport(True, 0, 0, exhaustive, depth, notes=["trivial cocycle"])
    if exhaustive and sigma.exact:
        return _validate_finite_exact(model, sigma, depth)
    if isinstance(sigma, Bicharacter) and isinstance(model, GroupModel) and model.group == sigma.group:
        return _validate_bicharacter(model, sigma, arrows, depth)
    pairs = list(_pairs(model, arrows, exhaustive))
    after = {}
    for b, c in pairs:
        after.setdefault(b, []).append(c)
    triples = 0
    comp = model._mul
    for a, b in pairs:
        ab = comp(a, b)
        sab = sigma.phase(a, b)
        for c in after.get(b, ()):
            bc = comp(b, c)
            lhs = sab + sigma.phase(ab, c)
            rhs = sigma.phase(b, c) + sigma.phase(a, bc)
            triples += 1
            if lhs != rhs:
                raise CocycleViolation(
                    "cocycle identity fails", witness=(a, b, c), lhs=str(lhs), rhs=str(rhs)
                )
    return ValidationReport(True, len(pairs), triples, exhaustive, depth)


def _validate_finite_exact(model: GroupoidModel, sigma: TwoCocycle, depth: int) -> ValidationReport:
    """Exhaustive cocycle identity on integer phase tables, one middle arrow at a time."""
    t = model.tables()
    ii, jj = np.nonzero(t.comp >= 0)
    phases = [sigma.phase(t.arrows[i], t.arrows[j]) for i, j in zip(ii, jj)]
    level = math.lcm(1, *(p.denominator for p in phases))
    P = np.zeros(t.comp.shape, dtype=np.int64)
    P[ii, jj] = [int(p.q * level) % level for p in phases]
    triples = 0
    first = None
    for b in range(t.size):
        A = np.nonzero(t.comp[:, b] >= 0)[0]
        C = np.nonzero(t.comp[b] >= 0)[0]
        AB, BC = t.comp[A, b], t.comp[b, C]
        lhs = P[A, b][:, None] + P[AB[:, None], C[None, :]]
        rhs = P[b, C][None, :] + P[A[:, None], BC[None, :]]
        triples += len(A) * len(C)
        bad = np.argwhere((lhs - rhs) % level != 0)
        if len(bad):
            x, z = bad[0]
            cand = (int(A[x]), b, int(C[z]))
            first = cand if first is None or cand < first else first
    if first is not None:
        a, b, c = (t.arrows[k] for k in first)
        lhs = sigma.phase(a, b) + sigma.phase(model._mul(a, b), c)
        rhs = sigma.phase(b, c) + sigma.phase(a, model._mul(b, c))
        raise CocycleViolation("cocycle identity fails", witness=(a, b, c), lhs=str(lhs), rhs=str(rhs))
    return ValidationReport(True, len(ii), triples, True, depth, notes=[f"integer tables at level {level}"])


def _validate_bicharacter(model: GroupModel, sigma: "Bicharacter", arrows, depth: int) -> ValidationReport:
    """Cocycle identity for m^T Theta n on the sampled box, as integer (or float) matrix products."""
    orders = np.array(sigma.group.orders, dtype=np.int64)
    A = np.array(arrows, dtype=np.int64).reshape(len(arrows), len(orders))

    def norm(X):
        return np.where(orders > 0, X % np.where(orders > 0, orders, 1), X)

    if sigma.exact:
        level = sigma.denominator
        T = np.array([[int(t * level) for t in r] for r in sigma.theta], dtype=np.int64)

        def bad(d):
            return d % level != 0
    else:
        level = None
        T = np.array([[float(t) for t in r] for r in sigma.theta])

        def bad(d):
            r = np.abs(d) % 1.0
            return np.minimum(r, 1.0 - r) > 1e-10

    AT = A @ T
    first = None
    for k, b in enumerate(A):
        AB, BC = norm(A + b), norm(b + A)
        lhs = (AT @ b)[:, None] + (AB @ T) @ A.T
        rhs = (b @ T @ A.T)[None, :] + AT @ BC.T
        hits = np.argwhere(bad(lhs - rhs))
        if len(hits):
            cand = (int(hits[0][0]), k, int(hits[0][1]))
            first = cand if first is None or cand < first else first
    if first is not None:
        a, b, c = (arrows[i] for i in first)
        lhs = sigma.phase(a, b) + sigma.phase(model._mul(a, b), c)
        rhs = sigma.phase(b, c) + sigma.phase(a, model._mul(b, c))
        raise CocycleViolation("cocycle identity fails", witness=(a, b, c), lhs=str(lhs), rhs=str(rhs))
    n = len(arrows)
    note = f"integer forms at level {level}" if level else "float forms, tolerance 1e-10"
    return ValidationReport(True, n * n, n ** 3, False, depth, notes=[note])


# --------------------------------------------------------------------------------
# cochains and cohomology


class OneCochain:
    """Unit-normalized phase-valued function on arrows; absent arrows map to 0."""

    def __init__(self, model: GroupoidModel, values):
        self.model = model
        vals = {}
        for a, v in dict(values).items():
            a = model.canon(a)
            p = v if isinstance(v, Phase) else Phase(v)
            if model.is_unit(a) and p:
                raise CocycleViolation("cochain is not normalized at a unit", witness=(a,))
            if p:
                vals[a] = p
        self.values = vals

    def __call__(self, a) -> Phase:
        return self.values.get(a, ZERO)

    @property
    def is_zero(self):
        return not self.values

    def describe(self):
        return {"values": [[repr(a), str(p)] for a, p in self.values.items()]}

    def __repr__(self):
        return f"OneCochain({len(self.values)} nonzero values)"


def coboundary_from(model: GroupoidModel, b: OneCochain) -> TwoCocycle:
    """sigma(a, c) = b(a) + b(c) - b(ac) on a finite model."""
    if not isinstance(b, OneCochain):
        b = OneCochain(model, b)
    if b.is_zero:
        return Trivial(model)
    t = model.tables()
    entries = {}
    for i, j in zip(*(t.comp >= 0).nonzero()):
        a, c = t.arrows[i], t.arrows[j]
        p = b(a) + b(c) - b(t.arrows[t.comp[i, j]])
        if p:
            entries[(a, c)] = p
    exact = all(p.exact for p in b.values.values())
    m = math.lcm(1, *(p.denominator for p in b.values.values())) if exact else 1
    return FiniteTable(model, m, entries)


@dataclass(frozen=True)
class NotCohomologousAtLevel:
    level: int
    obstruction: str

    def record(self):
        return {"cohomologous": False, "level": self.level, "obstruction": self.obstruction}


def _level_values(sigma, pairs, m):
    out = []
    for a, b in pairs:
        p = sigma.phase(a, b)
        if not p.exact or m % p.denominator:
            raise IncompatibleDenominator(
                f"value {p} at {(a, b)!r} is not an {m}-th root of unity", witness=(a, b)
            )
        out.append(int(p.q * m))
    return out


def cohomologous(model: GroupoidModel, sigma1: TwoCocycle, sigma2: TwoCocycle, m: int):
    """Find b with sigma1 - sigma2 = db over Z_m, or certify that none exists at level m.

    Unknowns are b on non-unit arrows; each composable pair gives one linear
    congruence.  With the Smith form S = U A V the system A b = d (mod m)
    becomes S y = U d (mod m), b = V y, which splits into scalar congruences.
    """
    if not model.is_finite:
        raise IncompatibleVariant("cohomology at a fixed level is computed on finite models")
    t = model.tables()
    pairs = [(t.arrows[i], t.arrows[j]) for i, j in zip(*(t.comp >= 0).nonzero())]
    d = [(x - y) % m for x, y in zip(_level_values(sigma1, pairs, m), _level_values(sigma2, pairs, m))]
    unknowns = [a for a in t.arrows if not model.is_unit(a)]
    if not any(d):
        return OneCochain(model, {})
    col = {a: k for k, a in enumerate(unknowns)}
    rows = []
    for a, b in pairs:
        row = [0] * len(unknowns)
        ab = model._mul(a, b)
        for arrow, sign in ((a, 1), (b, 1), (ab, -1)):
            if arrow in col:
                row[col[arrow]] += sign
        rows.append(row)
    A = Matrix(rows)
    S, U, V = smith_normal_decomp(A)
    rhs = U * Matrix(d)
    y = []
    for i in range(S.rows):
        s = int(S[i, i]) if i < S.cols else 0
        r = int(rhs[i]) % m
        g = math.gcd(s, m)
        if r % g:
            return NotCohomologousAtLevel(m, f"invariant factor {s} cannot reach residue {r} mod {m}")
        if i < S.cols:
            if s % m == 0:
                y.append(0)
            else:
                y.append((r // g) * pow(s // g, -1, m // g) % (m // g))
    y += [0] * (S.cols - len(y))
    b = V * Matrix(y)
    values = {a: Phase(Fraction(int(b[col[a]]) % m, m)) for a in unknowns}
    return OneCochain(model, values)


# --------------------------------------------------------------------------------
# restriction and the Mackey group


def restrict_to_fiber(model: GroupoidModel, sigma: TwoCocycle, x, *, bound: int = 64, interior: bool = True):
    """The cocycle sigma_x on the (interior) isotropy group at x, as a group cocycle."""
    entry = model.interior_isotropy_group(x, bound) if interior else model.isotropy_group(x, bound)
    if entry.group is None:
        raise EnumerationTruncated(f"isotropy at {x!r} has no group presentation", unit=x)
    H = entry.group
    gm = GroupModel(H)
    if sigma.is_trivial:
        return Trivial(gm)
    base = sigma.inner if isinstance(sigma, PullbackFromGroup) else sigma
    if isinstance(base, Bicharacter) and isinstance(H, (AbelianGroup,)) and all(o == 0 for o in H.orders):
        if isinstance(H, LatticeSubgroup) and H.parent == base.group:
            B = H.basis
            k = len(B)
            th = base.theta
            theta = [[sum(B[i][p] * th[p][q] * B[j][q] for p in range(len(th)) for q in range(len(th)))
                      for j in range(k)] for i in range(k)]
            return Bicharacter(gm, theta)
        if H == base.group:
            return Bicharacter(gm, base.theta)
    return Restricted(gm, sigma, entry.embed)


class MackeyGroup(Group):
    """Central extension of a group by Z_m with product (x, s)(y, t) = (xy, s + t - m c(x, y))."""

    family = "mackey"

    def __init__(self, base: Group, c: TwoCocycle, m: int):
        if not c.exact:
            raise IncompatibleDenominator("the Mackey group needs an exact cocycle")
        self.base = base
        self.c = c
        self.m = m
        self.amenable = base.amenable
        self.abelian = self._compute_abelian()

    def _key(self):
        return (self.base._key(), self.m, repr(self.c.describe()))

    def _c(self, x, y) -> int:
        p = self.c.phase(x, y)
        if self.m % p.denominator:
            raise IncompatibleDenominator(f"c{(x, y)!r} = {p} is not an {self.m}-th root of unity")
        return int(p.q * self.m)

    def identity(self):
        return (self.base.identity(), 0)

    def mul(self, a, b):
        return (self.base.mul(a[0], b[0]), (a[1] + b[1] - self._c(a[0], b[0])) % self.m)

    def inv(self, a):
        xi = self.base.inv(a[0])
        return (xi, (self._c(a[0], xi) - a[1]) % self.m)

    def normalize(self, a):
        x, t = a
        return (self.base.normalize(x), int(t) % self.m)

    def order(self):
        o = self.base.order()
        return None if o is None else o * self.m

    def _ball(self):
        for x in self.base._ball():
            for t in range(self.m):
                yield (x, t)

    def generators(self):
        return [(g, 0) for g in self.base.generators()] + ([(self.base.identity(), 1)] if self.m > 1 else [])

    def _compute_abelian(self) -> bool:
        if not self.base.abelian:
            return False
        c = self.c
        if isinstance(c, Bicharacter) and all(o == 0 for o in c.group.orders):
            return all(v % 1 == 0 for r in c.antisymmetric_part() for v in r)
        gens = self.base.generators() if not self.base.is_finite else self.base.elements()
        return all(self._c(g, h) == self._c(h, g) for g in gens for h in gens)

    def table(self) -> TableGroup:
        els = self.elements()
        idx = {e: i for i, e in enumerate(els)}
        return TableGroup([[idx[self.mul(a, b)] for b in els] for a in els])

    def check_axioms(self, depth: int = 2):
        """Associativity on generators (exhaustive when finite) plus inverse laws."""
        els = self.elements() if self.is_finite else self.enumerate(min(64, (2 * depth + 1) ** 2 * self.m))
        gens = self.generators() + [self.identity()]
        e = self.identity()
        for a in els:
            if self.mul(a, self.inv(a)) != e or self.mul(self.inv(a), a) != e:
                raise CocycleViolation("inverse law fails in the Mackey group", witness=(a,))
            for b in els:
                for g in gens if not self.is_finite else els:
                    if self.mul(self.mul(a, b), g) != self.mul(a, self.mul(b, g)):
                        raise CocycleViolation("Mackey product is not associative", witness=(a, b, g))
        return True

    def describe(self):
        return {"family": "mackey", "base": self.base.describe(), "level": self.m, "cocycle": self.c.describe()}

    def __repr__(self):
        return f"Mackey({self.base!r}, level {self.m})"


def mackey_group(group_cocycle: TwoCocycle, m: int | None = None, *, depth: int = 2) -> MackeyGroup:
    """Mackey group of a cocycle on a group model, validated before construction."""
    gm = group_cocycle.model
    if not isinstance(gm, GroupModel):
        raise IncompatibleVariant("the Mackey group is built from a group cocycle")
    validate_cocycle(gm, group_cocycle, depth)
    if m is None:
        m = group_cocycle.denominator
        if m is None:
            raise IncompatibleDenominator("float cocycle has no root-of-unity level")
    grp = MackeyGroup(gm.group, group_cocycle, m)
    grp.check_axioms(depth)
    return grp


# --------------------------------------------------------------------------------
# spec parsing


def build_cocycle(model: GroupoidModel, spec: dict, arrow_parser: Callable | None = None) -> TwoCocycle:
    """Build a cocycle from its JSON-style description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MalformedSpec("cocycle spec needs a 'kind'")
    kind = spec["kind"]
    allowed = {
        "trivial": set(),
        "bicharacter": {"theta"},
        "table": {"denominator", "entries"},
        "pullback": {"group_cocycle"},
    }
    if kind not in allowed:
        raise MalformedSpec(f"unknown cocycle kind {kind!r}")
    extra = set(spec) - allowed[kind] - {"kind", "format_version", "weak_containment"}
    if extra:
        raise MalformedSpec(f"unknown fields for {kind} cocycle: {sorted(extra)}")
    missing = allowed[kind] - set(spec)
    if missing:
        raise MalformedSpec(f"missing fields for {kind} cocycle: {sorted(missing)}")
    try:
        if kind == "trivial":
            out = Trivial(model)
        elif kind == "bicharacter":
            out = Bicharacter(model, spec["theta"])
        elif kind == "table":
            parse = arrow_parser or (lambda a: a)
            m = spec["denominator"]
            entries = {}
            for item in spec["entries"]:
                a, b, k = item
                key = (model.canon(parse(a)), model.canon(parse(b)))
                q = as_fraction(k)
                if q.denominator != 1:
                    raise IncompatibleDenominator(f"entry {k} must be an integer numerator over {m}")
                entries[key] = entries.get(key, ZERO) + Phase(q / m)
            out = FiniteTable(model, m, entries)
        else:
            inner = build_cocycle(GroupModel(model.group), spec["group_cocycle"], arrow_parser)
            out = PullbackFromGroup(model, inner)
    except (TypeError, ValueError) as exc:
        raise MalformedSpec(f"bad {kind} cocycle: {exc}") from None
    flag = spec.get("weak_containment")
    if flag is not None:
        if flag not in ("asserted", "unknown", "derive"):
            raise MalformedSpec(f"weak_containment must be asserted, unknown or derive, got {flag!r}")
        out.weak_containment = flag
    return out
