"""One-sided certificate engine for C*-uniqueness of l^1(G, sigma).

The pipeline: weak containment must hold (by amenability or by user
assertion); a topologically principal groupoid is settled at once;
otherwise every interior-isotropy fiber group is classified, twisted
fibers first being replaced by their Mackey group.  A verdict is either
``CStarUnique`` with the full evidence chain or ``Inconclusive`` with the
first obstruction.  The engine never claims non-uniqueness.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .cocycle import (
    Bicharacter,
    MackeyGroup,
    NotCohomologousAtLevel,
    Trivial,
    TwoCocycle,
    cohomologous,
    mackey_group,
    restrict_to_fiber,
)
from .errors import TwistError
from .groupoid import CylinderShift, GroupModel, GroupoidModel, Tri
from .groups import AbelianGroup, DirectSumGroup, Group, LamplighterGroup
from .shift import Point

__all__ = [
    "ClassTag",
    "GroupClass",
    "WeakContainment",
    "WeakContainmentStatus",
    "Verdict",
    "UniquenessVerdict",
    "UNIQUE_CATALOG",
    "classify_group",
    "weak_containment_status",
    "analyze",
    "analyze_wreath",
]


class ClassTag(enum.Enum):
    TRIVIAL = "Trivial"
    FINITE = "Finite"
    FG_ABELIAN = "FinitelyGeneratedAbelian"
    LOCALLY_FINITE = "LocallyFinite"
    POLYNOMIAL_GROWTH = "PolynomialGrowthFlag"
    SEMIDIRECT_ABELIAN = "SemidirectOfAbelians"
    UNKNOWN = "Unknown"


#: classes whose l^1 algebras are known to be C*-unique; extend by passing ``catalog=``
UNIQUE_CATALOG = frozenset(t for t in ClassTag if t is not ClassTag.UNKNOWN)


@dataclass(frozen=True)
class GroupClass:
    tag: ClassTag
    provenance: str  # "enumerated", "constructor" or "asserted"
    note: str = ""

    def record(self):
        return {"class": self.tag.value, "provenance": self.provenance, "note": self.note}


def _finite_class(G: Group) -> GroupClass:
    n = G.order()
    if n == 1:
        return GroupClass(ClassTag.TRIVIAL, "enumerated", "one element")
    return GroupClass(ClassTag.FINITE, "enumerated", f"order {n}")


def _free_abelian(G) -> bool:
    return isinstance(G, AbelianGroup) and all(o == 0 for o in G.orders)


def classify_group(G: Group, asserted: str | ClassTag | None = None) -> GroupClass:
    """Best tag derivable from how the group was built; an assertion is only echoed."""
    if G.is_finite:
        return _finite_class(G)
    if isinstance(G, MackeyGroup):
        return _classify_mackey(G, asserted)
    if isinstance(G, AbelianGroup):
        if G.rank == 0:
            return GroupClass(ClassTag.TRIVIAL, "constructor", "rank 0")
        return GroupClass(ClassTag.FG_ABELIAN, "constructor", f"orders {list(G.orders)}")
    if isinstance(G, DirectSumGroup):
        return GroupClass(ClassTag.LOCALLY_FINITE, "constructor", f"direct sum of copies of Z_{G.m}")
    if isinstance(G, LamplighterGroup):
        return GroupClass(ClassTag.SEMIDIRECT_ABELIAN, "constructor", f"(sum of Z_{G.m}) semidirect Z")
    if asserted is not None:
        tag = asserted if isinstance(asserted, ClassTag) else ClassTag(asserted)
        return GroupClass(tag, "asserted", "user assertion, not checked")
    return GroupClass(ClassTag.UNKNOWN, "constructor", f"no constructor fact for {G!r}")


def _classify_mackey(G: MackeyGroup, asserted) -> GroupClass:
    base = classify_group(G.base)
    c = G.c
    if c.is_trivial:
        return GroupClass(base.tag, base.provenance, f"direct product with Z_{G.m}; base {base.note}")
    if G.abelian and base.tag in (ClassTag.FG_ABELIAN, ClassTag.TRIVIAL):
        return GroupClass(ClassTag.FG_ABELIAN, "constructor", f"symmetric cocycle: abelian extension by Z_{G.m}")
    if _free_abelian(G.base) and isinstance(c, Bicharacter) and c.exact:
        return GroupClass(
            ClassTag.POLYNOMIAL_GROWTH,
            "constructor",
            f"central extension of Z^{G.base.rank} by Z_{G.m}: nilpotent, finitely generated",
        )
    if base.tag is ClassTag.LOCALLY_FINITE:
        return GroupClass(ClassTag.LOCALLY_FINITE, "constructor", "finite extension of a locally finite group")
    if asserted is not None:
        tag = asserted if isinstance(asserted, ClassTag) else ClassTag(asserted)
        return GroupClass(tag, "asserted", "user assertion, not checked")
    return GroupClass(ClassTag.UNKNOWN, "constructor", "twisted extension outside the derivable cases")


# --------------------------------------------------------------------------------
# weak containment


class WeakContainment(enum.Enum):
    AMENABLE = "HoldsByAmenability"
    ASSERTED = "Asserted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class WeakContainmentStatus:
    flag: WeakContainment
    justification: str

    def record(self):
        return {"status": self.flag.value, "justification": self.justification}


def _amenability_reason(model: GroupoidModel) -> str | None:
    if model.is_finite:
        return "finite groupoid"
    if not model.amenable_by_construction:
        return None
    if isinstance(model, CylinderShift):
        return "transformation groupoid of an action of the amenable group Z"
    if isinstance(model, GroupModel):
        return f"amenable group ({model.group.family})"
    return f"{model.kind} built from amenable groups"


def weak_containment_status(model: GroupoidModel, sigma: TwoCocycle | None = None) -> WeakContainmentStatus:
    """Amenable constructors give weak containment for every twist; otherwise only an assertion counts.

    A model flagged ``weak_containment: unknown`` withholds the constructor
    certificate, as for a user-supplied model whose amenability is not vouched for.
    """
    if model.weak_containment != "unknown":
        reason = _amenability_reason(model)
        if reason is not None:
            return WeakContainmentStatus(WeakContainment.AMENABLE, reason)
    if model.weak_containment == "asserted" or (sigma is not None and sigma.weak_containment == "asserted"):
        return WeakContainmentStatus(WeakContainment.ASSERTED, "asserted by the user for this twist")
    return WeakContainmentStatus(WeakContainment.UNKNOWN, "no amenability certificate and no assertion")


# --------------------------------------------------------------------------------
# verdicts


class Verdict(enum.Enum):
    UNIQUE = "CStarUnique"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class UniquenessVerdict:
    outcome: Verdict
    chain: list = field(default_factory=list)
    reason: str = ""

    @property
    def unique(self) -> bool:
        return self.outcome is Verdict.UNIQUE

    def record(self) -> dict:
        out = {"verdict": self.outcome.value, "chain": self.chain}
        if self.reason:
            out["reason"] = self.reason
        return out


def _inconclusive(chain, reason):
    chain.append({"step": "stop", "result": "inconclusive", "reason": reason})
    return UniquenessVerdict(Verdict.INCONCLUSIVE, chain, reason)


def _fiber_units(model: GroupoidModel):
    """Units whose fibers must be examined, with the coverage argument."""
    if isinstance(model, CylinderShift):
        pts = [Point.periodic(c) for c in model.language.isolated_cycles()]
        note = (
            "interior isotropy is nontrivial only on isolated periodic orbits of the block graph; "
            "fibers along an orbit are conjugate by the shift"
        )
        return pts, "block-graph certificate", note
    return model.units(), "exhaustive", f"all {len(model.units())} units"


def analyze(model: GroupoidModel, sigma: TwoCocycle | None = None, depth: int = 3, *,
            catalog=UNIQUE_CATALOG, asserted_classes: dict | None = None,
            isotropy_bound: int = 64) -> UniquenessVerdict:
    """Run the certificate pipeline; see the module docstring."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    sigma = sigma if sigma is not None else Trivial(model)
    asserted_classes = asserted_classes or {}
    chain: list = []

    wc = weak_containment_status(model, sigma)
    chain.append({"step": "weak-containment", **wc.record()})
    if wc.flag is WeakContainment.UNKNOWN:
        return _inconclusive(chain, "weak containment is not established")

    tp = model.is_topologically_principal(depth)
    step = {"step": "principal-route", "outcome": tp.outcome.value, "depth": depth, "note": tp.note}
    if tp.evidence:
        step["evidence"] = tp.evidence
    chain.append(step)
    if tp.outcome is Tri.YES:
        chain.append({"step": "conclusion", "route": "trivial interior isotropy", "result": "C*-unique for every twist"})
        return UniquenessVerdict(Verdict.UNIQUE, chain)

    units, coverage, note = _fiber_units(model)
    chain.append({"step": "fiber-coverage", "coverage": coverage, "note": note, "units": len(units)})
    for x in units:
        try:
            entry = model.interior_isotropy_group(x, isotropy_bound)
        except TwistError as exc:
            return _inconclusive(chain, f"isotropy at {x!r}: {exc}")
        H = entry.group
        if H is None:
            return _inconclusive(chain, f"isotropy at {x!r} has no group presentation")
        sigma_x = restrict_to_fiber(model, sigma, x, bound=isotropy_bound)
        fiber = {"step": "isotropy-fiber", "unit": repr(x), "group": repr(H), "isotropy": entry.tag}
        twisted = not sigma_x.is_trivial
        if twisted and H.is_finite and sigma_x.exact:
            m = sigma_x.denominator
            b = cohomologous(GroupModel(H), sigma_x, Trivial(GroupModel(H)), m)
            if not isinstance(b, NotCohomologousAtLevel):
                twisted = False
                fiber["untwisted_by"] = f"coboundary at level {m}"
        if twisted:
            m = sigma_x.denominator
            if m is None:
                fiber["twist"] = "float"
                chain.append(fiber)
                return _inconclusive(chain, f"twist at {x!r} is not a root of unity; no finite Mackey level")
            try:
                M = mackey_group(sigma_x, m)
            except TwistError as exc:
                chain.append(fiber)
                return _inconclusive(chain, f"Mackey group at {x!r}: {exc}")
            cls = classify_group(M, asserted_classes.get(repr(x)))
            fiber["mackey"] = {"level": m, "group": repr(M), "abelian": M.abelian}
        else:
            cls = classify_group(H, asserted_classes.get(repr(x)))
        fiber["twisted"] = twisted
        fiber.update(cls.record())
        chain.append(fiber)
        if cls.tag not in catalog:
            return _inconclusive(chain, f"fiber class {cls.tag.value} at {x!r} is not in the C*-unique catalog")
    chain.append({
        "step": "conclusion",
        "route": "interior isotropy fibers",
        "result": "every fiber algebra is C*-unique",
        "catalog": sorted(t.value for t in catalog),
    })
    return UniquenessVerdict(Verdict.UNIQUE, chain)


def analyze_wreath(m: int, depth: int = 4) -> UniquenessVerdict:
    """Lamplighter Z_m wr Z through its dual picture.

    The base sum of copies of Z_m is locally finite with dual the full shift
    on m letters, so l^1 of the lamplighter is l^1 of the shift
    transformation groupoid, which is then analysed.
    """
    base = DirectSumGroup(m)
    cls = classify_group(base)
    model = CylinderShift(m)
    verdict = analyze(model, Trivial(model), depth)
    verdict.chain.insert(0, {
        "step": "dual-transformation-groupoid",
        "group": repr(LamplighterGroup(m)),
        "base": cls.record(),
        "dual": f"full shift on {m} letters with the shift action of Z",
    })
    return verdict
