"""JSON file formats for models, cocycles and elements.

Every file is an object with ``"format_version": 1``; unknown fields are
rejected.  Exact rationals are written as strings ``"p/q"``.  Arrows are
objects whose shape depends on the model kind:

==================  ==============================================
finite              ``{"id": 3}``
group               ``{"g": element}`` or ``{"n": 2}`` for rank one
pair                ``{"pair": [0, 2]}``
group_bundle        ``{"unit": u, "g": element}``
transformation      ``{"point": p, "g": element}``
cylinder_shift      ``{"cylinder": {"0": 1, "1": 0}, "shift": 1}``
==================  ==============================================

Group elements are integers (rank-one abelian and table groups), integer
lists (products), ``[[position, value], ...]`` (direct sums) or
``{"lamps": [...], "shift": k}`` (lamplighters).
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .algebra import Element
from .cocycle import TwoCocycle, build_cocycle
from .errors import MalformedSpec, ParseError, UnknownArrow
from .groupoid import (
    ArrowBundle,
    CylinderShift,
    FiniteExplicit,
    GroupBundle,
    GroupModel,
    GroupoidModel,
    Pair,
    ShiftArrow,
    TransformationFinite,
)
from .groups import AbelianGroup, DirectSumGroup, LamplighterGroup, build_group
from .phase import Cyclo, Phase, as_fraction
from .shift import Point

FORMAT_VERSION = 1
WEAK_CONTAINMENT_FLAGS = ("derive", "asserted", "unknown")

__all__ = [
    "FORMAT_VERSION",
    "build_model",
    "model_to_json",
    "arrow_from_json",
    "arrow_to_json",
    "element_from_json",
    "element_to_json",
    "cocycle_from_json",
    "read_json",
    "load_model_file",
    "load_cocycle_file",
    "load_element_file",
    "dumps",
]

_MODEL_FIELDS = {
    "pair": ({"n"}, set()),
    "group": ({"group"}, set()),
    "finite": ({"units", "range", "source", "inverse", "compose"}, set()),
    "group_bundle": ({"units", "groups"}, set()),
    "transformation": ({"points", "group", "action"}, set()),
    "cylinder_shift": ({"alphabet"}, {"forbidden"}),
}


def _check_fields(spec: dict, required: set, optional: set, what: str):
    extra = set(spec) - required - optional
    if extra:
        raise MalformedSpec(f"unknown fields for {what}: {sorted(extra)}", field=sorted(extra)[0])
    missing = required - set(spec)
    if missing:
        raise MalformedSpec(f"missing fields for {what}: {sorted(missing)}", field=sorted(missing)[0])


def _int(v, name: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedSpec(f"{name} must be an integer, got {v!r}", field=name)
    if lo is not None and v < lo:
        raise MalformedSpec(f"{name} must be >= {lo}, got {v}", field=name)
    return v


def _label(v, name: str):
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return v
    raise MalformedSpec(f"{name} labels must be integers or strings, got {v!r}", field=name)


def _version(spec: dict, what: str):
    if not isinstance(spec, dict):
        raise MalformedSpec(f"{what} must be a JSON object")
    v = spec.get("format_version")
    if v != FORMAT_VERSION:
        raise MalformedSpec(f"{what}: format_version must be {FORMAT_VERSION}, got {v!r}", field="format_version")


# --------------------------------------------------------------------------------
# models


def build_model(spec: dict) -> GroupoidModel:
    """Validated model from its description; ``format_version`` is optional here."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MalformedSpec("model spec needs a 'kind'", field="kind")
    kind = spec["kind"]
    if kind not in _MODEL_FIELDS:
        raise MalformedSpec(f"unknown model kind {kind!r}", field="kind")
    required, optional = _MODEL_FIELDS[kind]
    _check_fields(spec, required, optional | {"kind", "format_version", "weak_containment"}, f"{kind} model")
    if "format_version" in spec:
        _version(spec, "model")
    flag = spec.get("weak_containment", "derive")
    if flag not in WEAK_CONTAINMENT_FLAGS:
        raise MalformedSpec(f"weak_containment must be one of {WEAK_CONTAINMENT_FLAGS}", field="weak_containment")

    if kind == "pair":
        model = Pair(_int(spec["n"], "n", 1))
    elif kind == "group":
        model = GroupModel(build_group(spec["group"]))
    elif kind == "finite":
        comp = {}
        for item in spec["compose"]:
            if not isinstance(item, list) or len(item) != 3:
                raise MalformedSpec("compose entries are [a, b, a*b] triples", field="compose")
            a, b, c = (_int(v, "compose") for v in item)
            if (a, b) in comp:
                raise MalformedSpec(f"composition of ({a}, {b}) given twice", field="compose")
            comp[(a, b)] = c
        model = FiniteExplicit(
            [_int(u, "units", 0) for u in spec["units"]],
            [_int(v, "range", 0) for v in spec["range"]],
            [_int(v, "source", 0) for v in spec["source"]],
            [_int(v, "inverse", 0) for v in spec["inverse"]],
            comp,
        )
    elif kind == "group_bundle":
        units = [_label(u, "units") for u in spec["units"]]
        if len(units) != len(spec["groups"]):
            raise MalformedSpec("need one group per unit", field="groups")
        model = GroupBundle(units, [build_group(g) for g in spec["groups"]])
    elif kind == "transformation":
        action = spec["action"]
        if not isinstance(action, dict) or len(action) != 1 or set(action) - {"generators", "table"}:
            raise MalformedSpec("action is {'generators': [...]} or {'table': [...]}", field="action")
        points = [_label(p, "points") for p in spec["points"]]
        model = TransformationFinite(points, build_group(spec["group"]), **action)
    else:
        alphabet = _int(spec["alphabet"], "alphabet", 1)
        forbidden = spec.get("forbidden", [])
        words = []
        for w in forbidden:
            if not isinstance(w, list) or not w:
                raise MalformedSpec("forbidden words are nonempty symbol lists", field="forbidden")
            words.append(tuple(_int(s, "forbidden", 0) for s in w))
            if any(s >= alphabet for s in words[-1]):
                raise MalformedSpec(f"forbidden word {w} uses a symbol outside the alphabet", field="forbidden")
        model = CylinderShift(alphabet, words)
    model.weak_containment = flag
    return model


def model_to_json(model: GroupoidModel) -> dict:
    out = {"format_version": FORMAT_VERSION, **model.describe()}
    if isinstance(model, CylinderShift) and not out.get("forbidden"):
        out.pop("forbidden", None)
    if model.weak_containment != "derive":
        out["weak_containment"] = model.weak_containment
    return out


# --------------------------------------------------------------------------------
# arrows and group elements


def _group_element(G, v):
    if isinstance(G, LamplighterGroup):
        if not isinstance(v, dict) or set(v) != {"lamps", "shift"}:
            raise UnknownArrow(f"lamplighter elements are {{'lamps', 'shift'}}, got {v!r}", arrow=v)
        return (tuple(tuple(p) for p in v["lamps"]), v["shift"])
    if isinstance(G, DirectSumGroup) and isinstance(v, list):
        return tuple(tuple(p) for p in v)
    return v


def _group_element_json(G, g):
    if isinstance(G, LamplighterGroup):
        return {"lamps": [list(p) for p in g[0]], "shift": g[1]}
    if isinstance(G, DirectSumGroup):
        return [list(p) for p in g]
    if isinstance(G, AbelianGroup):
        return g[0] if G.rank == 1 else list(g)
    return g


def _arrow_keys(obj, allowed: set, what: str):
    if not isinstance(obj, dict) or not set(obj) <= allowed or not obj:
        raise UnknownArrow(f"{what} arrows are objects with keys {sorted(allowed)}, got {obj!r}", arrow=obj)


def arrow_from_json(model: GroupoidModel, obj):
    """Resolve an arrow object against ``model``; bundles on cylinder shifts."""
    if isinstance(model, FiniteExplicit):
        _arrow_keys(obj, {"id"}, "finite")
        return model.canon(obj["id"])
    if isinstance(model, GroupModel):
        _arrow_keys(obj, {"g", "n"}, "group")
        if len(obj) != 1:
            raise UnknownArrow("give one of 'g' or 'n'", arrow=obj)
        v = obj.get("g", obj.get("n"))
        return model.canon(_group_element(model.group, v))
    if isinstance(model, Pair):
        _arrow_keys(obj, {"pair"}, "pair")
        p = obj["pair"]
        return model.canon(tuple(p) if isinstance(p, list) else p)
    if isinstance(model, GroupBundle):
        _arrow_keys(obj, {"unit", "g"}, "group bundle")
        u = obj.get("unit")
        G = model.groups.get(u)
        if G is None:
            raise UnknownArrow(f"{u!r} is not a unit", arrow=obj)
        return model.canon((u, _group_element(G, obj.get("g"))))
    if isinstance(model, TransformationFinite):
        _arrow_keys(obj, {"point", "g"}, "transformation")
        return model.canon((obj.get("point"), _group_element(model.group, obj.get("g"))))
    if isinstance(model, CylinderShift):
        _arrow_keys(obj, {"cylinder", "point", "shift"}, "cylinder shift")
        shift = obj.get("shift", 0)
        if isinstance(shift, bool) or not isinstance(shift, int):
            raise UnknownArrow("shift must be an integer", arrow=obj)
        if "point" in obj:
            if "cylinder" in obj:
                raise UnknownArrow("give one of 'cylinder' or 'point'", arrow=obj)
            return model.canon(ShiftArrow(model.canon_unit(obj["point"]), shift))
        cyl = obj.get("cylinder", {})
        if not isinstance(cyl, dict):
            raise UnknownArrow("cylinder is an object position -> symbol", arrow=obj)
        try:
            bundle = ArrowBundle.of({int(p): s for p, s in cyl.items()}, shift)
        except (TypeError, ValueError) as exc:
            raise UnknownArrow(f"bad cylinder {cyl!r}: {exc}", arrow=obj) from None
        if any(not 0 <= s < model.alphabet for _, s in bundle.cylinder.constraint):
            raise UnknownArrow(f"cylinder {cyl!r} uses a symbol outside the alphabet", arrow=obj)
        return bundle
    raise MalformedSpec(f"no arrow format for {type(model).__name__}")


def arrow_to_json(model: GroupoidModel, a) -> dict:
    if isinstance(model, FiniteExplicit):
        return {"id": a}
    if isinstance(model, GroupModel):
        return {"g": _group_element_json(model.group, a)}
    if isinstance(model, Pair):
        return {"pair": list(a)}
    if isinstance(model, GroupBundle):
        return {"unit": a[0], "g": _group_element_json(model.groups[a[0]], a[1])}
    if isinstance(model, TransformationFinite):
        return {"point": a[0], "g": _group_element_json(model.group, a[1])}
    if isinstance(model, CylinderShift):
        if isinstance(a, ShiftArrow):
            return {"point": a.point.describe(), "shift": a.shift}
        return {"cylinder": {str(p): s for p, s in a.cylinder.constraint}, "shift": a.shift}
    raise MalformedSpec(f"no arrow format for {type(model).__name__}")


# --------------------------------------------------------------------------------
# elements


def _scalar(v, name: str):
    """Fraction for exact input ("p/q" strings and integers), float otherwise."""
    if isinstance(v, bool):
        raise MalformedSpec(f"{name} must be a number or a 'p/q' string", field=name)
    if isinstance(v, float):
        return v
    try:
        return as_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise MalformedSpec(f"{name} must be a number or a 'p/q' string, got {v!r}", field=name) from None


def _term_coefficient(term: dict):
    re = _scalar(term.get("re", 0), "re")
    im = _scalar(term.get("im", 0), "im")
    phase = _scalar(term.get("phase", 0), "phase")
    if all(isinstance(v, Fraction) for v in (re, im, phase)):
        c = Cyclo.gaussian(re, im)
        return c.times_root(phase.numerator, phase.denominator) if phase else c
    return complex(float(re), float(im)) * Phase(phase).value()


def element_from_json(model: GroupoidModel, spec: dict) -> Element:
    """Element from ``{"format_version": 1, "terms": [...]}``; duplicate arrows are summed."""
    _version(spec, "element")
    _check_fields(spec, {"terms", "format_version"}, set(), "element")
    if not isinstance(spec["terms"], list):
        raise MalformedSpec("terms must be a list", field="terms")
    items = []
    for i, term in enumerate(spec["terms"]):
        if not isinstance(term, dict):
            raise MalformedSpec(f"term {i} must be an object", field=f"terms[{i}]")
        _check_fields(term, {"arrow"}, {"re", "im", "phase"}, f"term {i}")
        items.append((arrow_from_json(model, term["arrow"]), _term_coefficient(term)))
    return Element.build(model, items)


def _fraction_json(q: Fraction):
    return str(q) if q.denominator != 1 else q.numerator


def _coefficient_terms(c):
    """Term fields reproducing ``c``: one term when Gaussian-rational, else one per root of unity."""
    if isinstance(c, Cyclo):
        parts = c.gaussian_parts()
        if parts is None:
            c = c.minimal_level()
            out = []
            for j, k in enumerate(c.nums):
                if k:
                    out.append({"re": _fraction_json(Fraction(k, c.den)), "phase": _fraction_json(Fraction(j, c.level))})
            return out
        re, im = parts
        t = {}
        if re:
            t["re"] = _fraction_json(re)
        if im:
            t["im"] = _fraction_json(im)
        return [t]
    c = complex(c)
    t = {}
    if c.real:
        t["re"] = c.real
    if c.imag:
        t["im"] = c.imag
    return [t]


def element_to_json(f: Element) -> dict:
    terms = []
    for a, c in f.terms.items():
        if f.is_bundle:
            a = ArrowBundle(a[0], a[1])
        aj = arrow_to_json(f.model, a)
        for t in _coefficient_terms(c):
            terms.append({"arrow": aj, **t})
    terms.sort(key=lambda t: json.dumps(t, sort_keys=True))
    return {"format_version": FORMAT_VERSION, "terms": terms}


# --------------------------------------------------------------------------------
# cocycles


def cocycle_from_json(model: GroupoidModel, spec: dict) -> TwoCocycle:
    _version(spec, "cocycle")
    if isinstance(model, (TransformationFinite, CylinderShift)) and spec.get("kind") not in ("trivial", "pullback"):
        raise MalformedSpec("transformation groupoids take trivial or pullback cocycles", field="kind")
    if spec.get("kind") == "pullback":
        inner = spec.get("group_cocycle")
        if isinstance(inner, dict) and inner.get("kind") == "table":
            G = GroupModel(model.group)
            parse = lambda a: arrow_from_json(G, a)  # noqa: E731
            return build_cocycle(model, spec, parse)
    return build_cocycle(model, spec, lambda a: arrow_from_json(model, a))


# --------------------------------------------------------------------------------
# files


def read_json(path) -> dict:
    """Parse a JSON file; decoding errors carry line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", path=str(path), line=exc.lineno, column=exc.colno) from None


def _with_path(fn, path, *args):
    try:
        return fn(*args)
    except MalformedSpec as exc:
        exc.context.setdefault("path", str(path))
        raise


def load_model_file(path) -> GroupoidModel:
    spec = read_json(path)
    _with_path(_version, path, spec, "model")
    return _with_path(build_model, path, spec)


def load_cocycle_file(path, model: GroupoidModel) -> TwoCocycle:
    return _with_path(cocycle_from_json, path, model, read_json(path))


def load_element_file(path, model: GroupoidModel) -> Element:
    return _with_path(element_from_json, path, model, read_json(path))


def dumps(record) -> str:
    """Deterministic JSON text for reports."""
    return json.dumps(record, sort_keys=True, indent=2, default=str)
