"""The twisted convolution algebra C_c(G, sigma).

Elements are finitely supported.  On discrete models a term is an arrow
with a coefficient; on cylinder shifts a term is a compact open bisection
``(C, n)`` (all arrows ``(x, n)`` with ``x`` in the cylinder ``C``) with a
coefficient, so elements there are locally constant functions.

Coefficients are exact :class:`~twistgpd.phase.Cyclo` numbers by default,
or Python complex numbers once any float enters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from .cocycle import Bicharacter, PullbackFromGroup, Trivial, TwoCocycle
from .errors import BundleIncompatible, MalformedSpec, ModelMismatch, NotInterior, UnsupportedModel
from .groupoid import ArrowBundle, CylinderShift, GroupoidModel, ShiftArrow, Tri
from .phase import Cyclo, Phase, is_exact
from .shift import Cylinder, Point

__all__ = [
    "Element",
    "FiberVector",
    "convolve",
    "involve",
    "i_norm",
    "i_norm_hp",
    "fiber_sum_function",
    "fiber_profile",
    "same_moduli",
    "unit_function",
    "c0_multiply",
    "iota_embed",
    "iso_i_norm",
    "psi_restrict",
    "quotient_i_norm",
    "coefficient",
]

HP_DIGITS = 50


def coefficient(value, exact: bool | None = None):
    """Normalise a scalar; exact unless a float is involved or ``exact`` is False."""
    if isinstance(value, Cyclo):
        return value if exact is not False else complex(value)
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool) and exact is not False:
        return Cyclo.from_rational(value)
    if isinstance(value, Phase):
        return value.as_cyclo() if value.exact and exact is not False else value.value()
    return complex(value)


def _times_phase(c, p: Phase):
    if not p:
        return c
    if isinstance(c, Cyclo):
        q = p.q
        return c.times_root(q.numerator, q.denominator)
    return c * p.value()


def _conj(c):
    return c.conjugate()


def _is_zero(c) -> bool:
    return c.is_zero() if isinstance(c, Cyclo) else c == 0


def _abs2(c):
    """|c|^2, exact as a Fraction when c is Gaussian-rational."""
    if isinstance(c, Cyclo):
        a = c.abs2()
        try:
            return a.real_fraction()
        except ValueError:
            return a
    return abs(c) ** 2


def _cyclo_mp(c: Cyclo):
    """Value of a cyclotomic number at the working mpmath precision."""
    n = c.level
    total = mpmath.fsum(k * mpmath.expjpi(mpmath.mpf(2 * j) / n) for j, k in enumerate(c.nums) if k)
    return total / c.den


def _abs_hp(c):
    if isinstance(c, Cyclo):
        a = c.abs2()
        try:
            q = a.real_fraction()
        except ValueError:
            return abs(_cyclo_mp(c))
        return mpmath.sqrt(mpmath.mpf(q.numerator) / q.denominator)
    return mpmath.mpf(abs(c))


class Element:
    """Finitely supported function on a groupoid model.

    ``terms`` maps an arrow (discrete models) or a ``(Cylinder, shift)``
    pair (cylinder shifts) to a nonzero coefficient.
    """

    __slots__ = ("model", "terms", "exact")

    def __init__(self, model: GroupoidModel, terms: dict, exact: bool):
        self.model = model
        self.terms = terms
        self.exact = exact

    # -- construction -------------------------------------------------------------

    @classmethod
    def build(cls, model: GroupoidModel, items: Iterable, *, exact: bool | None = None) -> "Element":
        """Sum duplicate supports, canonicalise arrows, prune zero coefficients."""
        items = list(items)
        if exact is None:
            exact = all(
                isinstance(c, (Cyclo, int, Fraction)) or (isinstance(c, Phase) and c.exact) for _, c in items
            )
        terms: dict = {}
        for key, c in items:
            key = _canon_key(model, key)
            if key is None:
                continue
            c = coefficient(c, exact)
            terms[key] = terms[key] + c if key in terms else c
        terms = {k: v for k, v in terms.items() if not _is_zero(v)}
        return cls(model, terms, exact)

    @classmethod
    def zero(cls, model) -> "Element":
        return cls(model, {}, True)

    @classmethod
    def delta(cls, model, arrow, coeff=1) -> "Element":
        return cls.build(model, [(arrow, coeff)])

    @classmethod
    def bundle(cls, model, constraint, shift: int, coeff=1) -> "Element":
        return cls.build(model, [(ArrowBundle.of(constraint, shift), coeff)])

    @classmethod
    def identity(cls, model) -> "Element":
        """Sum of unit deltas (finite unit space) or the constant bundle (cylinder shifts)."""
        if isinstance(model, CylinderShift):
            return cls.bundle(model, {}, 0)
        return cls.build(model, [(model.unit_arrow(u), 1) for u in model.units()])

    # -- basic structure ----------------------------------------------------------------

    @property
    def is_bundle(self) -> bool:
        return isinstance(self.model, CylinderShift)

    def to_float(self) -> "Element":
        if not self.exact:
            return self
        return Element(self.model, {k: complex(v) for k, v in self.terms.items()}, False)

    def support(self) -> list:
        return list(self.terms)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __call__(self, arrow):
        """Value at one arrow; sums the bundles containing it on cylinder shifts."""
        if self.is_bundle:
            arrow = self.model.canon(arrow)
            total = None
            for (cyl, n), c in self.terms.items():
                if n == arrow.shift and cyl.matches(arrow.point):
                    total = c if total is None else total + c
            return total if total is not None else _zero_like(self.exact)
        arrow = self.model.canon(arrow)
        return self.terms.get(arrow, _zero_like(self.exact))

    def _check(self, other: "Element"):
        if other.model is not self.model and other.model.describe() != self.model.describe():
            raise ModelMismatch("elements live on different models")

    def _lin(self, other: "Element", sign: int) -> "Element":
        self._check(other)
        exact = self.exact and other.exact
        a = self if exact else self.to_float()
        b = other if exact else other.to_float()
        terms = dict(a.terms)
        for k, v in b.terms.items():
            v = v if sign > 0 else -v
            terms[k] = terms[k] + v if k in terms else v
        return Element(self.model, {k: v for k, v in terms.items() if not _is_zero(v)}, exact)

    def __add__(self, other):
        return self._lin(other, 1)

    def __sub__(self, other):
        return self._lin(other, -1)

    def __neg__(self):
        return Element(self.model, {k: -v for k, v in self.terms.items()}, self.exact)

    def scale(self, c) -> "Element":
        exact = self.exact and is_exact(c)
        c = coefficient(c, exact)
        base = self if exact else self.to_float()
        return Element.build(self.model, [(k, v * c) for k, v in base.terms.items()], exact=exact)

    __rmul__ = scale

    # -- comparison -------------------------------------------------------------------------

    def canonical(self) -> dict:
        """Terms keyed so that equal functions compare equal.

        On cylinder shifts every bundle is refined to admissible words on one
        common window, so overlapping descriptions of the same function agree.
        """
        if not self.is_bundle:
            return self.terms
        window = _window(self.terms)
        if window is None:
            return {}
        lo, hi = window
        lang = self.model.language
        out: dict = {}
        for (cyl, n), c in self.terms.items():
            for w in lang.words(lo, hi, cyl):
                key = (w, n)
                out[key] = out[key] + c if key in out else c
        return {k: v for k, v in out.items() if not _is_zero(v)}

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        if self.is_bundle:
            a, b = _common_canonical(self, other)
        else:
            a, b = self.terms, other.terms
        return a.keys() == b.keys() and all(a[k] == b[k] for k in a)

    __hash__ = None

    def allclose(self, other: "Element", tol: float = 1e-9) -> bool:
        self._check(other)
        if self.is_bundle:
            a, b = _common_canonical(self, other)
        else:
            a, b = self.terms, other.terms
        zero = 0j
        return all(abs(complex(a.get(k, zero)) - complex(b.get(k, zero))) <= tol for k in set(a) | set(b))

    def __repr__(self):
        if not self.terms:
            return "Element(0)"
        parts = []
        for k, v in list(self.terms.items())[:6]:
            key = f"[{k[0].as_dict()}, {k[1]}]" if self.is_bundle else repr(k)
            parts.append(f"{v}*d{key}")
        more = "" if len(self.terms) <= 6 else f" + ... ({len(self.terms)} terms)"
        return "Element(" + " + ".join(parts) + more + ")"


def _zero_like(exact):
    return Cyclo.zero() if exact else 0j


def _canon_key(model, key):
    if isinstance(model, CylinderShift):
        if isinstance(key, ArrowBundle):
            cyl, n = key.cylinder, key.shift
        elif isinstance(key, tuple) and len(key) == 2 and isinstance(key[0], (Cylinder, dict)):
            cyl, n = Cylinder.of(key[0]), key[1]
        else:
            raise MalformedSpec("cylinder-shift elements are built from bundles (constraint, shift)")
        if isinstance(n, bool) or not isinstance(n, int):
            raise MalformedSpec(f"bundle shift must be an integer, got {n!r}")
        lo_hi = cyl.bounds()
        if lo_hi and next(model.language.words(lo_hi[0], lo_hi[1], cyl), None) is None:
            return None  # empty bundle: the zero function
        return (cyl, int(n))
    if isinstance(key, ArrowBundle):
        key = key.arrow
    return model.canon(key)


def _window(terms) -> tuple[int, int] | None:
    bounds = [cyl.bounds() for cyl, _ in terms if cyl.bounds()]
    if not terms:
        return None
    if not bounds:
        return (0, 0)
    return min(b[0] for b in bounds), max(b[1] for b in bounds)


def _common_canonical(f: Element, g: Element):
    win = [w for w in (_window(f.terms), _window(g.terms)) if w]
    if not win:
        return {}, {}
    lo, hi = min(w[0] for w in win), max(w[1] for w in win)
    out = []
    for e in (f, g):
        lang = e.model.language
        acc: dict = {}
        for (cyl, n), c in e.terms.items():
            for w in lang.words(lo, hi, cyl):
                key = (w, n)
                acc[key] = acc[key] + c if key in acc else c
        out.append({k: v for k, v in acc.items() if not _is_zero(v)})
    return out[0], out[1]


# --------------------------------------------------------------------------------
# products


def _check_sigma(sigma: TwoCocycle, f: Element):
    if sigma.model is not f.model and sigma.model.describe() != f.model.describe():
        raise ModelMismatch("cocycle and element live on different models")


def _bundle_phase(sigma: TwoCocycle, n1: int, n2: int) -> Phase:
    if isinstance(sigma, Trivial) or sigma.is_trivial:
        return Phase(0)
    if isinstance(sigma, PullbackFromGroup):
        return sigma.inner.phase((n1,), (n2,))
    raise BundleIncompatible("only cocycles pulled back from Z are constant on bundles", variant=sigma.variant)


def convolve(sigma: TwoCocycle, f: Element, g: Element) -> Element:
    """Twisted convolution: (f*g)(gamma) = sum over ab = gamma of f(a) g(b) sigma(a, b)."""
    f._check(g)
    _check_sigma(sigma, f)
    exact = f.exact and g.exact and sigma.exact
    if not exact:
        f, g = f.to_float(), g.to_float()
    model = f.model
    out: dict = {}
    if f.is_bundle:
        lang = model.language
        for (c1, n1), a in f.terms.items():
            for (c2, n2), b in g.terms.items():
                cyl = c1.intersect(c2.translate(n1))
                if cyl is None:
                    continue
                lo_hi = cyl.bounds()
                if lo_hi and next(lang.words(lo_hi[0], lo_hi[1], cyl), None) is None:
                    continue
                key = (cyl, n1 + n2)
                v = _times_phase(a * b, _bundle_phase(sigma, n1, n2))
                out[key] = out[key] + v if key in out else v
    else:
        by_range: dict = {}
        for beta, b in g.terms.items():
            by_range.setdefault(model.range(beta), []).append((beta, b))
        mul, src = model._mul, model.source
        for alpha, a in f.terms.items():
            for beta, b in by_range.get(src(alpha), ()):
                key = mul(alpha, beta)
                v = _times_phase(a * b, sigma.phase(alpha, beta))
                out[key] = out[key] + v if key in out else v
    return Element(model, {k: v for k, v in out.items() if not _is_zero(v)}, exact)


def involve(sigma: TwoCocycle, f: Element) -> Element:
    """Twisted involution: f*(gamma) = conj(sigma(gamma^-1, gamma)) conj(f(gamma^-1))."""
    _check_sigma(sigma, f)
    exact = f.exact and sigma.exact
    if not exact:
        f = f.to_float()
    model = f.model
    out = {}
    if f.is_bundle:
        for (cyl, n), c in f.terms.items():
            key = (cyl.translate(-n), -n)
            v = _times_phase(_conj(c), -_bundle_phase(sigma, n, -n))
            out[key] = out[key] + v if key in out else v
    else:
        for alpha, c in f.terms.items():
            out[model.invert(alpha)] = _times_phase(_conj(c), -sigma.phase(alpha, model.invert(alpha)))
    return Element(model, {k: v for k, v in out.items() if not _is_zero(v)}, exact)


# --------------------------------------------------------------------------------
# norms


def _bundle_fiber_coeffs(f: Element, w, lo: int, direction: str) -> dict:
    """Coefficient of each shift in the fiber at points carrying word ``w`` on [lo, ...]."""
    out: dict = {}
    for (cyl, n), c in f.terms.items():
        test = cyl if direction == "range" else cyl.translate(-n)
        if all(w[p - lo] == s for p, s in test.constraint):
            out[n] = out[n] + c if n in out else c
    return out


def _bundle_window(f: Element):
    lo, hi = 0, 0
    for cyl, n in f.terms:
        for c in (cyl, cyl.translate(-n)):
            b = c.bounds()
            if b:
                lo, hi = min(lo, b[0]), max(hi, b[1])
    return lo, hi


def _fiber_coefficients(f: Element):
    """Yield (unit label, direction, list of coefficients) over every nonzero fiber."""
    model = f.model
    if f.is_bundle:
        lo, hi = _bundle_window(f)
        for w in model.language.words(lo, hi):
            for direction in ("source", "range"):
                coeffs = [c for c in _bundle_fiber_coeffs(f, w, lo, direction).values() if not _is_zero(c)]
                yield (w, lo), direction, coeffs
        return
    src: dict = {}
    rng: dict = {}
    for a, c in f.terms.items():
        src.setdefault(model.source(a), []).append(c)
        rng.setdefault(model.range(a), []).append(c)
    for u, cs in src.items():
        yield u, "source", cs
    for u, cs in rng.items():
        yield u, "range", cs


def i_norm_hp(f: Element, dps: int = HP_DIGITS):
    """I-norm as an mpmath number computed with ``dps`` significant digits."""
    with mpmath.workdps(dps):
        best = mpmath.mpf(0)
        for _u, _d, cs in _fiber_coefficients(f):
            s = mpmath.fsum(_abs_hp(c) for c in cs)
            if s > best:
                best = s
        return +best


def i_norm(f: Element) -> float:
    """sup over units of max(source-fiber and range-fiber absolute sums)."""
    return float(i_norm_hp(f))


def fiber_profile(f: Element) -> dict:
    """(unit, direction) -> list of exact |c|^2 over the fiber, in a canonical order."""
    out = {}
    for u, d, cs in _fiber_coefficients(f):
        mods = [_abs2(c) for c in cs]
        out[(u, d)] = sorted(mods, key=lambda v: float(complex(v).real) if isinstance(v, Cyclo) else float(v))
    return out


def same_moduli(a: list, b: list) -> bool:
    """Exact multiset equality of two modulus lists."""
    if len(a) != len(b):
        return False
    rest = list(b)
    for v in a:
        for i, w in enumerate(rest):
            if (v == w) if not isinstance(v, float) else abs(v - w) <= 1e-12 * max(1.0, abs(v)):
                del rest[i]
                break
        else:
            return False
    return True


def fiber_sum_function(f: Element, x) -> float:
    """max of the absolute sums over G_x and G^x."""
    model = f.model
    x = model.canon_unit(x)
    with mpmath.workdps(HP_DIGITS):
        if f.is_bundle:
            lo, hi = _bundle_window(f)
            w = x.window(lo, hi)
            sums = [
                mpmath.fsum(_abs_hp(c) for c in _bundle_fiber_coeffs(f, w, lo, d).values())
                for d in ("source", "range")
            ]
        else:
            sums = [
                mpmath.fsum(_abs_hp(c) for a, c in f.terms.items() if model.source(a) == x),
                mpmath.fsum(_abs_hp(c) for a, c in f.terms.items() if model.range(a) == x),
            ]
        return float(max(sums))


# --------------------------------------------------------------------------------
# unit-space functions


def unit_function(model: GroupoidModel, g) -> Element:
    """Embed a function on the unit space as an element supported on units.

    ``g`` maps units to coefficients (discrete models) or cylinders to
    coefficients (cylinder shifts, giving a locally constant function).
    """
    items = g.items() if isinstance(g, dict) else g
    if isinstance(model, CylinderShift):
        return Element.build(model, [(ArrowBundle.of(c, 0), v) for c, v in items])
    return Element.build(model, [(model.unit_arrow(model.canon_unit(u)), v) for u, v in items])


def c0_multiply(g, f: Element, side: str = "left") -> Element:
    """(g f)(gamma) = g(r(gamma)) f(gamma), or g(s(gamma)) f(gamma) on the right."""
    model = f.model
    if isinstance(g, Element):
        if g.model is not model and g.model.describe() != model.describe():
            raise ModelMismatch("unit function lives on another model")
        on_units = all(n == 0 for _, n in g.terms) if g.is_bundle else all(model.is_unit(a) for a in g.terms)
        if not on_units:
            raise ModelMismatch("g must be supported on the unit space")
        gel = g
    else:
        gel = unit_function(model, g)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    sigma = Trivial(model)  # sigma is 1 whenever one argument is a unit
    return convolve(sigma, gel, f) if side == "left" else convolve(sigma, f, gel)


# --------------------------------------------------------------------------------
# isotropy fibers


@dataclass
class FiberVector:
    """Element of l^1 of the interior isotropy group at ``unit``, keyed by arrows."""

    unit: object
    terms: dict
    exact: bool = True

    def l1_hp(self, dps: int = HP_DIGITS):
        with mpmath.workdps(dps):
            return +mpmath.fsum(_abs_hp(c) for c in self.terms.values())

    def l1(self) -> float:
        return float(self.l1_hp())

    def moduli(self) -> list:
        return [_abs2(c) for c in self.terms.values()]

    def __eq__(self, other):
        if not isinstance(other, FiberVector):
            return NotImplemented
        return (
            self.unit == other.unit
            and self.terms.keys() == other.terms.keys()
            and all(self.terms[k] == other.terms[k] for k in self.terms)
        )

    def convolve(self, sigma: TwoCocycle, other: "FiberVector") -> "FiberVector":
        """Product in l^1(Iso_x, sigma_x): the same twisted formula inside the fiber group."""
        model = sigma.model
        out: dict = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                key = _fiber_mul(model, a, b)
                v = _times_phase(c * d, _fiber_phase(sigma, a, b))
                out[key] = out[key] + v if key in out else v
        return FiberVector(self.unit, {k: v for k, v in out.items() if not _is_zero(v)}, self.exact and other.exact)

    def __repr__(self):
        return f"FiberVector(at {self.unit!r}, {len(self.terms)} terms)"


def _fiber_mul(model, a, b):
    if isinstance(model, CylinderShift):
        return a + b  # shifts in the isotropy group of a fixed point
    return model._mul(a, b)


def _fiber_phase(sigma, a, b):
    if isinstance(sigma.model, CylinderShift):
        return _bundle_phase(sigma, a, b)
    return sigma.phase(a, b)


def _certify_interior(model: GroupoidModel, keys, depth: int):
    for key in keys:
        if isinstance(model, CylinderShift):
            cyl, n = key
            d = model.interior_isotropy_test(ArrowBundle(cyl, n), depth)
        else:
            d = model.interior_isotropy_test(key, depth)
        if d.outcome is not Tri.YES:
            raise NotInterior(
                f"support term {key!r} is not certified inside the interior isotropy ({d.outcome.value})",
                outcome=d.outcome.value,
                depth=depth,
            )


def iota_embed(model: GroupoidModel, f, *, depth: int = 3) -> Element:
    """Extension by zero from the interior isotropy subgroupoid to G.

    ``f`` is an Element whose support must be certified inside Iso°, or an
    iterable of FiberVectors (discrete models).
    """
    if isinstance(f, Element):
        _certify_interior(model, f.terms, depth)
        return Element(model, dict(f.terms), f.exact)
    items = []
    exact = True
    for fv in f:
        exact = exact and fv.exact
        for a, c in fv.terms.items():
            if isinstance(model, CylinderShift):
                raise UnsupportedModel("fiber vectors on cylinder shifts are not open functions; embed bundles")
            if model.range(a) != fv.unit or model.source(a) != fv.unit:
                raise NotInterior(f"{a!r} is not in the isotropy at {fv.unit!r}")
            items.append((a, c))
    el = Element.build(model, items, exact=exact)
    _certify_interior(model, el.terms, depth)
    return el


def iso_i_norm(fibers: Iterable[FiberVector]) -> float:
    """I-norm computed inside the isotropy bundle: the largest fiber l^1 norm."""
    with mpmath.workdps(HP_DIGITS):
        return float(max((fv.l1_hp() for fv in fibers), default=mpmath.mpf(0)))


def psi_restrict(f: Element, x, *, depth: int = 3) -> FiberVector:
    """Restriction of an Iso°-supported element to the fiber group at x."""
    model = f.model
    x = model.canon_unit(x)
    _certify_interior(model, f.terms, depth)
    out: dict = {}
    if f.is_bundle:
        for (cyl, n), c in f.terms.items():
            if cyl.matches(x):
                out[n] = out[n] + c if n in out else c
    else:
        for a, c in f.terms.items():
            if model.range(a) == x:
                out[a] = c
    return FiberVector(x, {k: v for k, v in out.items() if not _is_zero(v)}, f.exact)


def quotient_i_norm(f: Element, x, *, depth: int = 3) -> float:
    """inf over h in I_x of ||f + h||_I on a finite model.

    Every h in I_x vanishes on the fiber at x, so the infimum is at least
    the l^1 norm there; h = -f off that fiber attains it.
    """
    model = f.model
    if not model.is_finite:
        raise UnsupportedModel("the quotient norm is computed on finite models")
    x = model.canon_unit(x)
    _certify_interior(model, f.terms, depth)
    h = Element(model, {a: -c for a, c in f.terms.items() if model.range(a) != x}, f.exact)
    return i_norm(f + h)


def optimal_ideal_element(f: Element, x) -> Element:
    """The minimiser h = -f off the fiber at x, as an element of I_x."""
    model = f.model
    return Element(model, {a: -c for a, c in f.terms.items() if model.range(a) != x}, f.exact)
