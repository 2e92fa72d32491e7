"""Exact phases and exact cyclotomic coefficients.

A :class:`Phase` is an element of R/Z written additively; its value on the
circle is ``exp(2*pi*i*q)``.  A :class:`Cyclo` is an element of the
cyclotomic field Q(zeta_N), stored in the power basis reduced modulo the
N-th cyclotomic polynomial with integer numerators over one common
denominator.  Every sum of Gaussian rationals times rational phases lives
in some Q(zeta_N), so convolution and involution stay exact.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = ["Phase", "Cyclo", "cyclotomic_poly", "as_fraction", "to_complex", "is_exact"]


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"not an exact rational: {value!r}")


class Phase:
    """Additive phase ``q mod 1``; exact when ``q`` is a Fraction."""

    __slots__ = ("q",)

    def __init__(self, q=0):
        if isinstance(q, Phase):
            q = q.q
        if isinstance(q, float):
            q = q % 1.0
        else:
            q = as_fraction(q) % 1
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("Phase is immutable")

    @property
    def exact(self) -> bool:
        return isinstance(self.q, Fraction)

    @property
    def denominator(self) -> int:
        if not self.exact:
            raise ValueError("float phase has no denominator")
        return self.q.denominator

    def __add__(self, other):
        other = other if isinstance(other, Phase) else Phase(other)
        return Phase(self.q + other.q)

    __radd__ = __add__

    def __neg__(self):
        return Phase(-self.q)

    def __sub__(self, other):
        other = other if isinstance(other, Phase) else Phase(other)
        return Phase(self.q - other.q)

    def __mul__(self, k: int):
        return Phase(self.q * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Phase):
            try:
                other = Phase(other)
            except TypeError:
                return NotImplemented
        if self.exact and other.exact:
            return self.q == other.q
        d = abs(float(self.q) - float(other.q)) % 1.0
        return min(d, 1.0 - d) < 1e-12

    def __hash__(self):
        return hash(self.q) if self.exact else hash(round(float(self.q), 12))

    def __bool__(self):
        return self.q != 0

    def value(self) -> complex:
        return cmath.exp(2j * math.pi * float(self.q))

    def as_cyclo(self) -> "Cyclo":
        if not self.exact:
            raise ValueError("float phase cannot become an exact coefficient")
        return Cyclo.root(self.q.numerator, self.q.denominator)

    def __repr__(self):
        return f"Phase({self.q})"

    def __str__(self):
        return str(self.q)


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    # x^n - 1 divided by every Phi_d, d | n, d < n
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]  # den is monic
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    assert not any(num[: len(den) - 1]), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def _reduce(poly: list[int], n: int) -> list[int]:
    """Reduce an integer polynomial modulo Phi_n in place; returns length phi(n)."""
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    for k in range(len(poly) - 1, d - 1, -1):
        c = poly[k]
        if c:
            base = k - d
            for j in range(d):
                pj = phi[j]
                if pj:
                    poly[base + j] -= c * pj
            poly[k] = 0
    if len(poly) < d:
        poly.extend([0] * (d - len(poly)))
    return poly[:d]


class Cyclo:
    """Exact element of Q(zeta_level)."""

    __slots__ = ("level", "nums", "den")

    def __init__(self, level: int, nums, den: int = 1, *, _normal=False):
        self.level = level
        if _normal:
            self.nums = tuple(nums)
            self.den = den
            return
        nums = list(nums)
        d = _phi(level)
        if len(nums) != d:
            nums = _reduce(nums + [0] * max(0, d - len(nums)), level)
        if den < 0:
            den, nums = -den, [-a for a in nums]
        g = den
        for a in nums:
            if a:
                g = math.gcd(g, a)
                if g == 1:
                    break
        if not any(nums):
            den = 1
        elif g > 1:
            nums = [a // g for a in nums]
            den //= g
        self.nums = tuple(nums)
        self.den = den

    # construction -------------------------------------------------------

    @classmethod
    def from_rational(cls, q) -> "Cyclo":
        q = as_fraction(q)
        return cls(1, (q.numerator,), q.denominator)

    @classmethod
    def gaussian(cls, re=0, im=0) -> "Cyclo":
        re, im = as_fraction(re), as_fraction(im)
        den = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        return cls(4, (re.numerator * (den // re.denominator), im.numerator * (den // im.denominator)), den)

    @classmethod
    def root(cls, k: int, m: int) -> "Cyclo":
        """zeta_m ** k, stored at the smallest level that contains it."""
        k %= m
        g = math.gcd(k, m)
        k, m = k // g, m // g
        poly = [0] * (k + 1)
        poly[k] = 1
        return cls(m, poly)

    @classmethod
    def zero(cls) -> "Cyclo":
        return cls(1, (0,), 1, _normal=True)

    @classmethod
    def one(cls) -> "Cyclo":
        return cls(1, (1,), 1, _normal=True)

    @classmethod
    def coerce(cls, value) -> "Cyclo":
        if isinstance(value, Cyclo):
            return value
        if isinstance(value, Phase):
            return value.as_cyclo()
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact")
        return cls.from_rational(value)

    # field structure ------------------------------------------------------

    def lift(self, level: int) -> "Cyclo":
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError(f"Q(zeta_{self.level}) is not inside Q(zeta_{level})")
        step = level // self.level
        poly = [0] * (step * (len(self.nums) - 1) + 1)
        for k, a in enumerate(self.nums):
            poly[k * step] = a
        return Cyclo(level, _reduce(poly, level), self.den, _normal=True)

    def _common(self, other):
        other = Cyclo.coerce(other)
        if other.level == self.level:
            return self, other
        lvl = self.level * other.level // math.gcd(self.level, other.level)
        return self.lift(lvl), other.lift(lvl)

    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclo(a.level, [x * fa + y * fb for x, y in zip(a.nums, b.nums)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.level, tuple(-a for a in self.nums), self.den, _normal=True)

    def __sub__(self, other):
        try:
            return self + (-Cyclo.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        if a.level == 1:
            return Cyclo(1, (a.nums[0] * b.nums[0],), a.den * b.den)
        an, bn = a.nums, b.nums
        poly = [0] * (len(an) + len(bn) - 1)
        for i, x in enumerate(an):
            if x:
                for j, y in enumerate(bn):
                    if y:
                        poly[i + j] += x * y
        return Cyclo(a.level, _reduce(poly, a.level), a.den * b.den)

    __rmul__ = __mul__

    def times_root(self, k: int, m: int) -> "Cyclo":
        """Multiply by zeta_m ** k (cheaper than a general product)."""
        k %= m
        if k == 0:
            return self
        g = math.gcd(k, m)
        k, m = k // g, m // g
        lvl = self.level * m // math.gcd(self.level, m)
        a = self.lift(lvl)
        shift = k * (lvl // m)
        poly = [0] * (len(a.nums) + shift)
        for i, x in enumerate(a.nums):
            poly[i + shift] = x
        return Cyclo(lvl, _reduce(poly, lvl), a.den, _normal=True)

    def conjugate(self) -> "Cyclo":
        n = self.level
        if n <= 2:
            return self
        poly = [0] * n
        for k, a in enumerate(self.nums):
            poly[(-k) % n] += a
        return Cyclo(n, _reduce(poly, n), self.den, _normal=True)

    def galois(self, a: int) -> "Cyclo":
        """Apply the automorphism zeta -> zeta**a (a coprime to the level)."""
        n = self.level
        poly = [0] * n
        for k, c in enumerate(self.nums):
            poly[(k * a) % n] += c
        return Cyclo(n, _reduce(poly, n), self.den, _normal=True)

    def abs2(self) -> "Cyclo":
        return self * self.conjugate()

    def __truediv__(self, q):
        q = as_fraction(q)
        return Cyclo(self.level, [a * q.denominator for a in self.nums], self.den * q.numerator)

    # comparisons ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.nums)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return a.den == b.den and a.nums == b.nums

    __hash__ = None

    def minimal_level(self) -> "Cyclo":
        """The same number expressed at the smallest level containing it."""
        n = self.level
        if n <= 2:
            return Cyclo(1, self.nums, self.den) if n == 2 else self
        units = [a for a in range(1, n) if math.gcd(a, n) == 1]
        for d in sorted(k for k in range(1, n + 1) if n % k == 0):
            if d == n:
                return self
            if all(self.galois(a) == self for a in units if a % d == 1 % d):
                return _descend(self, d)
        return self

    # numerics ---------------------------------------------------------------

    def __complex__(self):
        n = self.level
        w = cmath.exp(2j * math.pi / n)
        acc = 0j
        p = 1 + 0j
        for a in self.nums:
            if a:
                acc += a * p
            p *= w
        return acc / self.den

    def __abs__(self):
        return abs(complex(self))

    def real_fraction(self) -> Fraction:
        """Exact value when the number is rational; ValueError otherwise."""
        m = self.minimal_level()
        if m.level != 1:
            raise ValueError(f"{self!r} is not rational")
        return Fraction(m.nums[0], m.den)

    def gaussian_parts(self):
        """(re, im) Fractions when the number lies in Q(i), else None."""
        m = self.minimal_level()
        if m.level == 1:
            return Fraction(m.nums[0], m.den), Fraction(0)
        if m.level == 4:
            return Fraction(m.nums[0], m.den), Fraction(m.nums[1], m.den)
        return None

    def __repr__(self):
        return f"Cyclo({self.level}, {list(self.nums)}, {self.den})"

    def __str__(self):
        parts = self.gaussian_parts()
        if parts is not None:
            re, im = parts
            if not im:
                return str(re)
            return f"{re}{'+' if im >= 0 else '-'}{abs(im)}i"
        return f"{complex(self):.6g}"


def _descend(x: Cyclo, d: int) -> Cyclo:
    """Rewrite x (known to lie in Q(zeta_d)) at level d by solving in the power basis."""
    n = x.level
    dd = _phi(d)
    step = n // d
    # images of zeta_d^k for k < phi(d) inside Q(zeta_n), as integer columns
    cols = []
    for k in range(dd):
        poly = [0] * (k * step + 1)
        poly[k * step] = 1
        cols.append(_reduce(poly, n))
    # solve cols * y = x.nums exactly; the columns are distinct power-basis
    # monomials or reductions thereof, so Fraction Gaussian elimination suffices
    rows = len(x.nums)
    mat = [[Fraction(cols[j][i]) for j in range(dd)] + [Fraction(x.nums[i])] for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(dd):
        p = next((i for i in range(r, rows) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    y = [Fraction(0)] * dd
    for i, c in enumerate(piv_cols):
        y[c] = mat[i][dd]
    den = 1
    for v in y:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Cyclo(d, [int(v * den) for v in y], den * x.den)


def is_exact(value) -> bool:
    return isinstance(value, (Cyclo, int, Fraction))


def to_complex(value) -> complex:
    return complex(value)
