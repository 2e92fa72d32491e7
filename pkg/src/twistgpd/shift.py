"""Eventually periodic points of {0..k-1}^Z and subshift-of-finite-type languages.

A point is stored canonically: either purely periodic (a primitive word
anchored at position 0) or as a left periodic tail, a finite middle and a
right periodic tail, with the tail boundaries pushed as far inward as the
sequence allows.  Equal sequences therefore have equal descriptors.

The shift acts on the right: ``(x . n)(k) = x(k + n)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import MalformedSpec, UnsupportedModel

MAX_BLOCKS = 1 << 16


def primitive_root(word: tuple) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


class Point:
    """Canonical eventually periodic bi-infinite sequence."""

    __slots__ = ("key", "_hash")

    def __init__(self, key):
        self.key = key
        self._hash = hash(key)

    # constructors -----------------------------------------------------------

    @classmethod
    def periodic(cls, word, phase: int = 0) -> "Point":
        """x(n) = word[(n + phase) mod len(word)]."""
        word = tuple(int(c) for c in word)
        if not word:
            raise MalformedSpec("periodic word must be nonempty")
        p = primitive_root(word)
        shifted = tuple(p[(i + phase) % len(p)] for i in range(len(p)))
        return cls(("p", shifted))

    @classmethod
    def constant(cls, symbol: int) -> "Point":
        return cls.periodic((symbol,))

    @classmethod
    def from_parts(cls, left, middle, right, origin: int = 0) -> "Point":
        """...left left | middle | right right..., middle starting at ``origin``."""
        left = tuple(int(c) for c in left)
        middle = tuple(int(c) for c in middle)
        right = tuple(int(c) for c in right)
        if not left or not right:
            raise MalformedSpec("tail words must be nonempty")
        end = origin + len(middle)

        def raw(n):
            if n >= end:
                return right[(n - end) % len(right)]
            if n < origin:
                return left[(n - origin) % len(left)]
            return middle[n - origin]

        pr = len(primitive_root(right))
        b = end
        floor = origin - (len(left) + pr) * 2 - 2
        while raw(b - 1) == raw(b - 1 + pr):
            b -= 1
            if b < floor:
                return cls(("p", tuple(raw(i) for i in range(pr))))
        pl = len(primitive_root(left))
        a = origin
        ceil = end + (len(right) + pl) * 2 + 2
        while raw(a) == raw(a - pl):
            a += 1
            if a > ceil:  # pragma: no cover - would make the sequence periodic
                return cls(("p", tuple(raw(i) for i in range(pl))))
        lw = tuple(raw(a - pl + i) for i in range(pl))
        rw = tuple(raw(b + i) for i in range(pr))
        mid = tuple(raw(n) for n in range(a, b)) if a < b else ()
        return cls(("e", lw, a, mid, b, rw))

    # access -------------------------------------------------------------------

    @property
    def is_periodic(self) -> bool:
        return self.key[0] == "p"

    @property
    def period(self) -> int | None:
        return len(self.key[1]) if self.is_periodic else None

    def at(self, n: int) -> int:
        if self.key[0] == "p":
            w = self.key[1]
            return w[n % len(w)]
        _, lw, a, mid, b, rw = self.key
        if n >= b:
            return rw[(n - b) % len(rw)]
        if n < a:
            return lw[(n - a) % len(lw)]
        return mid[n - a]

    def window(self, lo: int, hi: int) -> tuple:
        """Symbols at positions lo..hi inclusive."""
        return tuple(self.at(n) for n in range(lo, hi + 1))

    def span(self) -> tuple[int, int]:
        """A window outside of which the point is just its periodic tails."""
        if self.key[0] == "p":
            return 0, len(self.key[1]) - 1
        _, lw, a, _, b, rw = self.key
        return min(a, b) - len(lw), max(a, b) + len(rw)

    def shift(self, n: int) -> "Point":
        if self.key[0] == "p":
            w = self.key[1]
            return Point(("p", tuple(w[(i + n) % len(w)] for i in range(len(w)))))
        _, lw, a, mid, b, rw = self.key
        return Point(("e", lw, a - n, mid, b - n, rw))

    def symbols(self) -> set:
        if self.key[0] == "p":
            return set(self.key[1])
        _, lw, _, mid, _, rw = self.key
        return set(lw) | set(mid) | set(rw)

    # protocol -----------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Point) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return repr(self.key) < repr(other.key)

    def describe(self) -> dict:
        if self.key[0] == "p":
            return {"periodic": list(self.key[1])}
        _, lw, a, mid, b, rw = self.key
        if a <= b:
            return {"left": list(lw), "middle": list(mid), "right": list(rw), "origin": a}
        # overlapping tails: re-express with an empty middle at b
        return {"left": [self.at(b - len(lw) + i) for i in range(len(lw))], "middle": [], "right": list(rw), "origin": b}

    @classmethod
    def from_description(cls, d: dict) -> "Point":
        if not isinstance(d, dict):
            raise MalformedSpec("point must be an object")
        if set(d) == {"periodic"}:
            return cls.periodic(d["periodic"])
        if set(d) <= {"left", "middle", "right", "origin"} and {"left", "right"} <= set(d):
            return cls.from_parts(d["left"], d.get("middle", ()), d["right"], int(d.get("origin", 0)))
        raise MalformedSpec(f"unrecognised point description {sorted(d)}")

    def __repr__(self):
        if self.key[0] == "p":
            return f"Point(({''.join(map(str, self.key[1]))})^Z)"
        _, lw, a, mid, b, rw = self.key
        s = lambda w: "".join(map(str, w))
        return f"Point(({s(lw)})^-|{a}:{s(mid)}:{b}|({s(rw)})^+)"


@dataclass(frozen=True)
class Cylinder:
    """Finite partial word: ``constraint`` is a sorted tuple of (position, symbol)."""

    constraint: tuple = ()

    @classmethod
    def of(cls, mapping) -> "Cylinder":
        if isinstance(mapping, Cylinder):
            return mapping
        items = mapping.items() if isinstance(mapping, dict) else mapping
        out = {}
        for p, s in items:
            p, s = int(p), int(s)
            if out.get(p, s) != s:
                raise MalformedSpec(f"contradictory constraint at position {p}")
            out[p] = s
        return cls(tuple(sorted(out.items())))

    @classmethod
    def word(cls, word, start: int) -> "Cylinder":
        return cls(tuple((start + i, int(c)) for i, c in enumerate(word)))

    def as_dict(self) -> dict:
        return dict(self.constraint)

    def matches(self, x: Point) -> bool:
        return all(x.at(p) == s for p, s in self.constraint)

    def positions(self) -> list[int]:
        return [p for p, _ in self.constraint]

    def bounds(self) -> tuple[int, int] | None:
        if not self.constraint:
            return None
        return self.constraint[0][0], self.constraint[-1][0]

    def translate(self, k: int) -> "Cylinder":
        """Constraint satisfied by x.(-k) exactly when self is satisfied by x."""
        return Cylinder(tuple((p + k, s) for p, s in self.constraint))

    def intersect(self, other: "Cylinder") -> "Cylinder | None":
        out = dict(self.constraint)
        for p, s in other.constraint:
            if out.get(p, s) != s:
                return None
            out[p] = s
        return Cylinder(tuple(sorted(out.items())))

    def __len__(self):
        return len(self.constraint)


class Language:
    """Admissible words of a subshift of finite type given by forbidden words."""

    def __init__(self, alphabet: int, forbidden=()):
        if isinstance(alphabet, bool) or not isinstance(alphabet, int) or alphabet < 1:
            raise MalformedSpec(f"alphabet size must be a positive integer, got {alphabet!r}")
        self.k = alphabet
        fw = []
        for w in forbidden:
            w = tuple(int(c) for c in w)
            if not w or any(not 0 <= c < alphabet for c in w):
                raise MalformedSpec(f"forbidden word {w} is empty or uses symbols outside the alphabet")
            fw.append(w)
        self.forbidden = tuple(sorted(set(fw)))
        longest = max((len(w) for w in self.forbidden), default=0)
        self.block = max(1, longest - 1)
        if alphabet ** self.block > MAX_BLOCKS:
            raise UnsupportedModel("subshift block graph too large", blocks=alphabet**self.block)
        self._build()

    @property
    def is_full(self) -> bool:
        return not self.forbidden

    def _clean(self, w) -> bool:
        for f in self.forbidden:
            lf = len(f)
            for i in range(len(w) - lf + 1):
                if w[i : i + lf] == f:
                    return False
        return True

    def _build(self):
        verts = [w for w in itertools.product(range(self.k), repeat=self.block) if self._clean(w)]
        succ = {v: set() for v in verts}
        for v in verts:
            for c in range(self.k):
                w = v + (c,)
                u = w[1:]
                if u in succ and self._clean(w):
                    succ[v].add(u)
        pred = {v: set() for v in verts}
        for v, us in succ.items():
            for u in us:
                pred[u].add(v)
        alive = set(verts)
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                if not (succ[v] & alive) or not (pred[v] & alive):
                    alive.discard(v)
                    changed = True
        self.vertices = alive
        self.succ = {v: frozenset(succ[v] & alive) for v in alive}
        self.pred = {v: frozenset(pred[v] & alive) for v in alive}

    def is_nonempty(self) -> bool:
        return bool(self.vertices)

    @cached_property
    def _short(self) -> frozenset:
        out = set()
        for v in self.vertices:
            for i in range(len(v)):
                for j in range(i, len(v) + 1):
                    out.add(v[i:j])
        return frozenset(out)

    def admissible(self, word) -> bool:
        """True when ``word`` occurs in some point of the subshift."""
        word = tuple(word)
        b = self.block
        if len(word) <= b:
            return word in self._short
        prev = word[:b]
        if prev not in self.vertices:
            return False
        for i in range(1, len(word) - b + 1):
            cur = word[i : i + b]
            if cur not in self.succ[prev]:
                return False
            prev = cur
        return True

    def contains(self, x: Point) -> bool:
        lo, hi = x.span()
        pad = self.block + 2
        if x.is_periodic:
            p = x.period
            return self.admissible(x.window(0, 2 * p + pad))
        return self.admissible(x.window(lo - pad - len(x.key[1]), hi + pad + len(x.key[5])))

    def words(self, lo: int, hi: int, cylinder: Cylinder = Cylinder()):
        """Admissible words on positions lo..hi consistent with ``cylinder``."""
        fixed = {p: s for p, s in cylinder.constraint if lo <= p <= hi}
        length = hi - lo + 1
        b = self.block

        def ok(c, pos):
            return pos not in fixed or fixed[pos] == c

        # walk the essential block graph; every path extends to a point
        def rec(prefix, v):
            n = len(prefix)
            if n == length:
                yield prefix
                return
            for u in sorted(self.succ[v]):
                c = u[-1]
                if ok(c, lo + n):
                    yield from rec(prefix + (c,), u)

        if length <= 0:
            yield ()
            return
        if length <= b:
            for w in sorted(x for x in self._short if len(x) == length):
                if all(ok(c, lo + i) for i, c in enumerate(w)):
                    yield w
            return
        for v in sorted(self.vertices):
            if all(ok(c, lo + i) for i, c in enumerate(v)):
                yield from rec(v, v)

    def _reach(self, v, step) -> set:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in step[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def forced_point(self, word, start: int) -> Point | None:
        """The unique point carrying ``word`` at ``start``, if continuation is forced both ways."""
        word = tuple(word)
        b = self.block
        if len(word) < b or not self.admissible(word):
            return None
        first, last = word[:b], word[-b:]
        if any(len(self.succ[u]) != 1 for u in self._reach(last, self.succ)):
            return None
        if any(len(self.pred[u]) != 1 for u in self._reach(first, self.pred)):
            return None
        return self._extend(word, start)

    def extend(self, word, start: int) -> Point:
        """Some point of the subshift carrying ``word`` at ``start``."""
        word = tuple(word)
        if not self.admissible(word):
            raise ValueError(f"{word} is not admissible")
        b = self.block
        if len(word) < b:
            v = next(v for v in sorted(self.vertices) if _find(v, word) >= 0)
            off = _find(v, word)
            return self._extend(v, start - off)
        return self._extend(word, start)

    def _extend(self, word, start):
        b = self.block
        # forward: follow smallest successor until a vertex repeats
        fwd = [word[-b:]]
        seen = {fwd[0]: 0}
        while True:
            nxt = min(self.succ[fwd[-1]])
            if nxt in seen:
                cyc_start = seen[nxt]
                break
            seen[nxt] = len(fwd)
            fwd.append(nxt)
        right_extra = [v[-1] for v in fwd[1 : cyc_start + 1]]
        cycle = [v[-1] for v in fwd[cyc_start + 1 :]] + [nxt[-1]]
        bwd = [word[:b]]
        seen = {bwd[0]: 0}
        while True:
            prv = min(self.pred[bwd[-1]])
            if prv in seen:
                cyc_b = seen[prv]
                break
            seen[prv] = len(bwd)
            bwd.append(prv)
        left_extra = [v[0] for v in bwd[1 : cyc_b + 1]][::-1]
        lcycle = ([v[0] for v in bwd[cyc_b + 1 :]] + [prv[0]])[::-1]
        middle = tuple(left_extra) + word + tuple(right_extra)
        return Point.from_parts(lcycle, middle, cycle, start - len(left_extra))

    def isolated_cycles(self) -> list[tuple]:
        """Vertex cycles that form a whole component with in = out = 1."""
        out = []
        done = set()
        for v in sorted(self.vertices):
            if v in done or len(self.succ[v]) != 1 or len(self.pred[v]) != 1:
                continue
            cyc = [v]
            ok = True
            u = next(iter(self.succ[v]))
            while u != v:
                if len(self.succ[u]) != 1 or len(self.pred[u]) != 1:
                    ok = False
                    break
                cyc.append(u)
                u = next(iter(self.succ[u]))
            done.update(cyc)
            if ok:
                out.append(tuple(c[-1] for c in cyc))
        return out

    def on_isolated_cycle(self, x: Point) -> bool:
        if not x.is_periodic:
            return False
        b = self.block
        p = x.period
        blocks = {x.window(i, i + b - 1) for i in range(p)}
        return all(len(self.succ.get(v, ())) == 1 and len(self.pred.get(v, ())) == 1 for v in blocks)

    def periodic_point(self, max_period: int) -> Point | None:
        for p in range(1, max_period + 1):
            for w in itertools.product(range(self.k), repeat=p):
                x = Point.periodic(w)
                if self.contains(x):
                    return x
        return None


def _find(hay, needle) -> int:
    n = len(needle)
    for i in range(len(hay) - n + 1):
        if hay[i : i + n] == needle:
            return i
    return -1
