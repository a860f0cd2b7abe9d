"""Exact calculus for injective maps of the positive naturals.

Three representations coexist.  A PartialInjection is a finite
injective map, enough whenever it acts on something with bounded
support.  A QuasiAffineInjection is a total injection of omega that is
affine on finitely many arithmetic progressions partitioning omega;
this class is closed under composition and admits a canonical normal
form, so equality of total injections is decided structurally.  An
OperadElement bundles n pairwise disjoint injections into one n-ary
operation.

Coefficients of quasi-affine pieces are rationals: a piece may send
``i`` to ``(i+1)/2`` on the odd numbers, which is integral on its
progression even though the slope is not an integer.  Such pieces are
unavoidable once slots get merged and split in certificate chains.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple, Sequence, Union

from .errors import (
    ArityMismatch,
    DomainMismatch,
    IndexOutOfRange,
    NotCovering,
    NotInjective,
)


def _ceil_div(a, b):
    return -((-a) // b)


def _floor_div(a, b):
    return a // b


def _mod_inverse(a, m):
    # m >= 1 and gcd(a, m) == 1
    return pow(a % m, -1, m) if m > 1 else 0


def _crt(r1, m1, r2, m2):
    """Combine x = r1 (mod m1) and x = r2 (mod m2).

    Returns (r, lcm(m1, m2)) or None when incompatible.
    """
    g = gcd(m1, m2)
    if (r2 - r1) % g != 0:
        return None
    l = lcm(m1, m2)
    t = ((r2 - r1) // g * _mod_inverse(m1 // g, m2 // g)) % (m2 // g)
    return ((r1 + m1 * t) % l, l)


def _progressions_intersect(p1, p2):
    """Whether two integer progressions (start, step, count) meet.

    count is None for an infinite progression; step >= 1.
    """
    s1, d1, n1 = p1
    s2, d2, n2 = p2
    e1 = None if n1 is None else s1 + d1 * (n1 - 1)
    e2 = None if n2 is None else s2 + d2 * (n2 - 1)
    sol = _crt(s1 % d1, d1, s2 % d2, d2)
    if sol is None:
        return False
    r, m = sol
    low = max(s1, s2)
    x = low + ((r - low) % m)
    if e1 is not None and x > e1:
        return False
    if e2 is not None and x > e2:
        return False
    return True


class PartialInjection:
    """A finite injective map between sets of positive naturals."""

    __slots__ = ("mapping",)

    def __init__(self, mapping):
        m = {}
        seen = {}
        for k, v in mapping.items():
            k = int(k)
            v = int(v)
            if k < 1 or v < 1:
                raise ValueError("keys and values must be >= 1")
            if v in seen:
                raise NotInjective(f"both {seen[v]} and {k} map to {v}")
            seen[v] = k
            m[k] = v
        self.mapping = m

    @classmethod
    def identity_on(cls, keys):
        return cls({k: k for k in keys})

    def __call__(self, i):
        try:
            return self.mapping[i]
        except KeyError:
            raise DomainMismatch(f"{i} not in domain") from None

    def __contains__(self, i):
        return i in self.mapping

    def domain(self):
        return frozenset(self.mapping)

    def image(self):
        return frozenset(self.mapping.values())

    def compose(self, inner: "PartialInjection") -> "PartialInjection":
        """self after inner, defined on the keys of inner."""
        out = {}
        for k, v in inner.mapping.items():
            if v not in self.mapping:
                raise DomainMismatch(f"inner value {v} outside outer domain")
            out[k] = self.mapping[v]
        return PartialInjection(out)

    def fixes_pointwise(self, points):
        return all(self.mapping.get(p) == p for p in points)

    def complete(self) -> "QuasiAffineInjection":
        """The total extension sending the complement of the domain
        order-preservingly onto the complement of the image."""
        dom = set(self.mapping)
        img = set(self.mapping.values())
        bound = max(dom | img, default=0)
        pieces = [
            Piece(k, k, 1, 0, Fraction(1), Fraction(v - k))
            for k, v in self.mapping.items()
        ]
        free_targets = iter(sorted(set(range(1, bound + 1)) - img))
        for i in sorted(set(range(1, bound + 1)) - dom):
            v = next(free_targets)
            pieces.append(Piece(i, i, 1, 0, Fraction(1), Fraction(v - i)))
        pieces.append(Piece(bound + 1, None, 1, 0, Fraction(1), Fraction(0)))
        return QuasiAffineInjection(pieces)

    def __eq__(self, other):
        return isinstance(other, PartialInjection) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}->{v}" for k, v in sorted(self.mapping.items()))
        return f"PartialInjection({{{inner}}})"


class Piece(NamedTuple):
    """One quasi-affine piece: i -> a*i + b on the progression
    {i : lo <= i <= hi, i = res (mod mod)}.  hi None means unbounded."""

    lo: int
    hi: Union[int, None]
    mod: int
    res: int
    a: Fraction
    b: Fraction

    def first(self):
        f = self.lo + ((self.res - self.lo) % self.mod)
        if self.hi is not None and f > self.hi:
            return None
        return f

    def count(self):
        f = self.first()
        if f is None:
            return 0
        if self.hi is None:
            return None
        return (self.hi - f) // self.mod + 1

    def contains(self, i):
        if i < self.lo or (self.hi is not None and i > self.hi):
            return False
        return i % self.mod == self.res % self.mod

    def value(self, i):
        v = self.a * i + self.b
        if v.denominator != 1:
            raise NotInjective(f"non-integral value at {i}")
        return int(v)

    def image_progression(self):
        """The image as (start, step, count); step is the integer a*mod.
        A one-point piece reports step 1."""
        f = self.first()
        if f is None:
            return None
        if self.count() == 1:
            return (self.value(f), 1, 1)
        step = self.a * self.mod
        assert step.denominator == 1
        return (self.value(f), int(step), self.count())


def _coerce_piece(p):
    if isinstance(p, Piece):
        lo, hi, mod, res, a, b = p
    else:
        lo, hi, mod, res, a, b = p
    lo = int(lo)
    hi = None if hi is None else int(hi)
    mod = int(mod)
    res = int(res) % mod
    a = Fraction(a)
    b = Fraction(b)
    if lo < 1 or mod < 1:
        raise ValueError("piece bounds must be positive")
    if hi is not None and hi < lo:
        raise ValueError("piece has hi < lo")
    if a <= 0:
        raise NotInjective("pieces must be strictly increasing (a > 0)")
    return Piece(lo, hi, mod, res, a, b)


def _validate_and_normalize(pieces):
    pieces = [_coerce_piece(p) for p in pieces]
    pieces = [p for p in pieces if p.first() is not None]
    if not any(p.hi is None for p in pieces):
        raise NotCovering("no unbounded piece; omega cannot be covered")

    # integrality: value integral at the first point; the step a*mod
    # must be integral once the piece has a second point
    for p in pieces:
        if p.count() != 1 and (p.a * p.mod).denominator != 1:
            raise NotInjective(f"non-integral step on {p}")
        v0 = p.a * p.first() + p.b
        if v0.denominator != 1:
            raise NotInjective(f"non-integral value on {p}")
        if v0 < 1:
            raise NotInjective(f"value below 1 on {p}")

    # coverage: pairwise disjoint domains whose unbounded part has
    # density exactly one, with no gap below the periodic region
    doms = [(p.first(), p.mod, p.count()) for p in pieces]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if _progressions_intersect(doms[i], doms[j]):
                raise NotCovering(
                    f"domains of {pieces[i]} and {pieces[j]} overlap"
                )
    unbounded = [p for p in pieces if p.hi is None]
    if sum(Fraction(1, p.mod) for p in unbounded) != 1:
        raise NotCovering("unbounded pieces do not have full density")
    tail_start = max(p.first() for p in unbounded)
    below = tail_start - 1
    covered = 0
    for p in pieces:
        f = p.first()
        if f is None or f > below:
            continue
        top = below if p.hi is None else min(p.hi, below)
        if top >= f:
            covered += (top - f) // p.mod + 1
    if covered != below:
        raise NotCovering(f"gap below {tail_start}")
    bound = 1
    for p in pieces:
        bound = max(bound, p.lo)
        if p.hi is not None:
            bound = max(bound, p.hi + 1)
    period = 1
    for p in unbounded:
        period = lcm(period, p.mod)

    # injectivity: images of distinct pieces are disjoint progressions
    progs = [p.image_progression() for p in pieces]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if _progressions_intersect(progs[i], progs[j]):
                raise NotInjective(
                    f"images of pieces {pieces[i]} and {pieces[j]} overlap"
                )

    def evaluate(i):
        for p in pieces:
            if p.contains(i):
                return p.value(i)
        raise AssertionError("unreachable: coverage validated")

    # tail description modulo `period` beyond `bound`
    tail_of_res = {}
    for c in range(period):
        x = bound + ((c - bound) % period)
        for p in pieces:
            if p.hi is None and p.contains(x):
                tail_of_res[c] = (p.a, p.b)
                break

    # minimal period: residue classes mod cand must carry a single affine map
    best = period
    for cand in range(1, period):
        g = gcd(cand, period)
        ok = all(
            len({tail_of_res[c] for c in range(period) if c % g == r}) == 1
            for r in range(g)
        )
        if ok:
            best = cand
            break
    g = gcd(best, period)
    tail_maps = {
        r: tail_of_res[next(c for c in range(period) if c % g == r % g)]
        for r in range(best)
    }

    # minimal threshold: pull the tail description down while it still matches
    start = bound
    while start > 1:
        i = start - 1
        a, b = tail_maps[i % best]
        v = a * i + b
        if v.denominator == 1 and int(v) == evaluate(i):
            start = i
        else:
            break

    normal = [
        Piece(i, i, 1, 0, Fraction(1), Fraction(evaluate(i) - i))
        for i in range(1, start)
    ]
    for r in range(best):
        lo = start + ((r - start) % best)
        a, b = tail_maps[r]
        normal.append(Piece(lo, None, best, lo % best, a, b))
    normal.sort(key=lambda p: p.lo)
    return tuple(normal)


class QuasiAffineInjection:
    """A total injection of omega, affine on finitely many arithmetic
    progressions.  Instances are stored in canonical normal form, so
    structural equality decides functional equality."""

    __slots__ = ("pieces",)

    def __init__(self, pieces):
        self.pieces = _validate_and_normalize(pieces)

    @classmethod
    def identity(cls):
        return cls.affine(1, 0)

    @classmethod
    def affine(cls, a, b):
        """i -> a*i + b on all of omega."""
        return cls([Piece(1, None, 1, 0, Fraction(a), Fraction(b))])

    def __call__(self, i):
        for p in self.pieces:
            if p.contains(i):
                return p.value(i)
        raise AssertionError("pieces cover omega")

    def compose(self, inner: "QuasiAffineInjection") -> "QuasiAffineInjection":
        """self after inner; the class is closed under composition."""
        pieces = []
        for pf in inner.pieces:
            f0 = pf.first()
            if pf.count() == 1:
                v = self(pf.value(f0))
                pieces.append(
                    Piece(f0, f0, 1, 0, Fraction(1), Fraction(v - f0))
                )
                continue
            kmax = None if pf.count() is None else pf.count() - 1
            v0 = pf.value(f0)
            step = int(pf.a * pf.mod)
            for pg in self.pieces:
                # indices k with v0 + k*step inside pg
                sol_k = None
                if (v0 - pg.res) % gcd(step, pg.mod) == 0:
                    g = gcd(step, pg.mod)
                    mk = pg.mod // g
                    k0 = ((pg.res - v0) // g * _mod_inverse(step // g, mk)) % mk if mk > 1 else 0
                    sol_k = (k0, mk)
                if sol_k is None:
                    continue
                k0, mk = sol_k
                klo = k0 if v0 + k0 * step >= pg.lo else k0 + mk * _ceil_div(pg.lo - (v0 + k0 * step), step * mk)
                khi = kmax
                if pg.hi is not None:
                    top = _floor_div(pg.hi - v0, step)
                    khi = top if khi is None else min(khi, top)
                if khi is not None and klo > khi:
                    continue
                lo_i = f0 + klo * pf.mod
                hi_i = None if khi is None else f0 + khi * pf.mod
                mod_i = pf.mod * mk
                a = pg.a * pf.a
                b = pg.a * pf.b + pg.b
                pieces.append(Piece(lo_i, hi_i, mod_i, lo_i % mod_i, a, b))
        return QuasiAffineInjection(pieces)

    def image_contains(self, v):
        for p in self.pieces:
            x = (Fraction(v) - p.b) / p.a
            if x.denominator == 1 and p.contains(int(x)):
                return True
        return False

    def image_progressions(self):
        return [p.image_progression() for p in self.pieces]

    def fixes_pointwise(self, points):
        return all(self(p) == p for p in points)

    def __eq__(self, other):
        return (
            isinstance(other, QuasiAffineInjection) and self.pieces == other.pieces
        )

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return f"QuasiAffineInjection({list(self.pieces)!r})"


def order_embed_avoiding(avoid) -> QuasiAffineInjection:
    """The order-preserving bijection from omega onto omega minus the
    given finite set."""
    avoid = set(avoid)
    bound = max(avoid, default=0)
    pieces = []
    targets = iter(sorted(set(range(1, bound + 1)) - avoid))
    head = bound - len(avoid)
    for i in range(1, head + 1):
        v = next(targets)
        pieces.append(Piece(i, i, 1, 0, Fraction(1), Fraction(v - i)))
    pieces.append(Piece(head + 1, None, 1, 0, Fraction(1), Fraction(len(avoid))))
    return QuasiAffineInjection(pieces)


Injection = Union[PartialInjection, QuasiAffineInjection]


def compose_any(outer: Injection, inner: Injection) -> Injection:
    """Compose across representations where that makes sense."""
    if isinstance(outer, QuasiAffineInjection):
        if isinstance(inner, QuasiAffineInjection):
            return outer.compose(inner)
        return PartialInjection({k: outer(v) for k, v in inner.mapping.items()})
    if isinstance(inner, PartialInjection):
        return outer.compose(inner)
    raise DomainMismatch("cannot compose a total injection under a partial one")


def _images_disjoint(s, t):
    if isinstance(s, PartialInjection) and isinstance(t, PartialInjection):
        return not (s.image() & t.image())
    if isinstance(s, QuasiAffineInjection) and isinstance(t, QuasiAffineInjection):
        for p in s.image_progressions():
            for q in t.image_progressions():
                if p and q and _progressions_intersect(p, q):
                    return False
        return True
    qa, part = (s, t) if isinstance(s, QuasiAffineInjection) else (t, s)
    return not any(qa.image_contains(v) for v in part.image())


class OperadElement:
    """An n-ary operation: n injections with pairwise disjoint images.
    Slot j plays the role of the restriction to the j-th coordinate."""

    __slots__ = ("slots",)

    def __init__(self, slots: Sequence[Injection]):
        slots = tuple(slots)
        for s in slots:
            if not isinstance(s, (PartialInjection, QuasiAffineInjection)):
                raise ValueError(f"bad slot {s!r}")
        for i in range(len(slots)):
            for j in range(i + 1, len(slots)):
                if not _images_disjoint(slots[i], slots[j]):
                    raise NotInjective(f"slots {i + 1} and {j + 1} share image values")
        self.slots = slots

    @property
    def arity(self):
        return len(self.slots)

    def slot(self, j):
        if not 1 <= j <= self.arity:
            raise IndexOutOfRange(f"slot {j} of an arity-{self.arity} element")
        return self.slots[j - 1]

    def compose(self, parts: Sequence["OperadElement"]) -> "OperadElement":
        """Operadic composition: block m of the result is slot m of self
        composed with the slots of the m-th part."""
        if len(parts) != self.arity:
            raise ArityMismatch(f"expected {self.arity} parts, got {len(parts)}")
        slots = []
        for m, part in enumerate(parts, start=1):
            outer = self.slots[m - 1]
            for inner in part.slots:
                slots.append(compose_any(outer, inner))
        return OperadElement(slots)

    def permute(self, sigma):
        """Right action of a permutation: slot k becomes slot sigma(k)."""
        if len(sigma) != self.arity:
            raise ArityMismatch("permutation degree differs from arity")
        return OperadElement(tuple(self.slots[sigma[k] - 1] for k in range(self.arity)))

    def precompose(self, moves: Sequence[Injection]) -> "OperadElement":
        """self after (f_1 + ... + f_n): slot i becomes slot_i after f_i."""
        if len(moves) != self.arity:
            raise ArityMismatch("one move per slot required")
        return OperadElement(
            tuple(compose_any(s, f) for s, f in zip(self.slots, moves))
        )

    def postcompose(self, f: Injection) -> "OperadElement":
        """(f after self): every slot gets f applied on the outside."""
        return OperadElement(tuple(compose_any(f, s) for s in self.slots))

    def __eq__(self, other):
        return isinstance(other, OperadElement) and self.slots == other.slots

    def __hash__(self):
        return hash(self.slots)

    def __repr__(self):
        return f"OperadElement({list(self.slots)!r})"


def interleave() -> OperadElement:
    """The standard 2-ary bijection: slot 1 is i -> 2i-1, slot 2 is i -> 2i."""
    return OperadElement(
        [QuasiAffineInjection.affine(2, -1), QuasiAffineInjection.affine(2, 0)]
    )
