"""Operad algebras on tame actions and certificate-producing rewriting.

A commutative box-monoid is presented by a shifted-sum table on orbit
representatives; validation makes the partially defined sum total on
disjointly supported pairs within the level cap.  Presentations and
operad algebra actions determine each other, and both directions are
implemented, together with the infinite-symmetric-product family and
its wedge decomposition.

The rewriting part connects two multi-slot injections that agree on
prescribed finite sets through a chain of elementary moves, each a
slotwise precomposition fixing the constraint sets pointwise.  The
chain is emitted as a certificate whose verification is exact: every
step is checked by structural equality of quasi-affine normal forms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .errors import (
    ArityMismatch,
    DegreeTooLarge,
    NotAMonoid,
    OverlappingSupports,
    PreconditionViolated,
    SearchExhausted,
    SupportNotCovered,
    ValidationFailed,
)
from .injections import (
    OperadElement,
    PartialInjection,
    Piece,
    QuasiAffineInjection,
    interleave,
    order_embed_avoiding,
)
from .mset import CanonicalTameMSet, MElement, support
from .sigma import SigmaSet, trivial_sigma_set


def std_element(level, point):
    """The element placing a level point at the initial segment."""
    return MElement(level, tuple(range(1, level + 1)), point)


class CommMonoidPresentation:
    """A commutative box-monoid: carrier, unit, and the sums of orbit
    representatives with the second summand shifted past the first."""

    def __init__(self, carrier: CanonicalTameMSet, unit_point, table,
                 level_cap=None):
        self.carrier = carrier
        self.level_cap = carrier.degree_bound if level_cap is None else level_cap
        if 0 not in carrier.levels:
            raise ValidationFailed("no level-0 part to hold the unit")
        if unit_point not in set(carrier.levels[0].points):
            raise ValidationFailed("unit point missing from level 0")
        self.unit_point = unit_point
        self.table = dict(table)
        self._transversals = {
            m: ss.orbit_transversal() for m, ss in carrier.levels.items()
        }

        reps = [
            (m, rep)
            for m, ss in sorted(carrier.levels.items())
            for rep, _ in ss.orbits()
        ]
        wanted = {
            (a, b) for a in reps for b in reps if a[0] + b[0] <= self.level_cap
        }
        if set(self.table) != wanted:
            raise ValidationFailed(
                "sum table must cover exactly the representative pairs "
                "within the level cap"
            )
        for (m, ra), (n, rb) in self.table:
            c = self.table[((m, ra), (n, rb))]
            if not carrier.has_element(c):
                raise ValidationFailed(f"sum of {(m, ra)} and {(n, rb)} invalid")
            if not set(c.image) <= set(range(1, m + n + 1)):
                raise ValidationFailed("sum not supported inside the blocks")
            stab_a = carrier.levels[m].stabilizer(ra) if m else [()]
            stab_b = carrier.levels[n].stabilizer(rb) if n else [()]
            for sa in stab_a:
                for sb in stab_b:
                    f = {k: sa[k - 1] for k in range(1, m + 1)}
                    f.update({m + k: m + sb[k - 1] for k in range(1, n + 1)})
                    if carrier.act(PartialInjection(f), c) != c:
                        raise ValidationFailed(
                            f"sum of {(m, ra)} and {(n, rb)} not equivariant"
                        )

        self.unit = MElement(0, (), unit_point)
        for m, r in reps:
            e = std_element(m, r)
            if self.add(self.unit, e) != e or self.add(e, self.unit) != e:
                raise ValidationFailed(f"unit law fails at {(m, r)}")
        for a in reps:
            for b in reps:
                if a[0] + b[0] > self.level_cap:
                    continue
                x = std_element(*a)
                y = self._shift(std_element(*b), a[0])
                if self.add(x, y) != self.add(y, x):
                    raise ValidationFailed(f"commutativity fails at {a}, {b}")
        for a in reps:
            for b in reps:
                for c in reps:
                    if a[0] + b[0] + c[0] > self.level_cap:
                        continue
                    x = std_element(*a)
                    y = self._shift(std_element(*b), a[0])
                    z = self._shift(std_element(*c), a[0] + b[0])
                    if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)):
                        raise ValidationFailed(
                            f"associativity fails at {a}, {b}, {c}"
                        )

    def _shift(self, e: MElement, offset):
        if offset == 0 or e.level == 0:
            return e
        return MElement(e.level, tuple(v + offset for v in e.image), e.point)

    def add(self, x: MElement, y: MElement) -> MElement:
        """The sum of two disjointly supported elements."""
        if support(x) & support(y):
            raise OverlappingSupports(
                f"supports {set(x.image)} and {set(y.image)} meet"
            )
        m, n = x.level, y.level
        if m + n > self.level_cap:
            raise DegreeTooLarge(
                f"sum at level {m + n} beyond the cap {self.level_cap}"
            )
        carrier = self.carrier
        placements = {}
        parts = []
        for offset, e in ((0, x), (m, y)):
            if e.level == 0:
                parts.append(e.point)
                continue
            sigma = self._transversals[e.level][e.point]
            rep = carrier.levels[e.level].orbit_root(e.point)
            parts.append(rep)
            for k in range(1, e.level + 1):
                placements[offset + k] = e.image[sigma[k - 1] - 1]
        c = self.table[((m, parts[0]), (n, parts[1]))]
        if not placements:
            return c
        return carrier.act(PartialInjection(placements), c)


class AlgebraAction:
    """An operad algebra: a carrier with an n-ary action callable."""

    def __init__(self, carrier: CanonicalTameMSet, action, level_cap=None):
        self.carrier = carrier
        self.action = action
        self.level_cap = carrier.degree_bound if level_cap is None else level_cap
        zero = action(OperadElement([]), [])
        if zero.level != 0 or not carrier.has_element(zero):
            raise ValidationFailed("nullary action must give a fixed element")
        self.zero = zero
        ident = OperadElement([QuasiAffineInjection.identity()])
        for m, ss in carrier.levels.items():
            for rep, _ in ss.orbits():
                e = std_element(m, rep)
                if action(ident, [e]) != e:
                    raise ValidationFailed("unary identity does not act trivially")

    def __call__(self, phi: OperadElement, elements):
        return self.action(phi, list(elements))


def monoid_to_algebra(P: CommMonoidPresentation) -> AlgebraAction:
    """Derive the operadic action: apply each slot to its argument and
    sum the disjointly supported results."""

    def action(phi: OperadElement, elements):
        if phi.arity != len(elements):
            raise ArityMismatch(
                f"arity {phi.arity} applied to {len(elements)} elements"
            )
        total = P.unit
        for slot, e in zip(phi.slots, elements):
            total = P.add(total, P.carrier.act(slot, e))
        return total

    return AlgebraAction(P.carrier, action, P.level_cap)


def algebra_to_monoid(A: AlgebraAction) -> CommMonoidPresentation:
    """Read off the presentation: the unit is the nullary value and a
    representative pair is summed by the two-slot element that keeps
    the first block in place and shifts the second past it."""
    carrier = A.carrier
    unit = A(OperadElement([]), [])
    table = {}
    reps = [
        (m, rep)
        for m, ss in sorted(carrier.levels.items())
        for rep, _ in ss.orbits()
    ]
    for m, ra in reps:
        for n, rb in reps:
            if m + n > A.level_cap:
                continue
            phi = OperadElement(
                [
                    PartialInjection.identity_on(range(1, m + 1)),
                    PartialInjection({j: m + j for j in range(1, n + 1)}),
                ]
            )
            table[((m, ra), (n, rb))] = A(
                phi, [std_element(m, ra), std_element(n, rb)]
            )
    return CommMonoidPresentation(carrier, unit.point, table, A.level_cap)


def trivial_from_abelian(elements, addition, unit):
    """The presentation of an abelian monoid as a carrier concentrated
    at level zero, where every support is empty."""
    elements = list(elements)
    eset = set(elements)
    if unit not in eset:
        raise NotAMonoid("unit missing")

    def add(a, b):
        key = (a, b)
        if key not in addition:
            raise NotAMonoid(f"no sum for {key}")
        return addition[key]

    for a in elements:
        if add(a, unit) != a or add(unit, a) != a:
            raise NotAMonoid(f"unit law fails at {a}")
        for b in elements:
            if add(a, b) not in eset:
                raise NotAMonoid("addition leaves the carrier")
            if add(a, b) != add(b, a):
                raise NotAMonoid(f"commutativity fails at {a}, {b}")
            for c in elements:
                if add(add(a, b), c) != add(a, add(b, c)):
                    raise NotAMonoid(f"associativity fails at {a}, {b}, {c}")

    carrier = CanonicalTameMSet({0: trivial_sigma_set(0, elements)})
    table = {
        ((0, a), (0, b)): MElement(0, (), add(a, b))
        for a in elements
        for b in elements
    }
    return CommMonoidPresentation(carrier, unit, table)


def cyclic_monoid(k):
    """Addition mod k, as plain table data."""
    elements = list(range(k))
    addition = {(a, b): (a + b) % k for a in elements for b in elements}
    return elements, addition, 0


def infinite_symmetric_product(points, basepoint, level_bound):
    """The free commutative box-monoid on a finite pointed set, cut off
    at the given level: level m holds the tuples of non-base values."""
    if basepoint not in set(points):
        raise ValidationFailed("basepoint missing")
    letters = sorted((p for p in points if p != basepoint), key=repr)
    from itertools import product

    levels = {}
    for m in range(level_bound + 1):
        pts = list(product(letters, repeat=m))
        if not pts:
            continue

        def swap(i, t):
            t = list(t)
            t[i - 1], t[i] = t[i], t[i - 1]
            return tuple(t)

        tables = [{t: swap(i, t) for t in pts} for i in range(1, m)]
        levels[m] = SigmaSet(m, pts, tables, degree_bound=max(level_bound, 7))
    carrier = CanonicalTameMSet(levels, degree_bound=max(level_bound, 7))
    table = {}
    for m, ss in carrier.levels.items():
        for ra, _ in ss.orbits():
            for n, tt in carrier.levels.items():
                for rb, _ in tt.orbits():
                    if m + n > level_bound:
                        continue
                    table[((m, ra), (n, rb))] = std_element(m + n, ra + rb)
    return CommMonoidPresentation(carrier, (), table, level_bound)


def function_to_element(func) -> MElement:
    """A finitely supported function, given as position -> non-base
    value, as a canonical element of the symmetric-product carrier."""
    positions = tuple(sorted(func))
    return MElement(len(positions), positions, tuple(func[p] for p in positions))


def element_to_function(e: MElement):
    return {pos: e.point[i] for i, pos in enumerate(e.image)}


def pointwise_action(phi: OperadElement, funcs):
    """The direct action on finitely supported functions: value at
    phi(i, k) is the i-th function's value at k, base elsewhere."""
    out = {}
    if phi.arity != len(funcs):
        raise ArityMismatch("one function per slot")
    for slot, f in zip(phi.slots, funcs):
        for pos, val in f.items():
            target = slot(pos)
            if target in out:
                raise SupportNotCovered("slots overlap on supports")
            out[target] = val
    return out


def wedge_iso(points_x, base_x, points_y, base_y, level_bound):
    """The levelwise comparison between the box product of two
    symmetric products and the symmetric product of the wedge.

    Returns (per-level maps, bijective-and-equivariant flag)."""
    from .mset import box

    PX = infinite_symmetric_product(points_x, base_x, level_bound)
    PY = infinite_symmetric_product(points_y, base_y, level_bound)
    wedge_points = ["*"] + [
        ("x", p) for p in points_x if p != base_x
    ] + [("y", q) for q in points_y if q != base_y]
    PW = infinite_symmetric_product(wedge_points, "*", level_bound)
    B = box(PX.carrier, PY.carrier, degree_bound=max(level_bound, 7),
            level_cap=level_bound)

    letters_x = sorted((p for p in points_x if p != base_x), key=repr)

    maps = {}
    ok = True
    for k in sorted(B.levels):
        src = B.levels[k]
        tgt = PW.carrier.levels.get(k)
        table = {}
        for (m, n), (positions, za, wb) in src.points:
            xs = sorted(positions)
            out = []
            for j in range(1, k + 1):
                if j in positions:
                    out.append(("x", za[xs.index(j)]))
                else:
                    rank = j - 1 - sum(1 for v in xs if v < j)
                    out.append(("y", wb[rank]))
            table[((m, n), (positions, za, wb))] = tuple(out)
        maps[k] = table
        values = list(table.values())
        if tgt is None or len(set(values)) != len(values) or set(values) != set(
            tgt.points
        ):
            ok = False
            continue
        for i in range(1, k):
            s_src = src.transpositions[i - 1]
            s_tgt = tgt.transpositions[i - 1]
            for p in src.points:
                if table[s_src[p]] != s_tgt[table[p]]:
                    ok = False
    return maps, ok


def operadic_to_box(X: CanonicalTameMSet, Y: CanonicalTameMSet,
                    psi: OperadElement, x: MElement, y: MElement):
    """Evaluate the comparison from the operadic pairing to the box
    product: apply the two slots and pair the results."""
    if psi.arity != 2:
        raise ArityMismatch("binary pairing expected")
    xs = X.act(psi.slot(1), x)
    ys = Y.act(psi.slot(2), y)
    return xs, ys


def box_to_operadic(x: MElement, y: MElement) -> OperadElement:
    """The section: identity slots on the two disjoint supports."""
    if support(x) & support(y):
        raise OverlappingSupports("supports meet")
    return OperadElement(
        [
            PartialInjection.identity_on(support(x)),
            PartialInjection.identity_on(support(y)),
        ]
    )


# ---------------------------------------------------------------------------
# certificates


class CertificateStep(NamedTuple):
    element: OperadElement
    move: tuple
    direction: str


class Certificate:
    """A chain of elementary moves between multi-slot injections.  Each
    step records the earlier chain element, the move, and whether the
    move produces the next element (fwd) or recovers this one (bwd)."""

    def __init__(self, n, constraints, steps, final):
        self.n = n
        self.constraints = tuple(frozenset(A) for A in constraints)
        self.steps = list(steps)
        self.final = final

    def chain(self):
        return [s.element for s in self.steps] + [self.final]

    def __len__(self):
        return len(self.steps)


def verify_certificate(cert: Certificate, phi=None, psi=None):
    """Exact verification: every move fixes its constraint set, every
    step joins consecutive elements, endpoints match when given.

    Returns (ok, failing step index or None, reason)."""
    chain = cert.chain()
    for e in chain:
        if e.arity != cert.n:
            return False, None, "arity mismatch in chain"
        if not all(isinstance(s, QuasiAffineInjection) for s in e.slots):
            return False, None, "chain element with inexact slots"
    for idx, step in enumerate(cert.steps):
        cur, nxt = chain[idx], chain[idx + 1]
        if len(step.move) != cert.n:
            return False, idx, "move arity mismatch"
        for f, A in zip(step.move, cert.constraints):
            if not isinstance(f, QuasiAffineInjection):
                return False, idx, "inexact move"
            if not f.fixes_pointwise(A):
                return False, idx, "move fails to fix a constraint set"
        try:
            if step.direction == "fwd":
                if cur.precompose(step.move) != nxt:
                    return False, idx, "forward step does not reach the next element"
            elif step.direction == "bwd":
                if nxt.precompose(step.move) != cur:
                    return False, idx, "backward step does not recover this element"
            else:
                return False, idx, "unknown direction"
        except Exception:
            return False, idx, "step evaluation failed"
    if phi is not None and chain[0] != phi:
        return False, None, "start does not match"
    if psi is not None and chain[-1] != psi:
        return False, None, "end does not match"
    return True, None, "ok"


_ID = QuasiAffineInjection.identity()
_DOUBLE = QuasiAffineInjection.affine(2, 0)
_DOUBLE_ODD = QuasiAffineInjection.affine(2, -1)


def _half_pieces(u: QuasiAffineInjection, delta):
    return QuasiAffineInjection(
        [Piece(p.lo, p.hi, p.mod, p.res, p.a / 2, (p.b + delta) / 2)
         for p in u.pieces]
    )


def _merge_even_odd(even_part: QuasiAffineInjection,
                    odd_part: QuasiAffineInjection):
    """The map sending 2i to even_part(i) and 2i-1 to odd_part(i)."""
    pieces = []
    for p in even_part.pieces:
        pieces.append(
            Piece(2 * p.lo, None if p.hi is None else 2 * p.hi,
                  2 * p.mod, (2 * p.res) % (2 * p.mod), p.a / 2, p.b)
        )
    for p in odd_part.pieces:
        pieces.append(
            Piece(2 * p.lo - 1, None if p.hi is None else 2 * p.hi - 1,
                  2 * p.mod, (2 * p.res - 1) % (2 * p.mod),
                  p.a / 2, p.b + p.a / 2)
        )
    return QuasiAffineInjection(pieces)


def _slot_parity(u: QuasiAffineInjection):
    """'odd' or 'even' when all values share a parity, else None."""
    seen = set()
    for p in u.pieces:
        prog = p.image_progression()
        if prog is None:
            continue
        start, step, count = prog
        if count == 1:
            seen.add(start % 2)
        elif step % 2 == 0:
            seen.add(start % 2)
        else:
            return None
        if len(seen) > 1:
            return None
    return "odd" if seen == {1} else "even"


def _widening_move(u: QuasiAffineInjection):
    """An affine move whose image lies in one unbounded piece of u with
    an even value step, forcing constant parity after precomposition."""
    mods = [p.mod for p in u.pieces if p.hi is None]
    starts = [p.lo for p in u.pieces if p.hi is None]
    L = 2
    for m in mods:
        from math import lcm

        L = lcm(L, 2 * m)
    c = max(max(starts) - L, 0)
    return QuasiAffineInjection.affine(L, c)


def _connect_to_interleave(phi: OperadElement):
    """A chain from a binary element to the standard interleaving,
    following the parity case analysis."""
    s = interleave()
    if phi == s:
        return [phi], []
    p1 = _slot_parity(phi.slot(1))
    p2 = _slot_parity(phi.slot(2))
    if p1 == "odd" and p2 == "even":
        alpha = _half_pieces(phi.slot(1), 1)
        beta = _half_pieces(phi.slot(2), 0)
        return [phi, s], [CertificateStep(phi, (alpha, beta), "bwd")]
    if p1 == "odd" and p2 == "odd":
        ext = OperadElement(
            [phi.slot(1), _merge_even_odd(phi.slot(2), _DOUBLE)]
        )
        chi = ext.precompose((_ID, _DOUBLE_ODD))
        tail_elems, tail_steps = _connect_to_interleave(chi)
        return (
            [phi, ext] + tail_elems,
            [
                CertificateStep(phi, (_ID, _DOUBLE), "bwd"),
                CertificateStep(ext, (_ID, _DOUBLE_ODD), "fwd"),
            ]
            + tail_steps,
        )
    if p1 == "even" and p2 == "even":
        ext = OperadElement(
            [phi.slot(1), _merge_even_odd(phi.slot(2), _DOUBLE_ODD)]
        )
        chi = ext.precompose((_ID, _DOUBLE_ODD))
        tail_elems, tail_steps = _connect_to_interleave(chi)
        return (
            [phi, ext] + tail_elems,
            [
                CertificateStep(phi, (_ID, _DOUBLE), "bwd"),
                CertificateStep(ext, (_ID, _DOUBLE_ODD), "fwd"),
            ]
            + tail_steps,
        )
    if p1 == "even" and p2 == "odd":
        thin = phi.precompose((_ID, _DOUBLE))
        ext = OperadElement(
            [
                _merge_even_odd(phi.slot(1), phi.slot(2).compose(_DOUBLE_ODD)),
                thin.slot(2),
            ]
        )
        chi = ext.precompose((_DOUBLE_ODD, _ID))
        tail_elems, tail_steps = _connect_to_interleave(chi)
        return (
            [phi, thin, ext] + tail_elems,
            [
                CertificateStep(phi, (_ID, _DOUBLE), "fwd"),
                CertificateStep(thin, (_DOUBLE, _ID), "bwd"),
                CertificateStep(ext, (_DOUBLE_ODD, _ID), "fwd"),
            ]
            + tail_steps,
        )
    # mixed parities: land each slot inside one unbounded piece
    alpha = _widening_move(phi.slot(1)) if p1 is None else _ID
    beta = _widening_move(phi.slot(2)) if p2 is None else _ID
    squeezed = phi.precompose((alpha, beta))
    tail_elems, tail_steps = _connect_to_interleave(squeezed)
    return (
        [phi] + tail_elems,
        [CertificateStep(phi, (alpha, beta), "fwd")] + tail_steps,
    )


def _flip(direction):
    return "bwd" if direction == "fwd" else "fwd"


def _reverse_chain(elems, steps):
    """Run a chain backwards; each step flips its direction."""
    out_elems = list(reversed(elems))
    out_steps = []
    for idx in range(len(steps) - 1, -1, -1):
        pos = len(steps) - 1 - idx
        out_steps.append(
            CertificateStep(out_elems[pos], steps[idx].move, _flip(steps[idx].direction))
        )
    return out_elems, out_steps


def _join_chains(e1, s1, e2, s2):
    assert e1[-1] == e2[0]
    return e1 + e2[1:], s1 + s2


def _merge_last(e: OperadElement):
    """Fuse the last two slots through the interleaving."""
    merged = _merge_even_odd(e.slots[-1], e.slots[-2])
    return OperadElement(e.slots[:-2] + (merged,))


def _split_last(e: OperadElement):
    """Undo _merge_last: odd positions restore slot n-1, even ones slot n."""
    merged = e.slots[-1]
    return OperadElement(
        e.slots[:-1]
        + (merged.compose(_DOUBLE_ODD), merged.compose(_DOUBLE))
    )


def _single_slot_steps(elems, steps, arity):
    """Refine each multi-slot move into consecutive single-slot moves."""
    out_elems = [elems[0]]
    out_steps = []
    for idx, step in enumerate(steps):
        nxt = elems[idx + 1]
        move = step.move
        if step.direction == "fwd":
            acc = out_elems[-1]
            for k in range(arity):
                if move[k] == _ID:
                    continue
                single = tuple(move[k] if j == k else _ID for j in range(arity))
                acc = acc.precompose(single)
                out_steps.append(CertificateStep(out_elems[-1], single, "fwd"))
                out_elems.append(acc)
            assert acc == nxt
        else:
            partials = []
            for k in range(arity, 0, -1):
                if move[k - 1] == _ID:
                    continue
                prefix = tuple(
                    move[j] if j < k - 1 else _ID for j in range(arity)
                )
                single = tuple(
                    move[k - 1] if j == k - 1 else _ID for j in range(arity)
                )
                target = nxt.precompose(prefix)
                out_steps.append(CertificateStep(out_elems[-1], single, "bwd"))
                out_elems.append(target)
            assert out_elems[-1] == nxt
    return out_elems, out_steps


def _connect(phi: OperadElement, psi: OperadElement, n):
    """A chain between two slotwise exact elements of equal arity with
    no constraints; recursion merges the last two slots."""
    if phi == psi:
        return [phi], []
    if n == 2:
        e1, s1 = _connect_to_interleave(phi)
        e2, s2 = _connect_to_interleave(psi)
        r2, rs2 = _reverse_chain(e2, s2)
        return _join_chains(e1, s1, r2, rs2)

    bar_elems, bar_steps = _connect(_merge_last(phi), _merge_last(psi), n - 1)
    bar_elems, bar_steps = _single_slot_steps(bar_elems, bar_steps, n - 1)

    out_elems = [_split_last(bar_elems[0])]
    out_steps = []
    for idx, step in enumerate(bar_steps):
        cur_b, nxt_b = bar_elems[idx], bar_elems[idx + 1]
        slot_index = next(
            k for k in range(n - 1) if step.move[k] != _ID
        )
        f = step.move[slot_index]
        if slot_index < n - 2:
            move = tuple(
                f if j == slot_index else _ID for j in range(n)
            )
            nxt_full = _split_last(nxt_b)
            out_steps.append(CertificateStep(out_elems[-1], move, step.direction))
            out_elems.append(nxt_full)
            continue
        # the move lives in the merged slot: expand through binary chains
        F = OperadElement([f.compose(_DOUBLE_ODD), f.compose(_DOUBLE)])
        Fe, Fs = _connect_to_interleave(F)
        u = (cur_b if step.direction == "fwd" else nxt_b).slots[-1]
        lifted = [
            OperadElement([u.compose(e.slot(1)), u.compose(e.slot(2))])
            for e in Fe
        ]
        lifted_steps = [
            CertificateStep(lifted[i], Fs[i].move, Fs[i].direction)
            for i in range(len(Fs))
        ]
        if step.direction == "fwd":
            lifted, lifted_steps = _reverse_chain(lifted, lifted_steps)
        lower = cur_b.slots[: n - 2]
        for i, sub in enumerate(lifted_steps):
            pair = lifted[i + 1]
            move = tuple(_ID for _ in range(n - 2)) + sub.move
            out_steps.append(CertificateStep(out_elems[-1], move, sub.direction))
            out_elems.append(
                OperadElement(lower + (pair.slot(1), pair.slot(2)))
            )
    return out_elems, out_steps


def _drop_values(u: QuasiAffineInjection, avoid):
    """Compose with the order collapse of omega minus a finite value
    set back onto omega; defined when the image of u avoids the set."""
    if not avoid:
        return u
    from math import ceil, floor

    cuts = sorted(avoid)
    windows = [(0, cuts[0])]
    windows += [(cuts[j], cuts[j + 1]) for j in range(len(cuts) - 1)]
    windows += [(cuts[-1], None)]
    pieces = []
    for p in u.pieces:
        for j, (lo_v, hi_v) in enumerate(windows):
            lo_i = ceil(Fraction(lo_v + 1 - p.b, 1) / p.a)
            lo = max(p.lo, lo_i)
            hi = p.hi
            if hi_v is not None:
                top = floor(Fraction(hi_v - 1 - p.b, 1) / p.a)
                hi = top if hi is None else min(hi, top)
            if hi is not None and lo > hi:
                continue
            pieces.append(Piece(lo, hi, p.mod, p.res, p.a, p.b - j))
    return QuasiAffineInjection(pieces)


def _meet_progressions(lo1, hi1, mod1, res1, lo2, hi2, mod2, res2):
    from math import gcd, lcm

    g = gcd(mod1, mod2)
    if (res1 - res2) % g != 0:
        return None
    m = lcm(mod1, mod2)
    t = ((res2 - res1) // g * pow((mod1 // g) % (mod2 // g), -1, mod2 // g)
         % (mod2 // g)) if mod2 // g > 1 else 0
    r = (res1 + mod1 * t) % m
    lo = max(lo1, lo2)
    hi = None
    if hi1 is not None:
        hi = hi1
    if hi2 is not None:
        hi = hi2 if hi is None else min(hi, hi2)
    first = lo + ((r - lo) % m)
    if hi is not None and first > hi:
        return None
    return first, hi, m, r


def _inflate_along(c: QuasiAffineInjection, t: QuasiAffineInjection, pinned):
    """The map h with h(c(i)) = t(i) off the pinned set and the pinned
    values on it; c must have slope-one pieces (an order embedding)."""
    pieces = [
        Piece(a, a, 1, 0, Fraction(1), Fraction(v - a)) for a, v in pinned.items()
    ]
    for pc in c.pieces:
        assert pc.a == 1
        shift = int(pc.b)
        for pt in t.pieces:
            met = _meet_progressions(
                pc.lo, pc.hi, pc.mod, pc.res, pt.lo, pt.hi, pt.mod, pt.res
            )
            if met is None:
                continue
            lo, hi, mod, res = met
            pieces.append(
                Piece(lo + shift, None if hi is None else hi + shift,
                      mod, (res + shift) % mod, pt.a, pt.b - pt.a * shift)
            )
    return QuasiAffineInjection(pieces)


def certify_agreement(phi: OperadElement, psi: OperadElement, constraints):
    """Produce a verified chain between two elements that agree on the
    prescribed sets; every move fixes those sets pointwise.

    The construction conjugates away the constraints with the order
    embeddings avoiding them, connects the images through the parity
    case analysis (splitting off the last slot above arity two), and
    transports the chain back."""
    n = phi.arity
    if n < 2:
        raise PreconditionViolated("arity must be at least two")
    if psi.arity != n or len(constraints) != n:
        raise PreconditionViolated("arities and constraint count must agree")
    constraints = [frozenset(int(a) for a in A) for A in constraints]
    for e in (phi, psi):
        if not all(isinstance(s, QuasiAffineInjection) for s in e.slots):
            raise PreconditionViolated("slots must be quasi-affine")
    for i in range(n):
        for a in constraints[i]:
            if phi.slot(i + 1)(a) != psi.slot(i + 1)(a):
                raise PreconditionViolated(
                    f"elements disagree at slot {i + 1}, point {a}"
                )

    if phi == psi:
        cert = Certificate(n, constraints, [], phi)
    else:
        embeds = [order_embed_avoiding(A) for A in constraints]
        pinned_slots = [
            {a: phi.slot(i + 1)(a) for a in constraints[i]} for i in range(n)
        ]
        pinned_id = [{a: a for a in constraints[i]} for i in range(n)]
        # relabel the target so that the pinned values disappear; the
        # connecting chain then cannot run into them
        taken = sorted(v for pin in pinned_slots for v in pin.values())
        lift = order_embed_avoiding(taken)
        inner_phi = OperadElement(
            [_drop_values(s.compose(c), taken)
             for s, c in zip(phi.slots, embeds)]
        )
        inner_psi = OperadElement(
            [_drop_values(s.compose(c), taken)
             for s, c in zip(psi.slots, embeds)]
        )
        elems, steps = _connect(inner_phi, inner_psi, n)

        def restore(e):
            return OperadElement(
                [
                    _inflate_along(
                        embeds[i], lift.compose(e.slots[i]), pinned_slots[i]
                    )
                    for i in range(n)
                ]
            )

        out_elems = [restore(e) for e in elems]
        out_steps = []
        for idx, step in enumerate(steps):
            move = tuple(
                _inflate_along(
                    embeds[i], embeds[i].compose(step.move[i]), pinned_id[i]
                )
                for i in range(n)
            )
            out_steps.append(
                CertificateStep(out_elems[idx], move, step.direction)
            )
        cert = Certificate(n, constraints, out_steps, out_elems[-1])

    ok, at, reason = verify_certificate(cert, phi, psi)
    if not ok:
        raise SearchExhausted(f"construction failed verification: {reason} ({at})")
    return cert
