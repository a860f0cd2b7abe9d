"""Canonical finitely supported actions of the injection monoid.

A tame action decomposes levelwise: level m collects the elements
supported on exactly {1..m}, a finite symmetric-group set.  A concrete
element is a pair (image tuple, point): the tuple places the abstract
level-m point at m concrete naturals.  Canonical representatives keep
the image sorted, so equality is tuple comparison and no group search
is ever needed.

The box product of two such actions pairs disjointly supported
elements; its canonical form is computed levelwise by induction of
symmetric-group sets, and the explicit pairing/unpairing maps are what
the law suites exercise.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

from .errors import (
    DegreeTooLarge,
    InvalidMorphism,
    NotTame,
    OverlappingSupports,
    SupportNotCovered,
    WindowTooSmall,
)
from .injections import PartialInjection, QuasiAffineInjection, order_embed_avoiding
from .sigma import (
    DEFAULT_DEGREE_BOUND,
    SigmaSet,
    induce,
    iso_equal,
    perm_inverse,
    point_key,
    trivial_sigma_set,
)


class MElement(NamedTuple):
    """One element: a point of level `level` placed at the naturals in
    `image` (kept sorted for canonical representatives)."""

    level: int
    image: tuple
    point: object


def support(x: MElement):
    """The support is the set of image entries; empty at level zero."""
    return frozenset(x.image)


def _value_of(f, v):
    if isinstance(f, PartialInjection):
        got = f.mapping.get(v)
        if got is None:
            raise SupportNotCovered(f"{v} not in the domain of {f!r}")
        return got
    if isinstance(f, QuasiAffineInjection):
        return f(v)
    got = f.get(v)
    if got is None:
        raise SupportNotCovered(f"{v} not in the domain")
    return got


class CanonicalTameMSet:
    """A level family of symmetric-group sets; empty levels omitted."""

    def __init__(self, levels, degree_bound=DEFAULT_DEGREE_BOUND):
        lv = {}
        for m, ss in levels.items():
            m = int(m)
            if len(ss) == 0:
                continue
            if ss.m != m:
                raise ValueError(f"level {m} holds a degree-{ss.m} set")
            lv[m] = ss
        self.levels = lv
        self.degree_bound = degree_bound

    @property
    def max_level(self):
        return max(self.levels, default=0)

    def has_element(self, x: MElement):
        ss = self.levels.get(x.level)
        return (
            ss is not None
            and x.point in set(ss.points)
            and len(x.image) == x.level
            and tuple(sorted(x.image)) == x.image
        )

    def canonical(self, level, image, point):
        """The canonical representative of [image, point]: sort the
        image and push the sorting permutation into the point."""
        image = tuple(image)
        if len(set(image)) != len(image):
            raise ValueError("image entries must be distinct")
        order = sorted(range(level), key=image.__getitem__)
        sigma = tuple(j + 1 for j in order)
        if sigma == tuple(range(1, level + 1)):
            return MElement(level, image, point)
        ss = self.levels[level]
        new_point = ss.act_perm(perm_inverse(sigma), point)
        return MElement(level, tuple(image[j] for j in order), new_point)

    def act(self, f, x: MElement) -> MElement:
        """Apply an injection defined on the support of x."""
        image = tuple(_value_of(f, v) for v in x.image)
        if len(set(image)) != len(image):
            raise SupportNotCovered("map not injective on the support")
        return self.canonical(x.level, image, x.point)

    def elements_up_to(self, N):
        """All canonical elements supported inside {1..N}."""
        out = []
        for m in sorted(self.levels):
            if m > N:
                continue
            ss = self.levels[m]
            for S in combinations(range(1, N + 1), m):
                for p in ss.points:
                    out.append(MElement(m, S, p))
        return out

    def count_up_to(self, N):
        from math import comb

        return sum(
            comb(N, m) * len(ss) for m, ss in self.levels.items() if m <= N
        )

    def orbit_set(self):
        """The set of orbits of the action: one entry per orbit of each
        level, since the action preserves levels."""
        return [
            (m, rep)
            for m in sorted(self.levels)
            for rep, _ in self.levels[m].orbits()
        ]

    def __repr__(self):
        sizes = {m: len(ss) for m, ss in sorted(self.levels.items())}
        return f"CanonicalTameMSet(levels={sizes})"


def mset_iso_equal(X: CanonicalTameMSet, Y: CanonicalTameMSet):
    """Levelwise isomorphism of the underlying symmetric-group sets."""
    if set(X.levels) != set(Y.levels):
        return False
    return all(iso_equal(X.levels[m], Y.levels[m]) for m in X.levels)


def unit_mset(degree_bound=DEFAULT_DEGREE_BOUND):
    return CanonicalTameMSet(
        {0: trivial_sigma_set(0, ["*"], degree_bound)}, degree_bound
    )


def semifree_mset(A: SigmaSet, degree_bound=DEFAULT_DEGREE_BOUND):
    """The tame action freely built on one symmetric-group set."""
    return CanonicalTameMSet({A.m: A}, degree_bound)


def injection_mset(m, degree_bound=DEFAULT_DEGREE_BOUND):
    """The action on injections {1..m} -> omega by postcomposition."""
    from .sigma import regular_sigma_set

    return semifree_mset(regular_sigma_set(m, degree_bound), degree_bound)


def injection_element(X: CanonicalTameMSet, values) -> MElement:
    """The element of injection_mset(m) given by an injective tuple."""
    values = tuple(values)
    m = len(values)
    return X.canonical(m, values, tuple(range(1, m + 1)))


def disjoint_union(X: CanonicalTameMSet, Y: CanonicalTameMSet):
    """The coproduct: levelwise disjoint union with tagged points."""
    levels = {}
    for m in set(X.levels) | set(Y.levels):
        parts = []
        for tag, Z in ((0, X), (1, Y)):
            ss = Z.levels.get(m)
            if ss is not None:
                parts.append((tag, ss))
        points = [(tag, p) for tag, ss in parts for p in ss.points]
        tables = []
        for i in range(1, m):
            t = {}
            for tag, ss in parts:
                for p in ss.points:
                    t[(tag, p)] = (tag, ss.transpositions[i - 1][p])
            tables.append(t)
        levels[m] = SigmaSet(m, points, tables, X.degree_bound)
    return CanonicalTameMSet(levels, X.degree_bound)


def box(X: CanonicalTameMSet, Y: CanonicalTameMSet, degree_bound=None,
        level_cap=None):
    """The box product in canonical form: level k is the disjoint union
    over m+n=k of the induced product of the factor levels.  With a
    level cap, higher levels are omitted instead of raising."""
    bound = degree_bound or X.degree_bound
    levels = {}
    for m, A in X.levels.items():
        for n, B in Y.levels.items():
            k = m + n
            if level_cap is not None and k > level_cap:
                continue
            if k > bound:
                raise DegreeTooLarge(
                    f"box level {k} beyond degree bound {bound}"
                )
            ind = induce(A, B, bound)
            tag = (m, n)
            pts = [(tag, p) for p in ind.points]
            tabs = [
                {(tag, p): (tag, q) for p, q in t.items()}
                for t in ind.transpositions
            ]
            if k in levels:
                old = levels[k]
                pts = old.points + pts
                tabs = [
                    {**old.transpositions[i], **tabs[i]} for i in range(k - 1)
                ]
            levels[k] = SigmaSet(k, pts, tabs, bound)
    return CanonicalTameMSet(levels, bound)


def box_pair(x: MElement, y: MElement) -> MElement:
    """The element of the box product carried by a disjointly
    supported pair."""
    sx, sy = set(x.image), set(y.image)
    if sx & sy:
        raise OverlappingSupports(f"supports {sx} and {sy} meet")
    joint = tuple(sorted(sx | sy))
    positions = frozenset(j + 1 for j, v in enumerate(joint) if v in sx)
    tag = (x.level, y.level)
    return MElement(len(joint), joint, (tag, (positions, x.point, y.point)))


def box_split(z: MElement):
    """The two projections of a box-product element."""
    (m, n), (positions, p, q) = z.point
    xs = tuple(z.image[j - 1] for j in sorted(positions))
    ys = tuple(
        z.image[j - 1] for j in range(1, z.level + 1) if j not in positions
    )
    return MElement(m, xs, p), MElement(n, ys, q)


def shift_apart(X: CanonicalTameMSet, x: MElement, y: MElement):
    """Move y off the support of x by the order embedding that avoids
    it; the result is a disjointly supported pair."""
    f = order_embed_avoiding(support(x))
    return x, X.act(f, y)


def injection_split_iso(m, n, N):
    """The restriction map from injections on {1..m+n} to pairs of
    injections on {1..m} and {1..n}, tabulated inside window N.

    Returns (forward map, bijective flag): the map restricts to a
    bijection onto the disjointly supported pairs.
    """
    k = m + n
    forward = {t: (t[:m], t[m:]) for t in _all_injections(k, N)}
    pairs = set(forward.values())
    disjoint = set()
    for a in _all_injections(m, N):
        for b in _all_injections(n, N):
            if not set(a) & set(b):
                disjoint.add((a, b))
    bijective = len(pairs) == len(forward) and pairs == disjoint
    return forward, bijective


def _all_injections(m, N):
    from itertools import permutations as _perms

    out = []
    for values in combinations(range(1, N + 1), m):
        out.extend(_perms(values))
    return out


def decompose_table(table, action, window, initial_support=None,
                    degree_bound=DEFAULT_DEGREE_BOUND, table_window=None):
    """Recover the canonical form of a finite action table.

    `table` must list, once each, the elements supported inside
    {1..table_window} of a tame action whose maximal support size s
    satisfies 2*s <= window; `action` evaluates partial injections on
    elements, and may reach values up to `window`.  Supports are
    computed with single test injections: an element known supported on
    S is supported on S minus {j} exactly when the map fixing S minus
    {j} and moving j outside S fixes the element.
    """
    table = list(table)
    if table_window is None:
        table_window = window
    if initial_support is None:
        initial_support = lambda e: set(e.image)
    spare_cache = {}

    def support_of(e):
        S = sorted(set(initial_support(e)))
        if 2 * len(S) > window:
            raise WindowTooSmall(
                f"support bound {len(S)} needs window >= {2 * len(S)}"
            )
        if any(v > window for v in S):
            raise WindowTooSmall("initial support exceeds the window")
        keep = []
        for j in S:
            key = (tuple(S), j)
            f = spare_cache.get(key)
            if f is None:
                spare = min(v for v in range(1, window + 1) if v not in set(S))
                mapping = {v: v for v in S if v != j}
                mapping[j] = spare
                f = PartialInjection(mapping)
                spare_cache[key] = f
            if action(f, e) != e:
                keep.append(j)
        supp = set(keep)
        # consistency: fixing the support and moving the rest out must
        # leave the element alone
        spares = iter(v for v in range(1, window + 1) if v not in set(S))
        mapping = {v: v for v in supp}
        for v in S:
            if v not in supp:
                mapping[v] = next(spares)
        if action(PartialInjection(mapping), e) != e:
            raise NotTame(f"support tests inconsistent for {e!r}")
        return supp

    supports = {}
    for e in table:
        supports[e] = support_of(e)

    levels = {}
    table_set = set(table)
    for k in sorted({len(s) for s in supports.values()}):
        segment = set(range(1, k + 1))
        pts = [e for e in table if supports[e] == segment]
        if not pts:
            continue
        if k > degree_bound:
            raise DegreeTooLarge(f"level {k} beyond degree bound")
        tabs = []
        for i in range(1, k):
            f = PartialInjection(
                {v: v for v in segment if v not in (i, i + 1)}
                | {i: i + 1, i + 1: i}
            )
            t = {}
            for e in pts:
                img = action(f, e)
                if img not in table_set:
                    raise NotTame("table not closed under the level action")
                t[e] = img
            tabs.append(t)
        levels[k] = SigmaSet(k, pts, tabs, degree_bound)

    out = CanonicalTameMSet(levels, degree_bound)
    if out.count_up_to(table_window) != len(table):
        raise NotTame(
            "table size does not match the reconstructed canonical form"
        )
    return out


class MSetMorphism:
    """An equivariant map, stored on orbit representatives only."""

    def __init__(self, source: CanonicalTameMSet, target: CanonicalTameMSet,
                 assignment):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        for m, ss in source.levels.items():
            for rep, _ in ss.orbits():
                key = (m, rep)
                if key not in self.assignment:
                    raise InvalidMorphism(f"no value for representative {key}")
                val = self.assignment[key]
                if not target.has_element(val):
                    raise InvalidMorphism(f"value {val!r} not in the target")
                if not set(val.image) <= set(range(1, m + 1)):
                    raise InvalidMorphism(
                        f"value for {key} not supported inside 1..{m}"
                    )
                for sigma in ss.stabilizer(rep):
                    f = PartialInjection(dict(enumerate(sigma, start=1)))
                    if target.act(f, val) != val:
                        raise InvalidMorphism(
                            f"stabilizer of {key} does not fix the value"
                        )
        self._transversals = {
            m: ss.orbit_transversal() for m, ss in source.levels.items()
        }

    def apply(self, x: MElement) -> MElement:
        ss = self.source.levels[x.level]
        sigma = self._transversals[x.level][x.point]
        rep = ss.orbit_root(x.point)
        placed = PartialInjection(
            {k: x.image[sigma[k - 1] - 1] for k in range(1, x.level + 1)}
        )
        return self.target.act(placed, self.assignment[(x.level, rep)])


def coequalize(u: MSetMorphism, v: MSetMorphism, window,
               degree_bound=DEFAULT_DEGREE_BOUND):
    """Identify u(x) with v(x) and return the canonical form of the
    quotient.  The relation is already closed under the window action
    because u and v are equivariant and the source table is closed."""
    if u.source is not v.source and u.source.levels.keys() != v.source.levels.keys():
        raise InvalidMorphism("parallel pair must share a source")
    if u.target is not v.target and u.target.levels.keys() != v.target.levels.keys():
        raise InvalidMorphism("parallel pair must share a target")
    target = u.target
    if window < 2 * target.max_level:
        raise WindowTooSmall(
            f"window {window} below twice the maximal support size"
        )
    table = target.elements_up_to(window)
    parent = {e: e for e in table}

    def find(e):
        root = e
        while parent[root] != root:
            root = parent[root]
        while parent[e] != root:
            parent[e], e = root, parent[e]
        return root

    for x in u.source.elements_up_to(window):
        a, b = find(u.apply(x)), find(v.apply(x))
        if a != b:
            parent[max(a, b, key=point_key)] = min(a, b, key=point_key)

    classes = sorted({find(e) for e in table}, key=point_key)

    def class_action(f, root):
        return find(target.act(f, root))

    return decompose_table(
        classes,
        class_action,
        window,
        initial_support=lambda e: set(e.image),
        degree_bound=degree_bound,
    )


def orbit_product_bijection(X: CanonicalTameMSet, Y: CanonicalTameMSet,
                            XY: CanonicalTameMSet = None):
    """The bijection from orbits of a box product onto pairs of factor
    orbits; returns (mapping, bijective flag)."""
    XY = XY if XY is not None else box(X, Y)
    mapping = {}
    for k, rep in XY.orbit_set():
        (m, n), (positions, p, q) = rep
        zroot = X.levels[m].orbit_root(p)
        wroot = Y.levels[n].orbit_root(q)
        mapping[(k, rep)] = ((m, zroot), (n, wroot))
    targets = set(mapping.values())
    product = {
        (a, b) for a in X.orbit_set() for b in Y.orbit_set()
    }
    bijective = len(targets) == len(mapping) and targets == product
    return mapping, bijective
