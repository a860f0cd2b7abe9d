"""Finite symmetric-group sets presented by adjacent-transposition tables.

A SigmaSet of degree m is a finite set of points together with one
bijection per adjacent transposition s_1 .. s_{m-1}.  The Coxeter
relations are validated on construction, so the action of an arbitrary
permutation is well defined through any decomposition into adjacent
transpositions.

Isomorphism of degree-m sets is decided by comparing multisets of
stabilizer conjugacy labels, computed by brute force inside a
configurable degree bound.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from math import factorial

from .errors import DegreeTooLarge, ValidationError

DEFAULT_DEGREE_BOUND = 7


def point_key(p):
    """A deterministic total order on point identifiers."""
    return (type(p).__name__, repr(p))


@lru_cache(maxsize=None)
def perm_word(sigma):
    """Adjacent-transposition word for a permutation in one-line
    notation; applying s_{w[0]} after s_{w[1]} after ... gives sigma."""
    p = list(sigma)
    word = []
    changed = True
    while changed:
        changed = False
        for i in range(len(p) - 1):
            if p[i] > p[i + 1]:
                p[i], p[i + 1] = p[i + 1], p[i]
                word.append(i + 1)
                changed = True
    word.reverse()
    return tuple(word)


def perm_compose(s, t):
    """(s t)(x) = s(t(x)) in one-line notation."""
    return tuple(s[t[x] - 1] for x in range(len(t)))


def perm_inverse(s):
    inv = [0] * len(s)
    for x, v in enumerate(s, start=1):
        inv[v - 1] = x
    return tuple(inv)


def identity_perm(m):
    return tuple(range(1, m + 1))


def transposition_perm(m, i):
    p = list(range(1, m + 1))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def all_perms(m):
    return [tuple(p) for p in permutations(range(1, m + 1))]


def cycle_type(sigma):
    seen = set()
    sizes = []
    for x in range(1, len(sigma) + 1):
        if x in seen:
            continue
        n = 0
        y = x
        while y not in seen:
            seen.add(y)
            y = sigma[y - 1]
            n += 1
        sizes.append(n)
    return tuple(sorted(sizes))


class SigmaSet:
    """A validated finite set with an action of the symmetric group."""

    def __init__(self, m, points, transpositions, degree_bound=DEFAULT_DEGREE_BOUND):
        if m > degree_bound:
            raise DegreeTooLarge(f"degree {m} beyond bound {degree_bound}")
        points = list(points)
        pset = set(points)
        if len(pset) != len(points):
            raise ValidationError("distinct points", m)
        transpositions = [dict(t) for t in transpositions]
        if len(transpositions) != max(m - 1, 0):
            raise ValidationError("one table per adjacent transposition", m)
        for i, t in enumerate(transpositions, start=1):
            if set(t) != pset or set(t.values()) != pset:
                raise ValidationError("bijection", f"s_{i}")
            for p in points:
                if t[t[p]] != p:
                    raise ValidationError("involution", f"s_{i}")
        for i in range(1, m - 1):
            for j in range(i + 2, m):
                si, sj = transpositions[i - 1], transpositions[j - 1]
                for p in points:
                    if si[sj[p]] != sj[si[p]]:
                        raise ValidationError("commutation", f"s_{i} s_{j}")
        for i in range(1, m - 1):
            si, sj = transpositions[i - 1], transpositions[i]
            for p in points:
                q = p
                for _ in range(3):
                    q = si[sj[q]]
                if q != p:
                    raise ValidationError("braid", f"s_{i} s_{i + 1}")
        self.m = m
        self.points = points
        self.transpositions = transpositions
        self.degree_bound = degree_bound
        self._orbit_cache = None
        self._perm_maps = {}

    def __len__(self):
        return len(self.points)

    def act_word(self, word, p):
        # the word lists the outermost transposition first
        for i in reversed(word):
            p = self.transpositions[i - 1][p]
        return p

    def act_perm(self, sigma, p):
        """Action of a permutation given in one-line notation."""
        table = self._perm_maps.get(sigma)
        if table is not None:
            return table[p]
        word = perm_word(sigma)
        q = p
        for i in reversed(word):
            q = self.transpositions[i - 1][q]
        return q

    def perm_map(self, sigma):
        """The full point map of a permutation, memoized."""
        table = self._perm_maps.get(sigma)
        if table is None:
            table = {p: self.act_perm(sigma, p) for p in self.points}
            self._perm_maps[sigma] = table
        return table

    def orbits(self):
        """Partition into orbits, with the least point of each orbit as
        its representative.  Returns a list of (rep, members) pairs."""
        if self._orbit_cache is not None:
            return self._orbit_cache
        parent = {p: p for p in self.points}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in self.transpositions:
            for p, q in t.items():
                parent[find(p)] = find(q)
        groups = {}
        for p in self.points:
            groups.setdefault(find(p), []).append(p)
        out = []
        for members in groups.values():
            members.sort(key=point_key)
            out.append((members[0], members))
        out.sort(key=lambda rm: point_key(rm[0]))
        self._orbit_cache = out
        return out

    def orbit_transversal(self):
        """For every point, a permutation carrying its orbit
        representative onto it."""
        out = {}
        for rep, members in self.orbits():
            out[rep] = identity_perm(self.m)
            frontier = [rep]
            while frontier:
                nxt = []
                for p in frontier:
                    for i, t in enumerate(self.transpositions, start=1):
                        q = t[p]
                        if q not in out:
                            out[q] = perm_compose(
                                transposition_perm(self.m, i), out[p]
                            )
                            nxt.append(q)
                frontier = nxt
        return out

    def orbit_root(self, p):
        if not hasattr(self, "_roots"):
            self._roots = {
                q: rep for rep, members in self.orbits() for q in members
            }
        return self._roots[p]

    def stabilizer(self, p):
        return frozenset(
            sigma for sigma in all_perms(self.m) if self.act_perm(sigma, p) == p
        )

    def iso_type(self):
        """Multiset of stabilizer conjugacy labels, one per orbit.
        Two SigmaSets of equal degree are isomorphic exactly when these
        multisets coincide."""
        labels = []
        for rep, _ in self.orbits():
            labels.append(subgroup_conjugacy_label(self.m, self.stabilizer(rep)))
        return tuple(sorted(labels))


@lru_cache(maxsize=None)
def subgroup_conjugacy_label(m, subgroup):
    """A string determined exactly by the conjugacy class of the
    subgroup inside the degree-m symmetric group."""
    order = len(subgroup)
    if order == 1:
        return f"S{m}:trivial"
    if order == factorial(m):
        return f"S{m}:full"
    if order == factorial(m) // 2 and all(
        _perm_sign(s) == 1 for s in subgroup
    ):
        return f"S{m}:alternating"
    types = sorted(cycle_type(s) for s in subgroup)
    best = None
    for g in all_perms(m):
        ginv = perm_inverse(g)
        conj = tuple(sorted(perm_compose(perm_compose(g, h), ginv) for h in subgroup))
        if best is None or conj < best:
            best = conj
    return f"S{m}:o{order}:t{types}:c{best}"


def _perm_sign(sigma):
    sign = 1
    seen = set()
    for x in range(1, len(sigma) + 1):
        if x in seen:
            continue
        n = 0
        y = x
        while y not in seen:
            seen.add(y)
            y = sigma[y - 1]
            n += 1
        if n % 2 == 0:
            sign = -sign
    return sign


def sigma_iso_type(ss: SigmaSet):
    return ss.iso_type()


def iso_equal(a: SigmaSet, b: SigmaSet):
    return a.m == b.m and a.iso_type() == b.iso_type()


def trivial_sigma_set(m, points, degree_bound=DEFAULT_DEGREE_BOUND):
    return SigmaSet(
        m,
        points,
        [{p: p for p in points} for _ in range(max(m - 1, 0))],
        degree_bound=degree_bound,
    )


def regular_sigma_set(m, degree_bound=DEFAULT_DEGREE_BOUND):
    """The symmetric group acting on itself by left multiplication."""
    points = all_perms(m)
    tables = []
    for i in range(1, m):
        s = transposition_perm(m, i)
        tables.append({p: perm_compose(s, p) for p in points})
    return SigmaSet(m, points, tables, degree_bound=degree_bound)


def induce(Z: SigmaSet, W: SigmaSet, degree_bound=DEFAULT_DEGREE_BOUND):
    """Induct a degree-m set and a degree-n set up to degree m+n.

    Points are triples (S, z, w) with S an m-subset of {1..m+n}; an
    adjacent transposition either swaps membership across the boundary
    of S or acts through the rank-induced transposition on one factor.
    """
    m, n = Z.m, W.m
    k = m + n
    if k > degree_bound:
        raise DegreeTooLarge(f"degree {k} beyond bound {degree_bound}")
    points = [
        (frozenset(S), z, w)
        for S in combinations(range(1, k + 1), m)
        for z in Z.points
        for w in W.points
    ]
    tables = []
    for i in range(1, k):
        t = {}
        for (S, z, w) in points:
            if i in S and i + 1 in S:
                rank = sorted(S).index(i) + 1
                t[(S, z, w)] = (S, Z.transpositions[rank - 1][z], w)
            elif i not in S and i + 1 not in S:
                comp = sorted(set(range(1, k + 1)) - S)
                rank = comp.index(i) + 1
                t[(S, z, w)] = (S, z, W.transpositions[rank - 1][w])
            else:
                T = (S - {i}) | {i + 1} if i in S else (S - {i + 1}) | {i}
                t[(S, z, w)] = (T, z, w)
        tables.append(t)
    return SigmaSet(k, points, tables, degree_bound=degree_bound)
