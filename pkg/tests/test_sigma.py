import random
from itertools import permutations, product
from math import comb

import pytest

from tamebox.errors import DegreeTooLarge, ValidationError
from tamebox.sigma import (
    SigmaSet,
    all_perms,
    induce,
    iso_equal,
    perm_compose,
    perm_inverse,
    perm_word,
    regular_sigma_set,
    transposition_perm,
    trivial_sigma_set,
)


def perm_from_word(m, word):
    p = tuple(range(1, m + 1))
    for i in reversed(word):
        p = perm_compose(transposition_perm(m, i), p)
    return p


def tuple_action_set(m, width):
    """The symmetric group permuting coordinate positions of tuples."""
    points = list(product(range(width), repeat=m))

    def act(i, t):
        t = list(t)
        t[i - 1], t[i] = t[i], t[i - 1]
        return tuple(t)

    tables = [{t: act(i, t) for t in points} for i in range(1, m)]
    return SigmaSet(m, points, tables)


def equivariant_bijection_exists(a, b):
    """Backtracking search for an equivariant bijection; the slow
    oracle that iso_type comparison must reproduce."""
    if a.m != b.m or len(a.points) != len(b.points):
        return False
    gens = list(range(1, a.m))
    bp = list(b.points)

    def extend(assign, todo):
        if not todo:
            return True
        p = todo[0]
        for q in bp:
            if q in assign.values():
                continue
            trial = dict(assign)
            trial[p] = q
            stack = [p]
            ok = True
            while stack and ok:
                x = stack.pop()
                for i in gens:
                    y = a.transpositions[i - 1][x]
                    fy = b.transpositions[i - 1][trial[x]]
                    if y in trial:
                        if trial[y] != fy:
                            ok = False
                            break
                    elif fy in trial.values():
                        ok = False
                        break
                    else:
                        trial[y] = fy
                        stack.append(y)
            if ok and extend(trial, [t for t in todo[1:] if t not in trial]):
                assign.clear()
                assign.update(trial)
                return True
        return False

    return extend({}, list(a.points))


class TestPermWords:
    def test_words_reproduce_permutations(self):
        for m in range(1, 6):
            for sigma in permutations(range(1, m + 1)):
                assert perm_from_word(m, perm_word(sigma)) == sigma

    def test_inverse(self):
        for sigma in all_perms(4):
            assert perm_compose(sigma, perm_inverse(sigma)) == (1, 2, 3, 4)


class TestValidation:
    def test_rejects_non_involution(self):
        with pytest.raises(ValidationError):
            SigmaSet(2, ["a", "b", "c"], [{"a": "b", "b": "c", "c": "a"}])

    def test_rejects_braid_violation(self):
        # two commuting swaps on four points cannot satisfy the braid
        # relation for adjacent generators
        pts = [0, 1, 2, 3]
        s1 = {0: 1, 1: 0, 2: 3, 3: 2}
        s2 = {0: 2, 2: 0, 1: 3, 3: 1}
        with pytest.raises(ValidationError):
            SigmaSet(3, pts, [s1, s2])

    def test_degree_bound(self):
        with pytest.raises(DegreeTooLarge):
            trivial_sigma_set(9, ["x"])


class TestOrbits:
    def test_trivial_action_two_orbits(self):
        ss = trivial_sigma_set(2, ["a", "b"])
        assert len(ss.orbits()) == 2

    def test_regular_sigma2_one_orbit(self):
        ss = regular_sigma_set(2)
        assert len(ss.orbits()) == 1

    def test_ordered_pairs_transitive(self):
        # ordered pairs of distinct elements of {1,2,3}: brute force
        # over all 6 group elements confirms a single orbit
        pts = [t for t in product(range(1, 4), repeat=2) if t[0] != t[1]]
        full = tuple_action_set(2, 0)  # placeholder, rebuilt below
        points = pts

        def act(i, t):
            s = transposition_perm(3, i)
            return (s[t[0] - 1], s[t[1] - 1])

        tables = [{t: act(i, t) for t in points} for i in range(1, 3)]
        ss = SigmaSet(3, points, tables)
        assert len(ss.orbits()) == 1
        reachable = set()
        for sigma in all_perms(3):
            reachable.add((sigma[0], sigma[1]))
        assert reachable == set(
            (sigma[pts[0][0] - 1], sigma[pts[0][1] - 1]) for sigma in all_perms(3)
        )
        assert len(ss.orbits()[0][1]) == 6

    def test_transversal_carries_rep(self):
        ss = tuple_action_set(3, 2)
        tr = ss.orbit_transversal()
        roots = {p: rep for rep, members in ss.orbits() for p in members}
        for p, sigma in tr.items():
            assert ss.act_perm(sigma, roots[p]) == p


class TestIsoType:
    def test_regular_orbit_trivial_stabilizer(self):
        assert regular_sigma_set(3).iso_type() == ("S3:trivial",)

    def test_fixed_point_full_stabilizer(self):
        assert trivial_sigma_set(3, ["x"]).iso_type() == ("S3:full",)

    def test_swap_vs_fixed_points_differ(self):
        swap = SigmaSet(2, ["a", "b"], [{"a": "b", "b": "a"}])
        fixed = trivial_sigma_set(2, ["a", "b"])
        assert swap.iso_type() != fixed.iso_type()

    def test_complete_invariant_random(self):
        rng = random.Random(7)
        pool = []
        for m in (2, 3):
            pool.append(regular_sigma_set(m) if m <= 3 else None)
            pool.append(trivial_sigma_set(m, ["a", "b"]))
            pool.append(tuple_action_set(m, 2))
            pool.append(tuple_action_set(m, 3))
        pool = [s for s in pool if s is not None]
        for _ in range(30):
            a = rng.choice(pool)
            b = rng.choice(pool)
            if a.m != b.m:
                continue
            assert iso_equal(a, b) == equivariant_bijection_exists(a, b)


class TestInduce:
    def test_degree_zero_pair(self):
        z = trivial_sigma_set(0, ["z"])
        w = trivial_sigma_set(0, ["w"])
        out = induce(z, w)
        assert out.m == 0 and len(out) == 1

    def test_two_free_points_give_regular(self):
        z = trivial_sigma_set(1, ["z"])
        w = trivial_sigma_set(1, ["w"])
        out = induce(z, w)
        assert iso_equal(out, regular_sigma_set(2))

    def test_counting_identity(self):
        rng = random.Random(3)
        for _ in range(10):
            m = rng.randint(0, 2)
            n = rng.randint(0, 2)
            z = tuple_action_set(m, rng.randint(1, 3))
            w = tuple_action_set(n, rng.randint(1, 3))
            out = induce(z, w)
            assert len(out) == comb(m + n, m) * len(z) * len(w)

    def test_symmetric_up_to_iso(self):
        z = tuple_action_set(1, 3)
        w = regular_sigma_set(2)
        assert iso_equal(induce(z, w), induce(w, z))

    def test_associative_up_to_iso(self):
        a = trivial_sigma_set(1, ["a"])
        b = tuple_action_set(1, 2)
        c = trivial_sigma_set(0, ["c", "c2"])
        assert iso_equal(induce(induce(a, b), c), induce(a, induce(b, c)))

    def test_degree_bound(self):
        with pytest.raises(DegreeTooLarge):
            induce(regular_sigma_set(4), regular_sigma_set(4))
