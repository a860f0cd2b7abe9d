import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tamebox.errors import (
    ArityMismatch,
    DomainMismatch,
    IndexOutOfRange,
    NotCovering,
    NotInjective,
)
from tamebox.injections import (
    OperadElement,
    PartialInjection,
    Piece,
    QuasiAffineInjection,
    compose_any,
    interleave,
    order_embed_avoiding,
)


def naive_order_embed_avoiding(avoid, upto):
    """Direct list of the first `upto` values of the order embedding."""
    out = []
    v = 0
    for _ in range(upto):
        v += 1
        while v in avoid:
            v += 1
        out.append(v)
    return out


def qa_values(f, upto):
    return [f(i) for i in range(1, upto + 1)]


class TestPartialInjection:
    def test_pointwise_composition(self):
        outer = PartialInjection({1: 4, 2: 1})
        inner = PartialInjection({1: 2, 3: 1})
        assert outer.compose(inner) == PartialInjection({1: 1, 3: 4})

    def test_identity_is_neutral(self):
        f = PartialInjection({2: 7, 5: 1})
        ident = PartialInjection.identity_on(f.image())
        assert ident.compose(f) == f
        assert f.compose(PartialInjection.identity_on(f.domain())) == f

    def test_composition_needs_covered_image(self):
        with pytest.raises(DomainMismatch):
            PartialInjection({1: 2}).compose(PartialInjection({1: 3}))

    def test_identity_on(self):
        assert PartialInjection.identity_on({1, 2, 3}).mapping == {1: 1, 2: 2, 3: 3}
        assert PartialInjection.identity_on(set()).mapping == {}

    def test_rejects_collisions(self):
        with pytest.raises(NotInjective):
            PartialInjection({1: 3, 2: 3})

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            PartialInjection({0: 1})
        with pytest.raises(ValueError):
            PartialInjection({1: 0})

    def test_associativity_random(self):
        rng = random.Random(11)
        for _ in range(50):
            vals = rng.sample(range(1, 30), 12)
            f = PartialInjection(dict(zip(vals[0:3], vals[3:6])))
            g = PartialInjection(dict(zip(vals[3:6], vals[6:9])))
            h = PartialInjection(dict(zip(vals[6:9], vals[9:12])))
            assert h.compose(g.compose(f)) == h.compose(g).compose(f)

    def test_complete_extends_and_avoids(self):
        f = PartialInjection({1: 4, 2: 1})
        c = f.complete()
        assert c(1) == 4 and c(2) == 1
        taken = set()
        for i in range(1, 50):
            v = c(i)
            assert v not in taken
            taken.add(v)
        offs = [c(i) for i in range(3, 50)]
        assert offs == sorted(offs)
        assert not set(offs) & {4, 1}


class TestOrderEmbedAvoiding:
    def test_empty_is_identity(self):
        assert order_embed_avoiding(set()) == QuasiAffineInjection.identity()

    def test_single_is_shift(self):
        assert order_embed_avoiding({1}) == QuasiAffineInjection.affine(1, 1)

    def test_two_three_pieces(self):
        f = order_embed_avoiding({2, 3})
        assert f.pieces == (
            Piece(1, 1, 1, 0, 1, 0),
            Piece(2, None, 1, 0, 1, 2),
        )

    def test_against_naive_enumeration(self):
        rng = random.Random(5)
        for _ in range(25):
            avoid = set(rng.sample(range(1, 15), rng.randint(0, 6)))
            f = order_embed_avoiding(avoid)
            assert qa_values(f, 20) == naive_order_embed_avoiding(avoid, 20)


def random_qa(rng):
    """A random quasi-affine injection, built by composing simple ones."""
    atoms = [
        QuasiAffineInjection.identity(),
        QuasiAffineInjection.affine(2, 0),
        QuasiAffineInjection.affine(2, -1),
        QuasiAffineInjection.affine(3, 1),
        QuasiAffineInjection.affine(1, rng.randint(0, 5)),
        order_embed_avoiding(set(rng.sample(range(1, 10), rng.randint(0, 4)))),
        interleave().slot(rng.randint(1, 2)),
    ]
    f = atoms[rng.randrange(len(atoms))]
    for _ in range(rng.randint(0, 2)):
        f = f.compose(atoms[rng.randrange(len(atoms))])
    return f


class TestQuasiAffine:
    def test_affine_composition(self):
        double = QuasiAffineInjection.affine(2, 0)
        shift = QuasiAffineInjection.affine(1, 1)
        assert double.compose(shift) == QuasiAffineInjection.affine(2, 2)
        assert len(double.compose(shift).pieces) == 1

    def test_trivial_patch_normalizes_away(self):
        d_plus = QuasiAffineInjection.affine(2, 0)
        patched = QuasiAffineInjection(
            [Piece(1, None, 2, 0, 2, 0), Piece(1, None, 2, 1, 2, 0)]
        )
        assert patched == d_plus
        assert len(patched.pieces) == 1

    def test_involution_composes_to_identity(self):
        # swap odds and evens: a genuine quasi-affine involution
        swap = QuasiAffineInjection(
            [Piece(1, None, 2, 1, 1, 1), Piece(1, None, 2, 0, 1, -1)]
        )
        assert swap.compose(swap) == QuasiAffineInjection.identity()
        for i in range(1, 1001):
            assert swap(swap(i)) == i

    def test_fractional_slope_piece(self):
        # (i+1)/2 on 1 mod 4 fills the odds; the rest spreads over the evens
        f = QuasiAffineInjection(
            [
                Piece(1, None, 4, 1, "1/2", "1/2"),
                Piece(1, None, 4, 3, 1, 1),
                Piece(1, None, 2, 0, 2, -2),
            ]
        )
        assert [f(i) for i in (1, 5, 9, 13)] == [1, 3, 5, 7]
        assert [f(i) for i in range(1, 9)] == [1, 2, 4, 6, 3, 10, 8, 14]
        # composing onto the fractional piece gives an exactly affine map
        into_piece = QuasiAffineInjection.affine(4, -3)
        assert f.compose(into_piece) == QuasiAffineInjection.affine(2, -1)

    def test_rejects_gap(self):
        with pytest.raises(NotCovering):
            QuasiAffineInjection([Piece(2, None, 1, 0, 1, 0)])

    def test_rejects_overlap(self):
        with pytest.raises(NotCovering):
            QuasiAffineInjection(
                [Piece(1, None, 1, 0, 1, 0), Piece(5, None, 2, 0, 1, 100)]
            )

    def test_rejects_image_collision(self):
        with pytest.raises(NotInjective):
            QuasiAffineInjection(
                [Piece(1, 1, 1, 0, 1, 4), Piece(2, None, 1, 0, 1, 3)]
            )

    def test_rejects_values_below_one(self):
        with pytest.raises(NotInjective):
            QuasiAffineInjection([Piece(1, None, 1, 0, 1, -1)])

    def test_equality_matches_windowed_evaluation(self):
        rng = random.Random(17)
        for _ in range(200):
            f = random_qa(rng)
            g = random_qa(rng)
            bound = max(p.lo for p in f.pieces + g.pieces)
            mods = 1
            for p in f.pieces + g.pieces:
                mods = mods * p.mod // __import__("math").gcd(mods, p.mod)
            window = 10 * max(bound, 1) * mods
            window = min(window, 4000)
            same = qa_values(f, window) == qa_values(g, window)
            assert (f == g) == same

    def test_compose_agrees_pointwise(self):
        rng = random.Random(23)
        for _ in range(100):
            f = random_qa(rng)
            g = random_qa(rng)
            h = f.compose(g)
            for i in range(1, 200):
                assert h(i) == f(g(i))

    @given(st.integers(1, 6), st.integers(0, 9), st.integers(1, 6), st.integers(0, 9))
    def test_affine_compose_law(self, a1, b1, a2, b2):
        f = QuasiAffineInjection.affine(a1, b1)
        g = QuasiAffineInjection.affine(a2, b2)
        assert f.compose(g) == QuasiAffineInjection.affine(a1 * a2, a1 * b2 + b1)

    def test_image_contains(self):
        f = QuasiAffineInjection.affine(2, 0)
        assert f.image_contains(8)
        assert not f.image_contains(7)


class TestOperadElement:
    def test_interleave_slots(self):
        s = interleave()
        assert [s.slot(1)(i) for i in range(1, 5)] == [1, 3, 5, 7]
        assert [s.slot(2)(i) for i in range(1, 5)] == [2, 4, 6, 8]

    def test_slot_range(self):
        with pytest.raises(IndexOutOfRange):
            interleave().slot(3)

    def test_arity_one_slot_is_element(self):
        f = QuasiAffineInjection.affine(2, 0)
        e = OperadElement([f])
        assert e.slot(1) == f

    def test_rejects_overlapping_slots(self):
        with pytest.raises(NotInjective):
            OperadElement(
                [QuasiAffineInjection.affine(2, 0), QuasiAffineInjection.affine(4, 0)]
            )
        with pytest.raises(NotInjective):
            OperadElement([PartialInjection({1: 5}), PartialInjection({2: 5})])

    def test_unit_laws(self):
        s = interleave()
        ident = OperadElement([QuasiAffineInjection.identity()])
        assert s.compose([ident, ident]) == s
        assert ident.compose([s]) == s

    def test_nullary_composition_drops_block(self):
        s = interleave()
        eps = OperadElement([])
        ident = OperadElement([QuasiAffineInjection.identity()])
        e = s.compose([eps, ident])
        assert e.arity == 1
        for j in range(1, 20):
            assert e.slot(1)(j) == s.slot(2)(j)

    def test_composition_formula_blockwise(self):
        rng = random.Random(31)
        for _ in range(20):
            phi = OperadElement(
                [compose_any(interleave().slot(1), random_qa(rng)),
                 compose_any(interleave().slot(2), random_qa(rng))]
            )
            psi1 = interleave()
            psi2 = OperadElement([random_qa(rng)])
            out = phi.compose([psi1, psi2])
            assert out.arity == 3
            for j in range(1, 30):
                assert out.slot(1)(j) == phi.slot(1)(psi1.slot(1)(j))
                assert out.slot(2)(j) == phi.slot(1)(psi1.slot(2)(j))
                assert out.slot(3)(j) == phi.slot(2)(psi2.slot(1)(j))

    def test_associativity_random(self):
        rng = random.Random(41)
        ident = OperadElement([QuasiAffineInjection.identity()])
        for _ in range(20):
            phi = interleave()
            psi = OperadElement(
                [compose_any(interleave().slot(1), random_qa(rng)),
                 compose_any(interleave().slot(2), random_qa(rng))]
            )
            chi = OperadElement([random_qa(rng)])
            lhs = phi.compose([psi, ident]).compose([chi, ident, ident])
            rhs = phi.compose([psi.compose([chi, ident]), ident])
            assert lhs == rhs

    def test_symmetric_equivariance(self):
        # (phi sigma)(k, i) = phi(sigma(k), i)
        rng = random.Random(43)
        for _ in range(20):
            phi = OperadElement(
                [compose_any(interleave().slot(1), random_qa(rng)),
                 compose_any(interleave().slot(2), random_qa(rng))]
            )
            swapped = phi.permute((2, 1))
            for j in range(1, 30):
                assert swapped.slot(1)(j) == phi.slot(2)(j)
                assert swapped.slot(2)(j) == phi.slot(1)(j)
            assert swapped.permute((2, 1)) == phi

    def test_block_equivariance_of_composition(self):
        # gamma(phi sigma; parts permuted) = gamma(phi; parts) block-permuted
        f = QuasiAffineInjection.affine(4, 0)
        g = QuasiAffineInjection.affine(4, -2)
        h = QuasiAffineInjection.affine(2, -1)
        phi = interleave()
        p1 = OperadElement([f, g])
        p2 = OperadElement([h])
        lhs = phi.permute((2, 1)).compose([p2, p1])
        rhs = phi.compose([p1, p2])
        # block permutation for sigma=(2 1) with arities (2,1): (3,1,2)
        assert lhs.slots == (rhs.slots[2], rhs.slots[0], rhs.slots[1])

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            interleave().compose([interleave()])
