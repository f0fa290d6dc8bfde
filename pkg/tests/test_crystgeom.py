import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latcol.crystgeom import (AffineMap, CrystGroup, EchelonAccumulator,
                              IntegerLattice, RankDeficientLattice,
                              affine_compose, affine_inverse, contains,
                              full_group, generator_images, group_fingerprint,
                              group_from_coset_table, group_from_generators,
                              hnf, hyperoctahedral_order, image_list,
                              is_subgroup, lattice_normalizer,
                              reduce_point_generators, signed_permutations,
                              validate_generator_images, word_to_affine)
from latcol.fpgroup import Word, low_index_subgroups, make_presentation

from oracles import determinant, residues_mod

W = Word.parse


def affine_maps(d):
    return st.builds(
        lambda ps, t: AffineMap(ps[0], ps[1], t),
        st.sampled_from(signed_permutations(d)),
        st.tuples(*[st.integers(-4, 4)] * d))


class TestAffineMaps:
    def test_identity_and_translation(self):
        e = AffineMap.identity(3)
        assert e.is_identity()
        t = AffineMap.translation((1, 0, -2))
        assert t.apply((5, 5, 5)) == (6, 5, 3)

    def test_rejects_bad_matrices(self):
        with pytest.raises(ValueError):
            AffineMap.from_linear([[1, 1], [0, 1]])
        with pytest.raises(ValueError):
            AffineMap((0, 0), (1, 1), (0, 0))

    @given(affine_maps(3), affine_maps(3))
    def test_compose_matches_pointwise(self, f, g):
        h = affine_compose(f, g)
        for v in [(0, 0, 0), (1, 2, 3), (-2, 5, -7)]:
            assert h.apply(v) == f.apply(g.apply(v))

    @given(affine_maps(3), affine_maps(3))
    def test_inverse_antihomomorphism(self, f, g):
        assert affine_inverse(affine_compose(f, g)) == \
            affine_compose(affine_inverse(g), affine_inverse(f))

    @given(affine_maps(4))
    def test_inverse_round_trip(self, f):
        assert affine_compose(f, affine_inverse(f)).is_identity()

    def test_identity_composition(self):
        g = AffineMap.from_linear([[0, 1], [1, 0]], [3, -1])
        assert affine_compose(AffineMap.identity(2), g) == g

    def test_d1_inversion_conjugates_translation(self):
        img = generator_images(1)
        bab = word_to_affine(W("bab"), img)
        assert bab == AffineMap.translation((-1,))

    def test_text_round_trip(self):
        g = AffineMap.from_linear([[0, -1, 0], [1, 0, 0], [0, 0, -1]], [1, 2, 3])
        assert AffineMap.from_text(g.to_text()) == g
        assert AffineMap.from_json(g.to_json()) == g


class TestGeneratorImages:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_images_validate(self, d):
        validate_generator_images(d)

    def test_quoted_entries(self):
        img2 = generator_images(2)
        assert img2["c"] == AffineMap((1, 0), (1, 1), (0, 0))
        img3 = generator_images(3)
        assert img3["b"].linear_rows() == ((-1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert img3["b"].trans == (1, 0, 0)
        img4 = generator_images(4)
        assert img4["f"].apply((1, 2, 3, 4)) == (1, 2, 4, 3)

    def test_word_cb_composite(self):
        m = word_to_affine(W("cb"), generator_images(2))
        assert m.apply((0, 0)) == (1, 0)
        assert m.apply((2, 5)) == (-4, 2)

    def test_relator_words_map_to_identity(self):
        for d in (1, 2, 3, 4):
            images = image_list(d)
            for r in make_presentation(d).relators:
                assert word_to_affine(r, images).is_identity()

    def test_unknown_generator(self):
        with pytest.raises(ValueError):
            word_to_affine(W("d"), generator_images(2))


unimodular_2x2 = st.sampled_from([
    ((1, 0), (0, 1)), ((1, 1), (0, 1)), ((1, 0), (1, 1)),
    ((0, 1), (-1, 0)), ((2, 1), (1, 1)), ((1, -1), (0, -1)),
])


class TestHNF:
    def test_identity(self):
        L = hnf([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert L.basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert L.index == 1

    def test_chessboard_d2(self):
        L = hnf([(2, 0), (0, 2), (1, 1)])
        assert L.basis == ((1, 1), (0, 2))
        assert L.index == 2

    def test_chessboard_even_d3(self):
        L = hnf([(1, 1, 0), (1, -1, 0), (0, 0, 1)])
        assert L.index == 2
        # membership oracle: residues of the span modulo 4 cover half the grid
        residues = residues_mod([(1, 1, 0), (1, -1, 0), (0, 0, 1)], 3, 4)
        assert len(residues) == 4 ** 3 // 2
        for r in residues:
            assert L.contains(r) or not L.contains(r)  # reduce() total
        members = [v for v in itertools.product(range(4), repeat=3) if L.contains(v)]
        assert sorted(members) == sorted(
            v for v in residues if all(0 <= x < 4 for x in v))

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientLattice):
            hnf([(1, 1), (2, 2)])
        with pytest.raises(RankDeficientLattice):
            hnf([], 2)

    @given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
                    min_size=2, max_size=4),
           unimodular_2x2)
    def test_unimodular_invariance(self, vectors, u):
        try:
            L = hnf(vectors, 2)
        except RankDeficientLattice:
            return
        rows = [tuple(v) for v in L.basis]
        transformed = [
            tuple(u[i][0] * rows[0][k] + u[i][1] * rows[1][k] for k in range(2))
            for i in range(2)]
        assert hnf(transformed, 2).basis == L.basis

    @given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5),
                              st.integers(-5, 5)), min_size=3, max_size=5))
    def test_index_is_determinant_and_reduce_idempotent(self, vectors):
        try:
            L = hnf(vectors, 3)
        except RankDeficientLattice:
            return
        assert L.index == abs(determinant([list(r) for r in L.basis]))
        for v in [(0, 0, 0), (5, -3, 2), (-7, 11, 4)]:
            r = L.reduce(v)
            assert L.reduce(r) == r
            assert all(0 <= r[i] < L.basis[i][i] for i in range(3))
            assert L.contains(tuple(a - b for a, b in zip(v, r)))

    def test_echelon_accumulator_gcd_path(self):
        acc = EchelonAccumulator(2)
        acc.add((4, 0))
        acc.add((6, 0))
        assert acc.contains((2, 0))
        assert not acc.contains((1, 0))
        acc.add((0, 3))
        assert acc.rank == 2
        assert acc.to_lattice().basis == ((2, 0), (0, 3))


class TestCrystGroups:
    def test_full_groups(self):
        for d in (1, 2, 3):
            g = full_group(d)
            assert g.lattice.index == 1
            assert g.point_order == hyperoctahedral_order(d)

    def test_translation_subgroup_d1(self):
        H = group_from_generators(1, [AffineMap.translation((3,)),
                                      AffineMap((0,), (-1,), (0,))])
        assert H.lattice.basis == ((3,),)
        assert H.point_order == 2

    def test_calcite_subgroup(self):
        a = AffineMap.from_linear([[0, 0, -1], [-1, 0, 0], [0, -1, 0]])
        m_xxz = AffineMap.from_linear([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        g2 = affine_compose(m_xxz, AffineMap.translation((0, 2, 0)))
        g3 = AffineMap.translation((2, 1, 1))
        H = group_from_generators(3, [a, g2, g3])
        assert H.lattice.index == 4
        assert H.lattice.basis == ((1, 0, 3), (0, 1, 3), (0, 0, 4))
        assert H.point_order == 12
        assert not contains(H, m_xxz)
        assert contains(H, g2)
        assert contains(H, AffineMap.identity(3))
        # membership of pure translations matches the lattice
        assert contains(H, AffineMap.translation((0, 0, 4)))
        assert not contains(H, AffineMap.translation((0, 0, 2)))

    def test_contains_d1(self):
        H = group_from_generators(1, [AffineMap.translation((3,)),
                                      AffineMap((0,), (-1,), (0,))])
        assert not contains(H, AffineMap.translation((1,)))
        assert contains(H, AffineMap.translation((3,)))

    def test_rank_deficient_rejected(self):
        with pytest.raises(RankDeficientLattice):
            group_from_generators(2, [AffineMap.translation((1, 0))])

    @given(st.integers(0, 10))
    def test_generator_products_contained(self, seed):
        g = full_group(2)
        gens = list(g.generators)
        m = AffineMap.identity(2)
        for i in range(3):
            m = affine_compose(m, gens[(seed + i) % len(gens)])
        assert contains(g, m)

    def test_group_equality_ignores_generating_set(self):
        t = AffineMap.translation
        neg = AffineMap((0,), (-1,), (0,))
        g1 = group_from_generators(1, [t((3,)), neg])
        g2 = group_from_generators(1, [t((-3,)), affine_compose(neg, t((3,)))])
        assert g1 == g2
        g3 = group_from_generators(1, [t((3,)), affine_compose(neg, t((1,)))])
        assert g1 != g3

    def test_group_from_coset_table_matches_words(self, d2_subgroups_8):
        images = image_list(2)
        for rec in d2_subgroups_8[:30]:
            fast = group_from_coset_table(2, rec.coset_table)
            gens = [word_to_affine(w, images)
                    for w in rec.coset_table.subgroup_words]
            slow = group_from_generators(2, gens)
            assert fast == slow
            assert fast.index_in_full() == rec.index

    def test_is_subgroup(self):
        g = full_group(2)
        h = group_from_coset_table(2, low_index_subgroups(make_presentation(2), 2)[1].coset_table)
        assert is_subgroup(h, g)
        assert not is_subgroup(g, h)


class TestLatticeNormalizer:
    def test_standard_lattice(self):
        n = lattice_normalizer(IntegerLattice.standard(3))
        assert n.point_order == 48
        assert n.lattice.index == 1

    def test_chessboard_even_sublattice(self):
        # the parity lattice {x+y+z even} is invariant under all 48 signed perms
        L = hnf([(1, 1, 0), (1, 0, 1), (0, 1, 1)])
        assert L.index == 2
        n = lattice_normalizer(L)
        assert n.point_order == 48
        # a half-invariant lattice keeps only the signed perms fixing the xy plane
        L2 = hnf([(1, 1, 0), (1, -1, 0), (0, 0, 1)])
        assert lattice_normalizer(L2).point_order == 16

    def test_calcite_normalizer(self):
        a = AffineMap.from_linear([[0, 0, -1], [-1, 0, 0], [0, -1, 0]])
        m_xxz = AffineMap.from_linear([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        H = group_from_generators(3, [
            a, affine_compose(m_xxz, AffineMap.translation((0, 2, 0))),
            AffineMap.translation((2, 1, 1))])
        n = lattice_normalizer(H.lattice)
        assert n.point_order == 12
        keys = {m.linear_key() for m in n.point_reps}
        assert a.linear_key() in keys
        assert m_xxz.linear_key() in keys

    def test_generating_set_reduction(self):
        reps = [AffineMap(p, s, (0,) * 2) for p, s in signed_permutations(2)]
        gens = reduce_point_generators(reps)
        assert len(gens) <= 3
        # the reduced set regenerates everything
        closure = {AffineMap.identity(2).linear_key()}
        frontier = list(closure)
        while frontier:
            k = frontier.pop()
            for g in gens:
                nk = affine_compose(AffineMap(k[0], k[1], (0, 0)), g).linear_key()
                if nk not in closure:
                    closure.add(nk)
                    frontier.append(nk)
        assert len(closure) == 8


class TestFingerprints:
    def test_trivial(self):
        fp = group_fingerprint([AffineMap.identity(2)])
        assert fp.order == 1
        assert fp.abelian_invariants == ()
        assert fp.center_order == 1

    def test_d2_point_group(self):
        fp = group_fingerprint(list(signed_permutations(2)))
        assert fp.order == 8
        assert dict(fp.element_orders) == {1: 1, 2: 5, 4: 2}
        assert fp.center_order == 2
        assert fp.abelian_invariants == (2, 2)

    def test_d3_point_group(self):
        fp = group_fingerprint(list(signed_permutations(3)))
        assert fp.order == 48
        assert fp.center_order == 2

    def test_abelian_invariants_c2xc4(self):
        elems = [(a, b) for a in range(2) for b in range(4)]
        fp = group_fingerprint(elems, mul=lambda x, y: ((x[0] + y[0]) % 2,
                                                        (x[1] + y[1]) % 4))
        assert fp.abelian_invariants == (2, 4)
        assert fp.center_order == 8

    def test_s3_abelianization(self):
        perms = list(itertools.permutations(range(3)))
        fp = group_fingerprint(perms)
        assert fp.order == 6
        assert fp.abelian_invariants == (2,)
        assert fp.center_order == 1

    def test_not_closed_rejected(self):
        swap = ((1, 0), (1, 1))
        with pytest.raises(ValueError):
            group_fingerprint([swap])
