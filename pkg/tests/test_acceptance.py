"""Acceptance suite: every criterion at its stated tolerance, one line each.

All counts asserted here are exact.  Wall-clock targets are asserted against
runs that exclude one-time JIT warmup (handled by the session fixture).
Multi-hour stretch targets are gated behind LATCOL_LONG_TESTS=1 and clearly
reported as skips, never silently weakened.
"""

import collections
import sys
import time
from contextlib import contextmanager

import pytest

from conftest import LONG_TESTS, requires_long
from latcol.catalog import RunConfig, enumerate_partitions, enumerate_node_transitive
from latcol.crystgeom import (AffineMap, affine_compose, full_group,
                              group_from_coset_table, group_from_generators)
from latcol.fpgroup import low_index_subgroups, make_presentation
from latcol.orbits import orbit_partition, proposition1_check, torus_points
from latcol.partitions import (aut_partition, restrict_to_lattice,
                               signature_key)

from oracles import torus_orbit_closure

_cache: dict = {}


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL  {description}", file=sys.stderr)
        raise
    print(f"ACCEPTANCE {number}: PASS  {description}", file=sys.stderr)


def _timed_catalog(dim, orbits, jobs=1):
    t0 = time.monotonic()
    cat = enumerate_partitions(RunConfig(dim, orbits, jobs=jobs))
    return cat, time.monotonic() - t0


def test_criterion_1_lambda1_baseline(warm_engine):
    with criterion(1, "3 two-orbit patterns of the linear lattice, < 1 s"):
        cat, wall = _timed_catalog(1, 2)
        assert len(cat.records) == 3
        profiles = sorted((r.i_t, tuple(sorted(r.partition.orbit_sizes())))
                          for r in cat.records)
        # alternating, two-against-one, and pair-of-pairs patterns
        assert profiles == [(2, (1, 1)), (3, (1, 2)), (4, (2, 2))]
        assert wall < 1.0
        _cache["d1"] = cat


def test_criterion_2_heesch_square_lattice(warm_engine):
    with criterion(2, "9 two-orbit partitions of the square lattice, < 10 s"):
        cat, wall = _timed_catalog(2, 2)
        assert len(cat.records) == 9
        assert sum(r.flags.swap_symmetric for r in cat.records) == 6
        assert wall < 10.0
        _cache["d2:2"] = cat


def test_criterion_3_square_lattice_sequence(warm_engine):
    with criterion(3, "square lattice: 22, 44, 39, 80 classes for 3..6 orbits, < 10 min"):
        expected = {3: 22, 4: 44, 5: 39, 6: 80}
        total = 0.0
        for n, count in expected.items():
            cat, wall = _timed_catalog(2, n)
            total += wall
            assert len(cat.records) == count, f"n={n}"
            _cache[f"d2:{n}"] = cat
        assert total < 600.0


@requires_long
def test_criterion_3_stretch_seven_plus_orbits(warm_engine):
    with criterion("3s", "square lattice stretch: 47, 96, 81 classes for 7..9 orbits"):
        for n, count in {7: 47, 8: 96, 9: 81}.items():
            cat, _ = _timed_catalog(2, n)
            assert len(cat.records) == count, f"n={n}"


@pytest.mark.slow
def test_criterion_4_cubic_lattice_two_orbit(catalog_d3):
    with criterion(4, "25 two-orbit partitions of the cubic lattice with all per-class data"):
        cat = catalog_d3
        assert len(cat.records) == 25

        decompositions = sorted((r.i_t, r.i_k) for r in cat.records)
        assert decompositions == sorted([
            (2, 1), (4, 1), (2, 3), (2, 3), (3, 3), (4, 3), (4, 3), (3, 4),
            (16, 1), (4, 4), (3, 6), (8, 3), (8, 3), (4, 6), (4, 6), (4, 6),
            (8, 3), (5, 6), (32, 1), (32, 1), (8, 6), (16, 3), (7, 8),
            (32, 3), (32, 3)])

        assert sum(r.flags.proper_colouring for r in cat.records) == 1
        assert sum(r.flags.superposed for r in cat.records) == 9
        assert sum(r.flags.swap_symmetric for r in cat.records) == 17

        r1_groups = collections.Counter(
            signature_key(r.partition, 1) for r in cat.records)
        ambiguous = sorted(v for v in r1_groups.values() if v > 1)
        assert ambiguous == [2, 3, 3, 4]
        r2_groups = collections.Counter(
            signature_key(r.partition, 2) for r in cat.records)
        assert len(r2_groups) == 25


@pytest.mark.slow
def test_criterion_4_wall_time(warm_engine):
    with criterion("4t", "cubic-lattice two-orbit run fits the 30 min target"):
        t0 = time.monotonic()
        cat = enumerate_partitions(RunConfig(3, 2))
        wall = time.monotonic() - t0
        assert len(cat.records) == 25
        assert wall < 1800.0
        _cache["d3:jobless"] = cat


def test_criterion_5_node_transitive_censuses(warm_engine):
    with criterion(5, "node-transitive censuses: 3, 36, 786 for d=1,2,3"):
        d1 = enumerate_node_transitive(1)
        assert len(d1) == 3
        keys = {(g.lattice.index, g.point_order) for g in d1}
        assert keys == {(1, 2), (1, 1), (2, 2)}
        assert len(enumerate_node_transitive(2)) == 36
        assert len(enumerate_node_transitive(3)) == 786


def test_criterion_6_rhombohedral_worked_example(warm_engine):
    with criterion(6, "rhombohedral subgroup worked example reproduced exactly"):
        T = AffineMap.translation
        a = AffineMap.from_linear([[0, 0, -1], [-1, 0, 0], [0, -1, 0]])
        b = AffineMap.from_linear([[0, -1, 0], [-1, 0, 0], [0, 0, 1]])
        m_xxz = AffineMap.from_linear([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        H = group_from_generators(3, [
            a, affine_compose(m_xxz, T((0, 2, 0))), T((2, 1, 1))])

        assert torus_points(H.lattice) == ((0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 0, 3))
        p = orbit_partition(H)
        classes = p.classes()
        assert set(classes[0]) == {(0, 0, 0), (0, 0, 2)}
        assert set(classes[1]) == {(0, 0, 1), (0, 0, 3)}

        from latcol.partitions import max_translation_lattice
        ts = max_translation_lattice(p)
        assert ts.index == 2
        assert restrict_to_lattice(p, ts).orbit_sizes() == (1, 1)

        aut = aut_partition(H, p)
        assert aut == group_from_generators(3, [a, b, T((0, 1, 1))])


@pytest.mark.slow
def test_criterion_7_proposition1_suite(warm_engine):
    with criterion(7, "orbit-stabilizer index identity for every visited subgroup"):
        for d, bound in ((1, 4), (2, 48), (3, 96)):
            full = full_group(d)
            for rec in low_index_subgroups(make_presentation(d), bound):
                h = group_from_coset_table(d, rec.coset_table)
                report = proposition1_check(full, h)
                assert report.ok
                assert report.index == rec.index


def test_criterion_8_orbit_oracle(d2_subgroups_8):
    with criterion(8, "pipeline orbits match brute-force closure on the 24x24 torus"):
        from latcol.crystgeom import image_list, word_to_affine

        images = image_list(2)
        for rec in d2_subgroups_8:
            group = group_from_coset_table(2, rec.coset_table)
            part = orbit_partition(group)
            gens = [word_to_affine(w, images)
                    for w in rec.coset_table.subgroup_words]
            color, n = torus_orbit_closure(gens, 24, 2)
            assert n == part.orbit_count
            remap = {}
            for pt, c in color.items():
                expected = part.color_of(pt)
                assert remap.setdefault(c, expected) == expected
            assert len(set(remap.values())) == n


def test_criterion_9_required_part(catalog_d2):
    with criterion(9, "square-lattice distribution-symmetric two-orbit count is 6"):
        assert sum(r.flags.swap_symmetric for r in catalog_d2.records) == 6


@pytest.mark.skip(reason="stretch target: the d=4 two-step run (73 classes) needs "
                         "a multi-day transitive census and is not part of the gate")
def test_criterion_9_stretch_d4():
    pass


@pytest.mark.slow
def test_criterion_10_determinism_across_workers(catalog_d1, catalog_d2, catalog_d3):
    with criterion(10, "catalogs byte-identical across 1 and 3 workers"):
        pairs = [(1, 2, catalog_d1), (2, 2, catalog_d2), (3, 2, catalog_d3)]
        for n in (3, 4, 5, 6):
            base = _cache.get(f"d2:{n}") or enumerate_partitions(RunConfig(2, n))
            pairs.append((2, n, base))
        for d, n, base in pairs:
            parallel = enumerate_partitions(RunConfig(d, n, jobs=3))
            assert parallel.dumps() == base.dumps(), f"d={d} n={n}"
