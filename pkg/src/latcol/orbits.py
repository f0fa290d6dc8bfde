"""Finite group actions on the torus Z^d / T(H).

Torus points are the canonical coset representatives produced by
:meth:`IntegerLattice.reduce`; with a row-HNF basis these form the box
prod_i [0, basis[i][i]), enumerated lexicographically.  Orbit closure is a
plain breadth-first walk over the point-group coset representatives: the
point groups here never exceed 2^d d! = 384 elements and the tori stay in
the low hundreds, so there is nothing for a stabilizer chain to optimize.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from latcol.crystgeom import (AffineMap, CrystGroup, IntegerLattice,
                              is_subgroup)


def torus_points(L: IntegerLattice) -> tuple[tuple[int, ...], ...]:
    """All canonical representatives of Z^d / L in lexicographic order."""
    ranges = [range(L.basis[i][i]) for i in range(L.dim)]
    return tuple(itertools.product(*ranges))


def torus_index_map(L: IntegerLattice) -> dict[tuple[int, ...], int]:
    return {pt: i for i, pt in enumerate(torus_points(L))}


@dataclass(frozen=True)
class OrbitPartition:
    """Colouring of the torus Z^d / lattice by orbit ids, first-seen order."""

    lattice: IntegerLattice
    colors: tuple[int, ...]
    orbit_count: int

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def color_of(self, point) -> int:
        return self.colors[_box_index(self.lattice, self.lattice.reduce(point))]

    def orbit_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.orbit_count
        for c in self.colors:
            sizes[c] += 1
        return tuple(sizes)

    def classes(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        pts = torus_points(self.lattice)
        out: list[list[tuple[int, ...]]] = [[] for _ in range(self.orbit_count)]
        for pt, c in zip(pts, self.colors):
            out[c].append(pt)
        return tuple(tuple(cls) for cls in out)

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "orbit_count": self.orbit_count,
            "colors": list(self.colors),
            "orbit_sizes": list(self.orbit_sizes()),
        }

    @staticmethod
    def from_json(data: dict) -> "OrbitPartition":
        return OrbitPartition(
            lattice=IntegerLattice.from_json(data["lattice"]),
            colors=tuple(int(c) for c in data["colors"]),
            orbit_count=int(data["orbit_count"]),
        )


def _box_index(L: IntegerLattice, rep) -> int:
    idx = 0
    for i in range(L.dim):
        idx = idx * L.basis[i][i] + rep[i]
    return idx


def orbit_partition(g: CrystGroup) -> OrbitPartition:
    """Orbits of g on the torus Z^d / T(g), coloured in first-seen order."""
    L = g.lattice
    pts = torus_points(L)
    index = {pt: i for i, pt in enumerate(pts)}
    colors = [-1] * len(pts)
    n = 0
    for start in range(len(pts)):
        if colors[start] != -1:
            continue
        colors[start] = n
        queue = [pts[start]]
        while queue:
            p = queue.pop()
            for m in g.point_reps:
                q = L.reduce(m.apply(p))
                qi = index[q]
                if colors[qi] == -1:
                    colors[qi] = n
                    queue.append(q)
        n += 1
    return OrbitPartition(L, tuple(colors), n)


@dataclass(frozen=True)
class StabilizerInfo:
    """The finite stabilizer of a lattice point inside a crystallographic group."""

    point: tuple[int, ...]
    order: int
    elements: tuple[AffineMap, ...]


def stabilizer(g: CrystGroup, x) -> StabilizerInfo:
    """Site symmetry of x: elements (A, t) of g with A x + t = x exactly.

    One stabilizer element is produced per point-group coset that fixes x;
    the translation part is corrected by the unique lattice vector doing so.
    """
    x = tuple(x)
    elems = []
    for m in g.point_reps:
        img = m.apply(x)
        diff = tuple(a - b for a, b in zip(x, img))
        if g.lattice.contains(diff):
            elems.append(AffineMap(m.perm, m.sign,
                                   tuple(t + dv for t, dv in zip(m.trans, diff))))
    elems.sort(key=lambda m: (m.perm, m.sign, m.trans))
    return StabilizerInfo(x, len(elems), tuple(elems))


@dataclass(frozen=True)
class Proposition1Report:
    """Per-orbit stabilizer indices and their sum, compared with [G:H]."""

    index: int
    orbit_representatives: tuple[tuple[int, ...], ...]
    terms: tuple[int, ...]
    ok: bool

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "orbit_representatives": [list(p) for p in self.orbit_representatives],
            "terms": list(self.terms),
            "ok": self.ok,
        }


def proposition1_check(G: CrystGroup, H: CrystGroup) -> Proposition1Report:
    """Check i = sum over H-orbits of |Stab_G(x_k) : Stab_H(x_k)|.

    G must act transitively on each of its own node orbits; the sum is taken
    per G-orbit, which for the usual case of a node-transitive G is the
    plain orbit-stabilizer identity of the enumeration pipeline.
    """
    if G.dim != H.dim:
        raise ValueError("dimension mismatch")
    if not is_subgroup(H, G):
        raise ValueError("H is not a subgroup of G")
    i = (H.lattice.index // G.lattice.index) * (G.point_order // H.point_order)

    part_h = orbit_partition(H)
    part_g = orbit_partition(G)
    reps = [min(cls) for cls in part_h.classes()]
    reps.sort()

    terms = []
    per_g_orbit: dict[int, int] = {}
    for x in reps:
        sg = stabilizer(G, x).order
        sh = stabilizer(H, x).order
        if sg % sh:
            raise AssertionError("stabilizer orders violate Lagrange")
        term = sg // sh
        terms.append(term)
        gcol = part_g.color_of(x)
        per_g_orbit[gcol] = per_g_orbit.get(gcol, 0) + term
    ok = all(total == i for total in per_g_orbit.values())
    return Proposition1Report(i, tuple(reps), tuple(terms), ok)
