"""Partition-level analysis: canonical certificates, Aut, flags, signatures.

A partition of the lattice is identified with its colouring of the torus
modulo the *maximal* translation lattice preserving every colour class; the
canonical certificate minimizes the (HNF, colour word) pair over the whole
hyperoctahedral group and all torus translations, so equal certificates mean
the partitions differ only by a lattice symmetry plus a colour relabeling.

Aut(Pi) follows the two-step normalizer recipe: stabilize the classes inside
the normalizer of T(H), read off the intermediate group S, then stabilize
again inside the normalizer of T(S).  The one-shot inclusion method over a
whole enumeration run is implemented as an independent cross-check.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

from latcol.crystgeom import (AffineMap, CrystGroup, GroupFingerprint,
                              IntegerLattice, affine_compose, affine_inverse,
                              group_fingerprint, hnf, hyperoctahedral_order,
                              is_subgroup, lattice_normalizer,
                              signed_permutations)
from latcol.orbits import OrbitPartition, orbit_partition, stabilizer, torus_points

PartitionCertificate = bytes


# -- maximal translation lattice -------------------------------------------------


def max_translation_lattice(p: OrbitPartition) -> IntegerLattice:
    """Lattice of all translations mapping every colour class onto itself."""
    pts = torus_points(p.lattice)
    index = {pt: i for i, pt in enumerate(pts)}
    vecs = [row for row in p.lattice.basis]
    for u in pts:
        if not any(u):
            continue
        if all(p.colors[index[p.lattice.reduce(tuple(a + b for a, b in zip(pt, u)))]]
               == p.colors[i] for i, pt in enumerate(pts)):
            vecs.append(u)
    return hnf(vecs, p.lattice.dim)


def restrict_to_lattice(p: OrbitPartition, L: IntegerLattice) -> OrbitPartition:
    """Re-express the partition on the torus of a coarser invariant lattice."""
    pts = torus_points(L)
    colors = [p.color_of(pt) for pt in pts]
    relabel: dict[int, int] = {}
    out = []
    for c in colors:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    return OrbitPartition(L, tuple(out), p.orbit_count)


# -- canonical certificates -------------------------------------------------------


def canonical_certificate(p: OrbitPartition) -> PartitionCertificate:
    return canonical_form(p)[0]


def canonical_form(p: OrbitPartition,
                   tstar: IntegerLattice | None = None,
                   ) -> tuple[PartitionCertificate, OrbitPartition, AffineMap]:
    """Certificate, canonical partition, and the witness map achieving it.

    The witness w satisfies: canonical(x) = p(w^-1 x), i.e. transforming the
    input partition by w yields exactly the canonical partition.
    """
    d = p.dim
    if tstar is None:
        tstar = max_translation_lattice(p)
    star = restrict_to_lattice(p, tstar)
    star_pts = torus_points(tstar)
    star_idx = {pt: i for i, pt in enumerate(star_pts)}
    size = len(star_pts)

    # shift tables: shift_u[i] = index of star_pts[i] - u
    shifts = []
    for u in star_pts:
        shifts.append(tuple(star_idx[tstar.reduce(tuple(a - b for a, b in zip(pt, u)))]
                            for pt in star_pts))

    best_key = None
    best = None
    for perm, sign in signed_permutations(d):
        B = AffineMap(perm, sign, (0,) * d)
        Binv = affine_inverse(B)
        LB = tstar.transform(B)
        hnf_flat = tuple(v for row in LB.basis for v in row)
        pts_B = torus_points(LB)
        pull = tuple(star_idx[tstar.reduce(Binv.apply_linear(pt))] for pt in pts_B)
        for ui, u in enumerate(star_pts):
            shift = shifts[ui]
            raw = [star.colors[shift[pull[i]]] for i in range(size)]
            relabel: dict[int, int] = {}
            word = []
            for c in raw:
                if c not in relabel:
                    relabel[c] = len(relabel)
                word.append(relabel[c])
            key = (hnf_flat, tuple(word))
            if best_key is None or key < best_key:
                best_key = key
                best = (LB, tuple(word), B, u)
    LB, word, B, u = best
    witness = AffineMap(B.perm, B.sign, B.apply_linear(u))
    canon = OrbitPartition(LB, word, p.orbit_count)
    cert = pack_certificate(d, p.orbit_count, LB, word)
    return cert, canon, witness


def pack_certificate(d: int, n: int, L: IntegerLattice, word) -> bytes:
    entries = [v for row in L.basis for v in row] + list(word)
    return struct.pack(">BHH", d, n, L.index) + struct.pack(f">{len(entries)}H", *entries)


def unpack_certificate(cert: bytes) -> tuple[int, int, IntegerLattice, tuple[int, ...]]:
    d, n, index = struct.unpack(">BHH", cert[:5])
    rest = struct.unpack(f">{(len(cert) - 5) // 2}H", cert[5:])
    basis = tuple(tuple(rest[i * d:(i + 1) * d]) for i in range(d))
    return d, n, IntegerLattice(d, basis), tuple(rest[d * d:])


def conjugate_group(g: CrystGroup, w: AffineMap) -> CrystGroup:
    """w g w^-1, rebuilt in canonical representative form."""
    winv = affine_inverse(w)
    lattice = hnf([w.apply_linear(row) for row in g.lattice.basis], g.dim)
    reps = []
    for m in g.point_reps:
        c = affine_compose(affine_compose(w, m), winv)
        reps.append(AffineMap(c.perm, c.sign, lattice.reduce(c.trans)))
    reps.sort(key=lambda m: (m.perm, m.sign, m.trans))
    gens = tuple(affine_compose(affine_compose(w, m), winv) for m in g.generators)
    return CrystGroup(g.dim, gens, lattice, tuple(reps))


# -- automorphism group of a partition --------------------------------------------


def _class_stabilizer(p: OrbitPartition, normalizer: CrystGroup) -> CrystGroup:
    """Elements of the normalizer fixing every colour class setwise.

    The partition must be a colouring of the torus of a lattice that every
    point part of the normalizer maps onto itself.
    """
    L = p.lattice
    pts = torus_points(L)
    index = {pt: i for i, pt in enumerate(pts)}
    colors = p.colors
    kept: dict = {}
    translations = []
    for m in normalizer.point_reps:
        for u in pts:
            mapped = AffineMap(m.perm, m.sign,
                               tuple(a + b for a, b in zip(m.trans, u)))
            if all(colors[index[L.reduce(mapped.apply(pt))]] == colors[i]
                   for i, pt in enumerate(pts)):
                if mapped.is_translation():
                    translations.append(mapped.trans)
                key = mapped.linear_key()
                if key not in kept:
                    kept[key] = mapped
    lattice = hnf(list(L.basis) + translations, L.dim)
    reps = [AffineMap(m.perm, m.sign, lattice.reduce(m.trans))
            for m in kept.values()]
    reps.sort(key=lambda m: (m.perm, m.sign, m.trans))
    gens = tuple(reps) + tuple(AffineMap.translation(row) for row in lattice.basis)
    return CrystGroup(L.dim, gens, lattice, tuple(reps))


def aut_partition(H: CrystGroup, p: OrbitPartition) -> CrystGroup:
    """Colour-class-fixing group of the partition, by the two-step recipe.

    Step 1 stabilizes the classes in the normalizer of T(H), producing the
    intermediate group S; step 2 repeats inside the normalizer of T(S).  The
    result contains H and induces exactly the classes of p.
    """
    if p.lattice.basis != H.lattice.basis or orbit_partition(H).colors != p.colors:
        raise ValueError("partition is not the orbit partition of H")
    n1 = lattice_normalizer(H.lattice)
    s = _class_stabilizer(p, n1)
    n2 = lattice_normalizer(s.lattice)
    p_s = restrict_to_lattice(p, s.lattice)
    aut = _class_stabilizer(p_s, n2)
    if not is_subgroup(H, aut):
        raise AssertionError("H not contained in Aut(partition)")
    induced = orbit_partition(aut)
    if induced.colors != p_s.colors:
        raise AssertionError("Aut(partition) does not reproduce the colour classes")
    return aut


def aut_partition_by_inclusion(records) -> dict[bytes, CrystGroup]:
    """Per-certificate maximal group, by ordering subgroups under inclusion.

    ``records`` yields (group, certificate, witness) triples from one
    enumeration run; each group is replaced by its witness conjugate (which
    induces the canonical partition of its class) and the unique maximal
    group of each class is returned.  A non-unique maximum is a hard error.
    """
    classes: dict[bytes, list[CrystGroup]] = {}
    for g, cert, witness in records:
        classes.setdefault(cert, []).append(conjugate_group(g, witness))
    out: dict[bytes, CrystGroup] = {}
    for cert, groups in sorted(classes.items()):
        uniq: list[CrystGroup] = []
        for g in groups:
            if not any(g == h for h in uniq):
                uniq.append(g)
        uniq.sort(key=lambda g: g.index_in_full())
        top = uniq[0]
        for other in uniq[1:]:
            if other.index_in_full() == top.index_in_full() or not is_subgroup(other, top):
                raise AssertionError(
                    "no unique inclusion-maximal group for certificate "
                    + cert.hex())
        out[cert] = top
    return out


def index_decomposition(aut: CrystGroup) -> tuple[int, int]:
    """(i_t, i_k): translation-lattice index and point-group deficiency."""
    return (aut.lattice.index,
            hyperoctahedral_order(aut.dim) // aut.point_order)


# -- colour permutations (global distribution symmetry) ----------------------------


def color_permutation_group(p: OrbitPartition,
                            tstar: IntegerLattice | None = None,
                            ) -> tuple[tuple[int, ...], ...]:
    """Colour permutations induced by lattice symmetries preserving the classes.

    Works inside the normalizer of the maximal translation lattice; the
    returned permutation set is already a group.
    """
    if tstar is None:
        tstar = max_translation_lattice(p)
    star = restrict_to_lattice(p, tstar)
    pts = torus_points(tstar)
    index = {pt: i for i, pt in enumerate(pts)}
    n = p.orbit_count
    perms: set[tuple[int, ...]] = set()
    norm = lattice_normalizer(tstar)
    for m in norm.point_reps:
        for u in pts:
            mapped = AffineMap(m.perm, m.sign,
                               tuple(a + b for a, b in zip(m.trans, u)))
            cmap = [-1] * n
            ok = True
            for i, pt in enumerate(pts):
                src = star.colors[i]
                dst = star.colors[index[tstar.reduce(mapped.apply(pt))]]
                if cmap[src] == -1:
                    cmap[src] = dst
                elif cmap[src] != dst:
                    ok = False
                    break
            if ok and sorted(cmap) == list(range(n)):
                perms.add(tuple(cmap))
    return tuple(sorted(perms))


def is_swap_symmetric(p: OrbitPartition,
                      tstar: IntegerLattice | None = None) -> bool:
    """True when the induced colour permutation group is transitive."""
    perms = color_permutation_group(p, tstar)
    n = p.orbit_count
    reached = {0}
    frontier = [0]
    while frontier:
        c = frontier.pop()
        for perm in perms:
            if perm[c] not in reached:
                reached.add(perm[c])
                frontier.append(perm[c])
    return len(reached) == n


# -- neighbourhoods -----------------------------------------------------------------


@dataclass(frozen=True)
class NeighbourhoodSignature:
    """Per-colour coloured neighbourhood arrangements at the given radius.

    Radius 1 covers the 2d nearest neighbours, radius 2 cumulatively adds
    the second shell (all points at l1-distance exactly 2).  Each colour's
    entry is the colour word over the shell vectors in canonical order,
    minimized over all hyperoctahedral re-orientations of the ball, so it
    does not depend on the chosen class representative.  Colour-count
    multisets are a projection of this word; the full arrangement is what
    distinguishes partitions whose counts agree.
    """

    radius: int
    per_color: tuple[tuple[int, ...], ...]

    def counts(self, color: int) -> tuple[tuple[int, int], ...]:
        """Multiset of neighbour colours for one colour class."""
        hist: dict[int, int] = {}
        for c in self.per_color[color]:
            hist[c] = hist.get(c, 0) + 1
        return tuple(sorted(hist.items()))

    def to_json(self) -> list:
        return [list(word) for word in self.per_color]


def _shell_vectors(d: int, dist: int) -> list[tuple[int, ...]]:
    out = []
    for pt in itertools.product(range(-dist, dist + 1), repeat=d):
        if sum(abs(x) for x in pt) == dist:
            out.append(pt)
    return sorted(out)


def _ball_vectors(d: int, radius: int) -> list[tuple[int, ...]]:
    vectors = _shell_vectors(d, 1)
    if radius == 2:
        vectors = vectors + _shell_vectors(d, 2)
    return vectors


def _color_reps(p: OrbitPartition) -> list[tuple[int, ...]]:
    reps: dict[int, tuple[int, ...]] = {}
    for pt, c in zip(torus_points(p.lattice), p.colors):
        if c not in reps:
            reps[c] = pt
    return [reps[c] for c in range(p.orbit_count)]


def _oriented_words(p: OrbitPartition, rep, vectors) -> list[tuple[int, ...]]:
    """Colour words of the ball around rep, one per re-orientation."""
    d = p.dim
    words = []
    for perm, sign in signed_permutations(d):
        B = AffineMap(perm, sign, (0,) * d)
        words.append(tuple(
            p.color_of(tuple(a + b for a, b in zip(rep, B.apply_linear(v))))
            for v in vectors))
    return words


def neighbourhood_signature(p: OrbitPartition, radius: int) -> NeighbourhoodSignature:
    if radius not in (1, 2):
        raise ValueError("radius must be 1 or 2")
    vectors = _ball_vectors(p.dim, radius)
    per_color = []
    for rep in _color_reps(p):
        per_color.append(min(_oriented_words(p, rep, vectors)))
    return NeighbourhoodSignature(radius, tuple(per_color))


def signature_key(p: OrbitPartition, radius: int) -> tuple:
    """Colour-relabeling-invariant signature, comparable across partitions."""
    n = p.orbit_count
    if n > 7:
        raise ValueError("signature canonicalization is limited to 7 colours")
    vectors = _ball_vectors(p.dim, radius)
    oriented = [_oriented_words(p, rep, vectors) for rep in _color_reps(p)]
    best = None
    for perm in itertools.permutations(range(n)):
        relabeled = [None] * n
        for c in range(n):
            relabeled[perm[c]] = min(tuple(perm[x] for x in w) for w in oriented[c])
        key = tuple(relabeled)
        if best is None or key < best:
            best = key
    return best


def is_proper_colouring(p: OrbitPartition) -> bool:
    """No two nearest neighbours share a colour."""
    pts = torus_points(p.lattice)
    d = p.dim
    for pt, c in zip(pts, p.colors):
        for i in range(d):
            nb = list(pt)
            nb[i] += 1
            if p.color_of(tuple(nb)) == c:
                return False
    return True


# -- superposition ------------------------------------------------------------------


def superposition_lift(p: OrbitPartition) -> OrbitPartition:
    """Lift a partition of Lambda^(d-1) to Lambda^d, colour-blind new axis."""
    d = p.dim
    basis = tuple(tuple(row) + (0,) for row in p.lattice.basis) + (
        tuple(0 for _ in range(d)) + (1,),)
    return OrbitPartition(IntegerLattice(d + 1, basis), p.colors, p.orbit_count)


def is_superposed(p: OrbitPartition,
                  tstar: IntegerLattice | None = None) -> bool:
    """True when some signed coordinate axis is colour-blind."""
    if tstar is None:
        tstar = max_translation_lattice(p)
    d = p.dim
    for i in range(d):
        for s in (1, -1):
            if tstar.contains(tuple(s if j == i else 0 for j in range(d))):
                return True
    return False


# -- partition records ---------------------------------------------------------------


@dataclass(frozen=True)
class PartitionFlags:
    proper_colouring: bool
    swap_symmetric: bool
    superposed: bool

    def to_json(self) -> dict:
        return {"proper_colouring": self.proper_colouring,
                "swap_symmetric": self.swap_symmetric,
                "superposed": self.superposed}


@dataclass(frozen=True)
class PartitionRecord:
    """Everything the catalog keeps per equivalence class of partitions."""

    certificate: PartitionCertificate
    partition: OrbitPartition
    subgroup: CrystGroup
    aut: CrystGroup
    i_t: int
    i_k: int
    flags: PartitionFlags
    signature_r1: NeighbourhoodSignature
    signature_r2: NeighbourhoodSignature
    stabilizer_fingerprints: tuple[GroupFingerprint, ...]

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.hex(),
            "partition": self.partition.to_json(),
            "subgroup_generators": [g.to_json() for g in self.subgroup.generators],
            "subgroup": self.subgroup.to_json(),
            "aut": self.aut.to_json(),
            "i_t": self.i_t,
            "i_k": self.i_k,
            "flags": self.flags.to_json(),
            "signatures": {"radius_1": self.signature_r1.to_json(),
                           "radius_2": self.signature_r2.to_json()},
            "stabilizer_fingerprints": [f.to_json() for f in self.stabilizer_fingerprints],
        }


def build_record(H: CrystGroup, p: OrbitPartition) -> PartitionRecord:
    """Canonicalize the partition induced by H and assemble its record."""
    tstar = max_translation_lattice(p)
    cert, canon, witness = canonical_form(p, tstar)
    Hc = conjugate_group(H, witness)
    p_c = orbit_partition(Hc)
    aut = aut_partition(Hc, p_c)
    if aut.lattice.basis != canon.lattice.basis:
        raise AssertionError("Aut translation lattice disagrees with the certificate")
    i_t, i_k = index_decomposition(aut)
    flags = PartitionFlags(
        proper_colouring=is_proper_colouring(canon),
        swap_symmetric=is_swap_symmetric(canon, aut.lattice),
        superposed=is_superposed(canon, aut.lattice),
    )
    pts = torus_points(canon.lattice)
    reps: dict[int, tuple[int, ...]] = {}
    for pt, c in zip(pts, canon.colors):
        if c not in reps:
            reps[c] = pt
    fingerprints = []
    for c in range(canon.orbit_count):
        st = stabilizer(aut, reps[c])
        fingerprints.append(group_fingerprint(list(st.elements)))
    return PartitionRecord(
        certificate=cert,
        partition=canon,
        subgroup=Hc,
        aut=aut,
        i_t=i_t,
        i_k=i_k,
        flags=flags,
        signature_r1=neighbourhood_signature(canon, 1),
        signature_r2=neighbourhood_signature(canon, 2),
        stabilizer_fingerprints=tuple(fingerprints),
    )
