"""Exact affine geometry over Z^d with signed-permutation linear parts.

Everything here is integer-exact.  A linear part is stored as the pair
(perm, sign): the matrix maps e_{perm[i]} to sign[i]*e_i, i.e. row i has its
single nonzero entry sign[i] in column perm[i], so applying it to a vector
costs O(d).  Sublattices of Z^d are kept in row-style Hermite normal form
(basis vectors are the rows of an upper-triangular matrix with positive
diagonal and off-diagonal entries reduced modulo the diagonal below them),
which is the unique canonical basis used for all certificates.

Crystallographic subgroups of the lattice symmetry group are represented
explicitly: the translation lattice T plus one affine coset representative
per point-group element.  Groups here are small (point order <= 2^d d! = 384
for d <= 4), so explicit element lists beat anything cleverer.
"""

from __future__ import annotations

import itertools

from dataclasses import dataclass
from functools import lru_cache


from latcol.fpgroup import Word, make_presentation


class RankDeficientLattice(ValueError):
    """The given vectors do not span a full-rank sublattice of Z^d."""


# -- affine maps ---------------------------------------------------------------


@dataclass(frozen=True)
class AffineMap:
    """x -> Bx + t with B a signed permutation and t an integer vector."""

    perm: tuple[int, ...]
    sign: tuple[int, ...]
    trans: tuple[int, ...]

    def __post_init__(self):
        d = len(self.perm)
        if sorted(self.perm) != list(range(d)):
            raise ValueError("perm must be a permutation of 0..d-1")
        if len(self.sign) != d or any(s not in (-1, 1) for s in self.sign):
            raise ValueError("sign must be a vector of +-1")
        if len(self.trans) != d:
            raise ValueError("translation length mismatch")

    @property
    def dim(self) -> int:
        return len(self.perm)

    @staticmethod
    def identity(d: int) -> "AffineMap":
        return AffineMap(tuple(range(d)), (1,) * d, (0,) * d)

    @staticmethod
    def translation(vec) -> "AffineMap":
        d = len(vec)
        return AffineMap(tuple(range(d)), (1,) * d, tuple(vec))

    @staticmethod
    def from_linear(rows, trans=None) -> "AffineMap":
        """Build from an explicit signed-permutation matrix given as rows."""
        d = len(rows)
        perm, sign = [], []
        for row in rows:
            nz = [(j, v) for j, v in enumerate(row) if v]
            if len(nz) != 1 or nz[0][1] not in (-1, 1):
                raise ValueError("rows must have exactly one entry +-1")
            perm.append(nz[0][0])
            sign.append(nz[0][1])
        return AffineMap(tuple(perm), tuple(sign), tuple(trans or (0,) * d))

    def linear_rows(self) -> tuple[tuple[int, ...], ...]:
        d = self.dim
        return tuple(tuple(self.sign[i] if j == self.perm[i] else 0 for j in range(d))
                     for i in range(d))

    def apply_linear(self, v) -> tuple[int, ...]:
        return tuple(self.sign[i] * v[self.perm[i]] for i in range(self.dim))

    def apply(self, v) -> tuple[int, ...]:
        return tuple(self.sign[i] * v[self.perm[i]] + self.trans[i]
                     for i in range(self.dim))

    def linear_key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.perm, self.sign)

    def is_identity(self) -> bool:
        return (self.perm == tuple(range(self.dim))
                and all(s == 1 for s in self.sign)
                and all(t == 0 for t in self.trans))

    def is_translation(self) -> bool:
        return self.perm == tuple(range(self.dim)) and all(s == 1 for s in self.sign)

    def __str__(self) -> str:
        rows = self.linear_rows()
        body = "; ".join(" ".join(str(v) for v in row) for row in rows)
        return f"[{body} | {' '.join(str(t) for t in self.trans)}]"

    def to_text(self) -> str:
        lines = [" ".join(str(v) for v in row) for row in self.linear_rows()]
        lines.append(" ".join(str(t) for t in self.trans))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "AffineMap":
        rows = [[int(v) for v in line.split()] for line in text.strip().splitlines()]
        if len(rows) < 2:
            raise ValueError("expected d linear rows plus a translation row")
        return AffineMap.from_linear(rows[:-1], rows[-1])

    def to_json(self) -> dict:
        return {"linear": [list(r) for r in self.linear_rows()],
                "translation": list(self.trans)}

    @staticmethod
    def from_json(data: dict) -> "AffineMap":
        return AffineMap.from_linear(data["linear"], data["translation"])


def affine_compose(f: AffineMap, g: AffineMap) -> AffineMap:
    """(f o g)(x) = f(g(x)), exactly."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    perm = tuple(g.perm[f.perm[i]] for i in range(f.dim))
    sign = tuple(f.sign[i] * g.sign[f.perm[i]] for i in range(f.dim))
    trans = tuple(f.sign[i] * g.trans[f.perm[i]] + f.trans[i] for i in range(f.dim))
    return AffineMap(perm, sign, trans)


def affine_inverse(f: AffineMap) -> AffineMap:
    d = f.dim
    perm = [0] * d
    sign = [1] * d
    for i in range(d):
        perm[f.perm[i]] = i
        sign[f.perm[i]] = f.sign[i]
    trans = tuple(-sign[j] * f.trans[perm[j]] for j in range(d))
    return AffineMap(tuple(perm), tuple(sign), trans)


@lru_cache(maxsize=None)
def signed_permutations(d: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All 2^d d! signed-permutation (perm, sign) pairs, fixed order."""
    out = []
    for perm in itertools.permutations(range(d)):
        for sign in itertools.product((1, -1), repeat=d):
            out.append((perm, sign))
    return tuple(out)


def hyperoctahedral_order(d: int) -> int:
    out = 2 ** d
    for k in range(2, d + 1):
        out *= k
    return out


# -- integer lattices in Hermite normal form -----------------------------------


@dataclass(frozen=True)
class IntegerLattice:
    """Full-rank sublattice of Z^d; rows of ``basis`` are the HNF basis."""

    dim: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        out = 1
        for i in range(self.dim):
            out *= self.basis[i][i]
        return out

    @staticmethod
    def standard(d: int) -> "IntegerLattice":
        return IntegerLattice(d, tuple(tuple(1 if i == j else 0 for j in range(d))
                                       for i in range(d)))

    def reduce(self, v) -> tuple[int, ...]:
        """Canonical coset representative: 0 <= v_i < basis[i][i]."""
        v = list(v)
        for i in range(self.dim):
            q = v[i] // self.basis[i][i]
            if q:
                row = self.basis[i]
                for j in range(i, self.dim):
                    v[j] -= q * row[j]
        return tuple(v)

    def contains(self, v) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        return all(self.contains(row) for row in other.basis)

    def transform(self, linear: AffineMap) -> "IntegerLattice":
        """The lattice B*L for the linear part of the given map."""
        return hnf([linear.apply_linear(row) for row in self.basis], self.dim)

    def to_json(self) -> list:
        return [list(r) for r in self.basis]

    @staticmethod
    def from_json(rows) -> "IntegerLattice":
        return IntegerLattice(len(rows), tuple(tuple(int(x) for x in r) for r in rows))


def hnf(vectors, dim: int | None = None) -> IntegerLattice:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Raises :class:`RankDeficientLattice` when the span has rank < dim; for
    this library that always signals an infinite-index translation part.
    """
    vectors = [list(v) for v in vectors]
    if dim is None:
        if not vectors:
            raise RankDeficientLattice("no vectors given")
        dim = len(vectors[0])
    rows = [v for v in vectors if any(v)]
    pivots: list[list[int]] = []
    for col in range(dim):
        rows = [r for r in rows if any(r)]
        carrier = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not carrier:
            raise RankDeficientLattice(f"rank-deficient input (no pivot in column {col})")
        while len(carrier) > 1:
            carrier.sort(key=lambda r: abs(r[col]))
            base = carrier[0]
            out = [base]
            for r in carrier[1:]:
                q = r[col] // base[col]
                new = [r[j] - q * base[j] for j in range(dim)]
                if new[col] != 0:
                    out.append(new)
                elif any(new):
                    rest.append(new)
            carrier = out
        pivot = carrier[0]
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        pivots.append(pivot)
        rows = rest
    # reduce entries above each diagonal into [0, diagonal)
    for j in range(1, dim):
        for i in range(j):
            q = pivots[i][j] // pivots[j][j]
            if q:
                for k in range(j, dim):
                    pivots[i][k] -= q * pivots[j][k]
    return IntegerLattice(dim, tuple(tuple(r) for r in pivots))


class EchelonAccumulator:
    """Mutable integer row-echelon span, for incremental kernel collection."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[list[int]] = []
        self.pivot_of_col: dict[int, int] = {}

    def _reduce(self, vec: list[int], mutate: bool) -> list[int]:
        for col in range(self.dim):
            if vec[col] == 0:
                continue
            p = self.pivot_of_col.get(col)
            if p is None:
                if not mutate:
                    return vec
                if vec[col] < 0:
                    vec = [-x for x in vec]
                self.rows.append(vec)
                self.pivot_of_col[col] = len(self.rows) - 1
                return [0] * self.dim
            row = self.rows[p]
            a, b = row[col], vec[col]
            if b % a == 0:
                q = b // a
                vec = [vec[j] - q * row[j] for j in range(self.dim)]
            else:
                if not mutate:
                    return vec
                g, u, v = _xgcd(a, b)
                comb = [u * row[j] + v * vec[j] for j in range(self.dim)]
                vec = [vec[j] - (b // g) * comb[j] for j in range(self.dim)]
                self.rows[p] = [row[j] - (a // g) * comb[j] for j in range(self.dim)]
                # old pivot row lost its pivot: re-add below the new one
                old = self.rows[p]
                self.rows[p] = comb
                if any(old):
                    vec2 = self._reduce(old, True)
                    assert not any(vec2)
        return vec

    def add(self, vec) -> bool:
        """Add a vector to the span; True if the span grew or changed."""
        before = [list(r) for r in self.rows]
        rem = self._reduce(list(vec), True)
        return any(rem) or self.rows != before

    def contains(self, vec) -> bool:
        return not any(self._reduce(list(vec), False))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def to_lattice(self) -> IntegerLattice:
        return hnf(self.rows, self.dim)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# -- crystallographic groups ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class CrystGroup:
    """A finite-index subgroup of the lattice symmetry group.

    ``point_reps`` holds one affine representative per point-group element,
    with translation parts reduced modulo the translation lattice; together
    with the lattice this is a complete, canonical description of the group.
    """

    dim: int
    generators: tuple[AffineMap, ...]
    lattice: IntegerLattice
    point_reps: tuple[AffineMap, ...]

    @property
    def point_order(self) -> int:
        return len(self.point_reps)

    def rep_for(self, linear_key) -> AffineMap | None:
        table = self._rep_table()
        return table.get(linear_key)

    def _rep_table(self) -> dict:
        if not hasattr(self, "_reps_cache"):
            object.__setattr__(self, "_reps_cache",
                               {m.linear_key(): m for m in self.point_reps})
        return self._reps_cache

    def canonical_key(self):
        return (self.lattice.basis,
                tuple(sorted((m.perm, m.sign, m.trans) for m in self.point_reps)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrystGroup):
            return NotImplemented
        return self.dim == other.dim and self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash((self.dim, self.canonical_key()))

    def index_in_full(self) -> int:
        """Index in the full lattice symmetry group Aut(Lambda^d)."""
        return self.lattice.index * hyperoctahedral_order(self.dim) // self.point_order

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "generators": [g.to_json() for g in self.generators],
            "lattice": self.lattice.to_json(),
            "point_reps": [m.to_json() for m in self.point_reps],
        }

    @staticmethod
    def from_json(data: dict) -> "CrystGroup":
        return CrystGroup(
            dim=int(data["dim"]),
            generators=tuple(AffineMap.from_json(g) for g in data["generators"]),
            lattice=IntegerLattice.from_json(data["lattice"]),
            point_reps=tuple(AffineMap.from_json(m) for m in data["point_reps"]),
        )


class _Closure:
    """Incremental point-group closure with Schreier kernel collection."""

    def __init__(self, dim: int):
        self.dim = dim
        self.reps: dict = {AffineMap.identity(dim).linear_key(): AffineMap.identity(dim)}
        self.kernel = EchelonAccumulator(dim)
        self.gens: list[AffineMap] = []

    def contains(self, m: AffineMap) -> bool:
        rep = self.reps.get(m.linear_key())
        if rep is None:
            return False
        diff = tuple(a - b for a, b in zip(m.trans, rep.trans))
        return self.kernel.contains(diff)

    def add(self, m: AffineMap) -> bool:
        if self.contains(m):
            return False
        self.gens.append(m)
        self._close()
        return True

    def _close(self):
        gens_full = []
        for g in self.gens:
            gens_full.append(g)
            gens_full.append(affine_inverse(g))
        queue = list(self.reps.values())
        while queue:
            r = queue.pop()
            for g in gens_full:
                new = affine_compose(r, g)
                key = new.linear_key()
                old = self.reps.get(key)
                if old is None:
                    self.reps[key] = new
                    queue.append(new)
                else:
                    diff = tuple(a - b for a, b in zip(new.trans, old.trans))
                    if not self.kernel.contains(diff):
                        self.kernel.add(diff)
                        # richer kernel can merge previously distinct cosets:
                        # re-run products from every representative
                        queue = list(self.reps.values())

    def finish(self, generators: tuple[AffineMap, ...]) -> CrystGroup:
        if self.kernel.rank < self.dim:
            raise RankDeficientLattice(
                "translation part of the group does not have full rank")
        lattice = self.kernel.to_lattice()
        reps = [AffineMap(m.perm, m.sign, lattice.reduce(m.trans))
                for m in self.reps.values()]
        reps.sort(key=lambda m: (m.perm, m.sign, m.trans))
        return CrystGroup(self.dim, generators, lattice, tuple(reps))


def group_from_generators(dim: int, generators) -> CrystGroup:
    """Close a generator list into an explicit CrystGroup.

    Raises :class:`RankDeficientLattice` if the generated group does not
    contain a full-rank lattice of translations.
    """
    generators = tuple(generators)
    clo = _Closure(dim)
    for g in generators:
        if g.dim != dim:
            raise ValueError("generator dimension mismatch")
        clo.add(g)
    return clo.finish(generators)


def translation_subgroup(g: CrystGroup) -> tuple[IntegerLattice, tuple[AffineMap, ...]]:
    """T(H) plus the point-group coset representatives (already cached)."""
    return g.lattice, g.point_reps


def contains(g: CrystGroup, m: AffineMap) -> bool:
    """Exact membership test: point part known and translation in T(g)-coset."""
    if m.dim != g.dim:
        raise ValueError("dimension mismatch")
    rep = g.rep_for(m.linear_key())
    if rep is None:
        return False
    return g.lattice.contains(tuple(a - b for a, b in zip(m.trans, rep.trans)))


def is_subgroup(h: CrystGroup, g: CrystGroup) -> bool:
    return (g.lattice.contains_lattice(h.lattice)
            and all(contains(g, m) for m in h.point_reps))


def lattice_normalizer(L: IntegerLattice) -> CrystGroup:
    """Subgroup of Aut(Lambda^d) mapping L onto itself.

    Contains every integer translation; the point part is the set of signed
    permutations B with B*L = L.
    """
    d = L.dim
    reps = []
    for perm, sign in signed_permutations(d):
        B = AffineMap(perm, sign, (0,) * d)
        if L.transform(B).basis == L.basis:
            reps.append(B)
    zd = IntegerLattice.standard(d)
    unit_translations = [AffineMap.translation(tuple(1 if j == i else 0 for j in range(d)))
                         for i in range(d)]
    point_gens = reduce_point_generators(reps)
    return CrystGroup(d, tuple(point_gens + unit_translations), zd, tuple(reps))


def reduce_point_generators(elements: list[AffineMap]) -> list[AffineMap]:
    """Greedy generating subset of a closed list of linear maps."""
    if not elements:
        return []
    d = elements[0].dim

    def close(keys: list) -> set:
        have = {(tuple(range(d)), (1,) * d)}
        queue = list(have)
        while queue:
            p1, s1 = queue.pop()
            for p2, s2 in keys:
                key = (tuple(p2[p1[i]] for i in range(d)),
                       tuple(s1[i] * s2[p1[i]] for i in range(d)))
                if key not in have:
                    have.add(key)
                    queue.append(key)
        return have

    gens: list[AffineMap] = []
    have = close([])
    for m in sorted(elements, key=lambda m: (m.perm, m.sign, m.trans)):
        if m.linear_key() in have:
            continue
        gens.append(m)
        have = close([g.linear_key() for g in gens])
    return gens


# -- generator images of the built-in presentations ------------------------------


def generator_images(d: int) -> dict[str, AffineMap]:
    """Exact affine images of the built-in presentation generators.

    The returned mapping is ordered by generator index.  For d=4 the fifth
    generator is conventionally called ``f`` (it is written ``e`` in word
    notation, which names letters positionally).
    """
    A = AffineMap.from_linear
    if d == 1:
        return {"a": AffineMap((0,), (1,), (1,)),
                "b": AffineMap((0,), (-1,), (0,))}
    if d == 2:
        return {
            "a": A([[-1, 0], [0, 1]]),
            "b": A([[1, 0], [0, -1]], [0, 1]),
            "c": A([[0, 1], [1, 0]]),
        }
    if d == 3:
        return {
            "a": A([[1, 0, 0], [0, 1, 0], [0, 0, -1]]),
            "b": A([[-1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 0, 0]),
            "c": A([[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
            "d": A([[1, 0, 0], [0, 0, 1], [0, 1, 0]]),
        }
    if d == 4:
        return {
            "a": A([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
            "b": A([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]),
            "c": A([[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                   [1, 0, 0, 0]),
            "d": A([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
            "f": A([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
        }
    raise ValueError(f"dimension must be 1..4, got {d}")


def image_list(d: int) -> tuple[AffineMap, ...]:
    return tuple(generator_images(d).values())


def word_to_affine(w: Word, images) -> AffineMap:
    """Left-to-right composition of generator images.

    ``images`` may be the mapping from :func:`generator_images` or any
    sequence aligned with generator indices.
    """
    if isinstance(images, dict):
        images = tuple(images.values())
    d = images[0].dim
    out = AffineMap.identity(d)
    for k in w.letters:
        if abs(k) > len(images):
            raise ValueError(f"word references generator {abs(k)} beyond the image map")
        m = images[abs(k) - 1]
        out = affine_compose(out, m if k > 0 else affine_inverse(m))
    return out


def full_group(d: int) -> CrystGroup:
    """Aut(Lambda^d) as an explicit CrystGroup."""
    gens = list(image_list(d))
    gens.extend(AffineMap.translation(tuple(1 if j == i else 0 for j in range(d)))
                for i in range(d))
    return group_from_generators(d, gens)


def validate_generator_images(d: int) -> None:
    """Check Table-consistency: relators map to the identity and the image
    group is the full lattice symmetry group, unit translations included."""
    pres = make_presentation(d)
    images = image_list(d)
    for r in pres.relators:
        if not word_to_affine(r, images).is_identity():
            raise AssertionError(f"relator {r} does not map to the identity in d={d}")
    g = group_from_generators(d, images)
    if g.lattice.index != 1 or g.point_order != hyperoctahedral_order(d):
        raise AssertionError(f"generator images do not generate Aut(Lambda^{d})")
    for i in range(d):
        t = AffineMap.translation(tuple(1 if j == i else 0 for j in range(d)))
        if not contains(g, t):
            raise AssertionError(f"unit translation {i} missing from image group")


def group_from_coset_table(d: int, table, images=None) -> CrystGroup:
    """Affine realization of the coset-0 stabilizer of a closed coset table.

    Builds affine transversal representatives in one BFS pass, then filters
    the Schreier generators through an incremental closure, so the cost stays
    near-linear in the table size.
    """
    if images is None:
        images = image_list(d)
    if isinstance(images, dict):
        images = tuple(images.values())
    n = table.index
    inv_action = table.inverse_action()
    trans_aff: list[AffineMap | None] = [None] * n
    trans_aff[0] = AffineMap.identity(d)
    queue = [0]
    while queue:
        c = queue.pop(0)
        for g in range(len(table.action)):
            img = table.action[g][c]
            if trans_aff[img] is None:
                trans_aff[img] = affine_compose(trans_aff[c], images[g])
                queue.append(img)
            img = inv_action[g][c]
            if trans_aff[img] is None:
                trans_aff[img] = affine_compose(trans_aff[c], affine_inverse(images[g]))
                queue.append(img)
    clo = _Closure(d)
    accepted: list[AffineMap] = []
    for c in range(n):
        for g in range(len(table.action)):
            m = affine_compose(affine_compose(trans_aff[c], images[g]),
                               affine_inverse(trans_aff[table.action[g][c]]))
            if m.is_identity():
                continue
            if clo.add(m):
                accepted.append(m)
    if clo.kernel.rank < d:
        raise RankDeficientLattice("subgroup has no full-rank translation lattice")
    return clo.finish(tuple(accepted))


# -- isomorphism-invariant fingerprints ------------------------------------------


@dataclass(frozen=True)
class GroupFingerprint:
    """Cheap isomorphism invariants of a finite group (not a certified name)."""

    order: int
    abelian_invariants: tuple[int, ...]
    element_orders: tuple[tuple[int, int], ...]
    center_order: int

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "abelian_invariants": list(self.abelian_invariants),
            "element_orders": {str(k): v for k, v in self.element_orders},
            "center_order": self.center_order,
        }


def group_fingerprint(elements, mul=None) -> GroupFingerprint:
    """Fingerprint a finite group given as a closed element list.

    ``elements`` may be AffineMaps (multiplied exactly), (perm, sign) linear
    parts, or permutation tuples; ``mul`` overrides the multiplication.
    """
    elements = list(elements)
    if mul is None:
        mul = _default_mul(elements[0])
    elems = set(elements)
    if len(elems) != len(elements):
        raise ValueError("element list contains duplicates")
    for x in elements:
        for y in elements:
            if mul(x, y) not in elems:
                raise ValueError("element list is not closed under the product")
    identity = next(x for x in elements if mul(x, x) == x)

    orders = {}
    for x in elements:
        k, p = 1, x
        while p != identity:
            p = mul(p, x)
            k += 1
        orders[x] = k
    histogram: dict[int, int] = {}
    for k in orders.values():
        histogram[k] = histogram.get(k, 0) + 1

    center = sum(1 for x in elements
                 if all(mul(x, y) == mul(y, x) for y in elements))

    inverse = {x: _power(x, orders[x] - 1, mul, identity) for x in elements}
    commutators = {mul(mul(inverse[x], inverse[y]), mul(x, y))
                   for x in elements for y in elements}
    derived = _subgroup_closure(commutators, mul, identity)
    invariants = _abelian_invariants_of_quotient(elements, derived, mul, inverse)

    return GroupFingerprint(
        order=len(elements),
        abelian_invariants=tuple(invariants),
        element_orders=tuple(sorted(histogram.items())),
        center_order=center,
    )


def _default_mul(sample):
    if isinstance(sample, AffineMap):
        return affine_compose
    if isinstance(sample, tuple) and sample and isinstance(sample[0], tuple):
        def mul(a, b):  # (perm, sign) linear parts
            p1, s1 = a
            p2, s2 = b
            return (tuple(p2[p1[i]] for i in range(len(p1))),
                    tuple(s1[i] * s2[p1[i]] for i in range(len(p1))))
        return mul
    def mul(a, b):  # permutation tuples composed left to right: (a*b)(i)=b(a(i))
        return tuple(b[a[i]] for i in range(len(a)))
    return mul


def _power(x, k, mul, identity):
    out = identity
    for _ in range(k):
        out = mul(out, x)
    return out


def _subgroup_closure(seed, mul, identity):
    out = set(seed)
    out.add(identity)
    queue = list(out)
    while queue:
        a = queue.pop()
        for b in list(out):
            for c in (mul(a, b), mul(b, a)):
                if c not in out:
                    out.add(c)
                    queue.append(c)
    return out


def _abelian_invariants_of_quotient(elements, derived, mul, inverse):
    """Invariant factors of G/[G,G] from its element-order statistics."""
    # cosets of the derived subgroup
    coset_of: dict = {}
    cosets: list[set] = []
    for x in elements:
        if x in coset_of:
            continue
        cs = {mul(x, h) for h in derived}
        idx = len(cosets)
        cosets.append(cs)
        for y in cs:
            coset_of[y] = idx
    q = len(cosets)
    if q == 1:
        return ()
    id_coset = coset_of[next(iter(derived))]
    rep = [next(iter(cs)) for cs in cosets]

    def q_mul(i, j):
        return coset_of[mul(rep[i], rep[j])]

    q_orders = []
    for i in range(q):
        k, p = 1, i
        while p != id_coset:
            p = q_mul(p, i)
            k += 1
        q_orders.append(k)
    return _abelian_invariants_from_orders(q_orders)


def _abelian_invariants_from_orders(q_orders) -> tuple[int, ...]:
    """Invariant factors of an abelian group from its element orders.

    For each prime, the counts N_j = #{x : x^(p^j) = 1} determine the
    multiset of cyclic p-factor exponents; primes are then interleaved into
    invariant factors d_1 | d_2 | ... .
    """
    n = len(q_orders)
    exps_by_prime: dict[int, list[int]] = {}
    for p in _prime_factors(n):
        p_part = sum(1 for o in q_orders if _is_p_power(o, p))
        e: list[int] = []  # e[j-1] = number of cyclic p-factors of exponent >= j
        prev, j = 1, 1
        while prev < p_part:
            pj = p ** j
            nj = sum(1 for o in q_orders if _is_p_power(o, p) and o <= pj)
            e.append(_intlog(nj // prev, p))
            prev = nj
            j += 1
        exponents = [sum(1 for ej in e if ej >= i + 1) for i in range(e[0] if e else 0)]
        exps_by_prime[p] = sorted(exponents, reverse=True)

    width = max(len(v) for v in exps_by_prime.values())
    invariants = []
    for pos in range(width):
        val = 1
        for p, exps in exps_by_prime.items():
            if pos < len(exps):
                val *= p ** exps[pos]
        invariants.append(val)
    invariants.sort()
    return tuple(v for v in invariants if v > 1)


def _is_p_power(o, p):
    while o % p == 0:
        o //= p
    return o == 1


def _intlog(n, p):
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def _prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out
