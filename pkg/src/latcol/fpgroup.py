"""Finitely presented groups over (mostly) involutive generators.

Words are tuples of signed 1-based generator numbers: ``+k`` is generator
``k-1``, ``-k`` its formal inverse.  The built-in presentations describe the
full symmetry groups of the cubic lattices in dimensions 1..4; all their
generators except the dimension-1 translation are involutions, which the
coset-table machinery exploits by giving involutions a single table column.

Coset enumeration follows the relator-based (HLT) strategy with lookahead,
with a coset-table based (Felsch) strategy available behind a flag; both end
with a breadth-first renumbering so identical subgroups yield identical
tables.  Low-index subgroup search lives in :mod:`latcol._lowindex`.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

from latcol import _lowindex

GENERATOR_NAMES = "abcdefghijklmnopqrstuvwxyz"


class EnumerationOverflow(RuntimeError):
    """Coset table could not be closed within the allowed number of cosets."""


class NodeBudgetExceeded(RuntimeError):
    """Low-index search exceeded its node budget."""


@dataclass(frozen=True)
class Word:
    """A word in the free group: signed 1-based generator letters."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if any(k == 0 for k in self.letters):
            raise ValueError("letter 0 is not a valid generator reference")

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse e.g. ``"abA"``, ``"(cb)^4"`` or ``"a^2 b"`` (uppercase = inverse)."""
        letters = _parse_word(text)
        return Word(tuple(letters))

    def __str__(self) -> str:
        out = []
        for k in self.letters:
            name = GENERATOR_NAMES[abs(k) - 1]
            out.append(name if k > 0 else name.upper())
        return "".join(out) or "<id>"

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> "Word":
        return Word(tuple(-k for k in reversed(self.letters)))

    def reduced(self) -> "Word":
        """Freely reduced form (cancel adjacent x x^-1)."""
        out: list[int] = []
        for k in self.letters:
            if out and out[-1] == -k:
                out.pop()
            else:
                out.append(k)
        return Word(tuple(out))

    def reduced_involutive(self, involutions) -> "Word":
        """Reduction treating the flagged generators as self-inverse."""
        out: list[int] = []
        for k in self.letters:
            if k < 0 and involutions[-k - 1]:
                k = -k
            if out and (out[-1] == -k
                        or (k > 0 and involutions[k - 1] and out[-1] == k)):
                out.pop()
            else:
                out.append(k)
        return Word(tuple(out))

    def cyclically_reduced(self) -> "Word":
        w = list(self.reduced().letters)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return Word(tuple(w))

    def max_generator(self) -> int:
        return max((abs(k) for k in self.letters), default=0)


def _parse_word(text: str) -> list[int]:
    text = text.replace(" ", "")
    pos = 0

    def parse_seq(stop_at_paren: bool) -> list[int]:
        nonlocal pos
        out: list[int] = []
        while pos < len(text):
            ch = text[pos]
            if ch == ")":
                if not stop_at_paren:
                    raise ValueError(f"unbalanced ')' in {text!r}")
                return out
            if ch == "(":
                pos += 1
                grp = parse_seq(True)
                if pos >= len(text) or text[pos] != ")":
                    raise ValueError(f"unbalanced '(' in {text!r}")
                pos += 1
                out.extend(_apply_power(grp, parse_power()))
            elif ch.isalpha():
                pos += 1
                k = GENERATOR_NAMES.index(ch.lower()) + 1
                if ch.isupper():
                    k = -k
                out.extend(_apply_power([k], parse_power()))
            else:
                raise ValueError(f"unexpected character {ch!r} in {text!r}")
        return out

    def parse_power() -> int:
        nonlocal pos
        if pos < len(text) and text[pos] == "^":
            pos += 1
            start = pos
            if pos < len(text) and text[pos] == "-":
                pos += 1
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            if pos == start:
                raise ValueError(f"missing exponent in {text!r}")
            return int(text[start:pos])
        return 1

    out = parse_seq(False)
    return out


def _apply_power(letters: list[int], n: int) -> list[int]:
    if n >= 0:
        return letters * n
    inv = [-k for k in reversed(letters)]
    return inv * (-n)


@dataclass(frozen=True)
class Presentation:
    """A finite presentation: ``generator_count`` generators and relators."""

    generator_count: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        if self.generator_count < 1:
            raise ValueError("need at least one generator")
        for r in self.relators:
            if not r.letters:
                raise ValueError("relators must be nonempty")
            if r.max_generator() > self.generator_count:
                raise ValueError(f"relator {r} references unknown generator")

    def involutions(self) -> tuple[bool, ...]:
        """Which generators carry an explicit g^2 relator."""
        inv = [False] * self.generator_count
        for r in self.relators:
            w = r.cyclically_reduced().letters
            if len(w) == 2 and abs(w[0]) == abs(w[1]) and w[0] == w[1]:
                inv[abs(w[0]) - 1] = True
        return tuple(inv)

    def to_text(self) -> str:
        lines = [f"generators: {self.generator_count}"]
        lines.extend(str(r) for r in self.relators)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "Presentation":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines or not lines[0].startswith("generators:"):
            raise ValueError("first line must be 'generators: <count>'")
        count = int(lines[0].split(":", 1)[1])
        relators = tuple(Word.parse(ln) for ln in lines[1:])
        return Presentation(count, relators)


def make_presentation(d: int) -> Presentation:
    """Presentation of the full symmetry group of the d-dimensional cubic lattice.

    d=1 is the infinite dihedral group on a translation and a point
    inversion; d=2..4 are Coxeter-style presentations on reflections.
    """
    W = Word.parse
    if d == 1:
        return Presentation(2, (W("b^2"), W("abab")))
    if d == 2:
        return Presentation(3, (W("a^2"), W("b^2"), W("c^2"),
                                W("(ba)^2"), W("(cb)^4"), W("(ca)^4")))
    if d == 3:
        return Presentation(4, (W("a^2"), W("b^2"), W("c^2"), W("d^2"),
                                W("(ac)^2"), W("(bd)^2"), W("(ba)^2"),
                                W("(cd)^3"), W("(da)^4"), W("(cb)^4")))
    if d == 4:
        return Presentation(5, (W("a^2"), W("b^2"), W("c^2"), W("d^2"), W("e^2"),
                                W("(ba)^2"), W("(cd)^2"), W("(cb)^2"),
                                W("(ae)^2"), W("(ce)^2"), W("(de)^3"),
                                W("(da)^3"), W("(debe)^2"),
                                W("(ca)^4"), W("(db)^4"), W("(be)^4")))
    raise ValueError(f"dimension must be 1..4, got {d}")


# -- coset tables -------------------------------------------------------------


@dataclass(frozen=True)
class CosetTable:
    """A closed coset table: the action of the group on cosets 0..index-1.

    Coset 0 is the subgroup itself.  ``action[g][c]`` is the image of coset
    ``c`` under generator ``g``; ``subgroup_words`` generate the stabilizer
    of coset 0.
    """

    index: int
    action: tuple[tuple[int, ...], ...]
    subgroup_words: tuple[Word, ...] = ()

    def inverse_action(self) -> tuple[tuple[int, ...], ...]:
        inv = []
        for perm in self.action:
            out = [0] * self.index
            for i, j in enumerate(perm):
                out[j] = i
            inv.append(tuple(out))
        return tuple(inv)

    def trace(self, coset: int, word: Word) -> int:
        inv = None
        for k in word.letters:
            if k > 0:
                coset = self.action[k - 1][coset]
            else:
                if inv is None:
                    inv = self.inverse_action()
                coset = inv[-k - 1][coset]
        return coset

    def word_acts_trivially(self, word: Word) -> bool:
        return all(self.trace(c, word) == c for c in range(self.index))

    def validate(self, pres: Presentation) -> None:
        """Raise if the table is not a closed consistent table for ``pres``."""
        if len(self.action) != pres.generator_count:
            raise ValueError("generator count mismatch")
        for perm in self.action:
            if sorted(perm) != list(range(self.index)):
                raise ValueError("action columns must be permutations")
        for r in pres.relators:
            if not self.word_acts_trivially(r):
                raise ValueError(f"relator {r} does not act trivially")
        for w in self.subgroup_words:
            if self.trace(0, w) != 0:
                raise ValueError(f"subgroup word {w} does not fix coset 0")

    def transversal_words(self) -> tuple[Word, ...]:
        """BFS coset representatives: words w with 0 * w = coset."""
        inv = self.inverse_action()
        words: list[Word | None] = [None] * self.index
        words[0] = Word()
        queue = [0]
        while queue:
            c = queue.pop(0)
            for g in range(len(self.action)):
                for img, letter in ((self.action[g][c], g + 1), (inv[g][c], -g - 1)):
                    if words[img] is None:
                        words[img] = Word(words[c].letters + (letter,))
                        queue.append(img)
        return tuple(words)  # type: ignore[arg-type]

    def schreier_generators(self, involutions=None) -> tuple[Word, ...]:
        """Freely nontrivial Schreier generators of the coset-0 stabilizer."""
        trans = self.transversal_words()
        seen: set[tuple[int, ...]] = set()
        out: list[Word] = []
        for c in range(self.index):
            for g in range(len(self.action)):
                w = Word(trans[c].letters + (g + 1,)) * trans[self.action[g][c]].inverse()
                w = w.reduced() if involutions is None else w.reduced_involutive(involutions)
                if not w.letters:
                    continue
                key = min(w.letters, w.inverse().letters)
                if key in seen:
                    continue
                seen.add(key)
                out.append(w)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "action": [list(p) for p in self.action],
            "subgroup_words": [str(w) for w in self.subgroup_words],
        }

    @staticmethod
    def from_json(data: dict) -> "CosetTable":
        return CosetTable(
            index=int(data["index"]),
            action=tuple(tuple(int(x) for x in p) for p in data["action"]),
            subgroup_words=tuple(Word.parse(s) for s in data["subgroup_words"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class SubgroupRecord:
    """A conjugacy-class representative found by the low-index search.

    ``canonical_table_form`` is the flattened coset table minimized over all
    base-coset choices; two records have equal forms exactly when the
    subgroups are conjugate in the parent group.
    """

    coset_table: CosetTable
    canonical_table_form: bytes

    @property
    def index(self) -> int:
        return self.coset_table.index


# -- column layout shared by the enumerators ----------------------------------


class _Columns:
    """Table column layout: one column per involution, two otherwise."""

    def __init__(self, pres: Presentation):
        self.pres = pres
        self.involutions = pres.involutions()
        self.fwd: list[int] = []
        self.bwd: list[int] = []
        col = 0
        for g in range(pres.generator_count):
            self.fwd.append(col)
            if self.involutions[g]:
                self.bwd.append(col)
                col += 1
            else:
                self.bwd.append(col + 1)
                col += 2
        self.width = col
        self.inv_col = [0] * col
        for g in range(pres.generator_count):
            self.inv_col[self.fwd[g]] = self.bwd[g]
            self.inv_col[self.bwd[g]] = self.fwd[g]

    def word_cols(self, word: Word) -> list[int]:
        return [self.fwd[k - 1] if k > 0 else self.bwd[-k - 1] for k in word.letters]

    def scan_relators(self) -> list[tuple[int, ...]]:
        """Relators as column words, omitting the implicit involution squares."""
        out = []
        for r in self.pres.relators:
            w = r.cyclically_reduced()
            if not w.letters:
                continue
            if (len(w.letters) == 2 and w.letters[0] == w.letters[1]
                    and self.involutions[abs(w.letters[0]) - 1]):
                continue
            out.append(tuple(self.word_cols(w)))
        return out

    def rotations_by_col(self) -> list[list[tuple[int, ...]]]:
        """All cyclic rotations of relators and inverses, grouped by first column."""
        rots: set[tuple[int, ...]] = set()
        for cols in self.scan_relators():
            inv = tuple(self.inv_col[c] for c in reversed(cols))
            for word in (cols, inv):
                for i in range(len(word)):
                    rots.add(word[i:] + word[:i])
        by_col: list[list[tuple[int, ...]]] = [[] for _ in range(self.width)]
        for rot in sorted(rots):
            by_col[rot[0]].append(rot)
        return by_col


# -- Todd-Coxeter coset enumeration -------------------------------------------


class _Enumerator:
    """Mutable coset table with coincidence handling (union-find over cosets)."""

    def __init__(self, cols: _Columns, max_cosets: int):
        self.cols = cols
        self.width = cols.width
        self.max_cosets = max_cosets
        self.table: list[list[int]] = [[-1] * self.width]
        self.p: list[int] = [0]
        self.n_live = 1
        self.deductions: list[tuple[int, int]] = []

    def rep(self, c: int) -> int:
        p = self.p
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def define(self, alpha: int, col: int) -> int:
        if len(self.table) >= self.max_cosets:
            raise EnumerationOverflow(
                f"enumeration needs more than {self.max_cosets} cosets")
        beta = len(self.table)
        self.table.append([-1] * self.width)
        self.p.append(beta)
        self.n_live += 1
        self.table[alpha][col] = beta
        self.table[beta][self.cols.inv_col[col]] = alpha
        self.deductions.append((alpha, col))
        return beta

    def merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.p[b] = a
        self.n_live -= 1
        queue.append(b)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self.merge(a, b, queue)
        inv_col = self.cols.inv_col
        while queue:
            gamma = queue.pop(0)
            row = self.table[gamma]
            for col in range(self.width):
                delta = row[col]
                if delta == -1:
                    continue
                self.table[delta][inv_col[col]] = -1
                mu, nu = self.rep(gamma), self.rep(delta)
                ex = self.table[mu][col]
                if ex != -1:
                    self.merge(nu, ex, queue)
                elif self.table[nu][inv_col[col]] != -1:
                    self.merge(mu, self.table[nu][inv_col[col]], queue)
                else:
                    self.table[mu][col] = nu
                    self.table[nu][inv_col[col]] = mu
                    self.deductions.append((mu, col))

    def scan(self, alpha: int, cols: tuple[int, ...], fill: bool) -> None:
        inv_col = self.cols.inv_col
        f, i = alpha, 0
        b, j = alpha, len(cols) - 1
        while True:
            while i <= j and self.table[f][cols[i]] != -1:
                f = self.table[f][cols[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and self.table[b][inv_col[cols[j]]] != -1:
                b = self.table[b][inv_col[cols[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                self.table[f][cols[i]] = b
                self.table[b][inv_col[cols[i]]] = f
                self.deductions.append((f, cols[i]))
                return
            if not fill:
                return
            self.define(f, cols[i])

    def lookahead(self, relator_cols: list[tuple[int, ...]]) -> None:
        for alpha in range(len(self.table)):
            if self.p[alpha] != alpha:
                continue
            for cols in relator_cols:
                self.scan(alpha, cols, fill=False)
                if self.p[alpha] != alpha:
                    break

    def process_deductions(self, by_col: list[list[tuple[int, ...]]]) -> None:
        inv_col = self.cols.inv_col
        while self.deductions:
            alpha, col = self.deductions.pop()
            if self.p[alpha] == alpha:
                for rot in by_col[col]:
                    self.scan(alpha, rot, fill=False)
                    if self.p[alpha] != alpha:
                        break
            beta = self.table[self.rep(alpha)][col]
            if beta != -1 and self.p[beta] == beta:
                for rot in by_col[inv_col[col]]:
                    self.scan(beta, rot, fill=False)
                    if self.p[beta] != beta:
                        break

    def compressed_standardized(self) -> list[list[int]]:
        live = [c for c in range(len(self.table)) if self.p[c] == c]
        remap = {c: i for i, c in enumerate(live)}
        table = [[remap[self.rep(self.table[c][col])] for col in range(self.width)]
                 for c in live]
        # breadth-first renumbering from coset 0, columns scanned in order
        order = [0]
        seen = {0}
        for c in order:
            for col in range(self.width):
                img = table[c][col]
                if img not in seen:
                    seen.add(img)
                    order.append(img)
        sigma = {c: i for i, c in enumerate(order)}
        return [[sigma[table[c][col]] for col in range(self.width)] for c in order]


def coset_enumerate(pres: Presentation, subgen: list[Word], max_cosets: int,
                    strategy: str = "hlt") -> CosetTable:
    """Enumerate cosets of the subgroup generated by ``subgen``.

    Raises :class:`EnumerationOverflow` if the table cannot be closed within
    ``max_cosets`` live cosets; the result is renumbered in breadth-first
    discovery order, so it is deterministic and strategy-independent.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be >= 1")
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    cols = _Columns(pres)
    # headroom: intermediate tables may hold dead cosets awaiting compaction
    enum = _Enumerator(cols, max(4 * max_cosets, max_cosets + 64))
    relator_cols = cols.scan_relators()
    by_col = cols.rotations_by_col()
    sub_cols = [tuple(cols.word_cols(w.reduced())) for w in subgen if w.reduced().letters]

    def fail_if_overgrown():
        if enum.n_live > max_cosets:
            enum.lookahead(relator_cols)
            if enum.n_live > max_cosets:
                raise EnumerationOverflow(
                    f"coset table cannot be closed within {max_cosets} cosets")

    try:
        if strategy == "hlt":
            for w in sub_cols:
                enum.scan(0, w, fill=True)
            alpha = 0
            while alpha < len(enum.table):
                if enum.p[alpha] == alpha:
                    for cols_w in relator_cols:
                        enum.scan(alpha, cols_w, fill=True)
                        fail_if_overgrown()
                        if enum.p[alpha] != alpha:
                            break
                    if enum.p[alpha] == alpha:
                        for col in range(enum.width):
                            if enum.table[alpha][col] == -1:
                                enum.define(alpha, col)
                                fail_if_overgrown()
                alpha += 1
        else:
            for w in sub_cols:
                enum.scan(0, w, fill=True)
            enum.process_deductions(by_col)
            alpha = 0
            while alpha < len(enum.table):
                if enum.p[alpha] == alpha:
                    col = 0
                    while col < enum.width:
                        if enum.p[alpha] != alpha:
                            break
                        if enum.table[alpha][col] == -1:
                            enum.define(alpha, col)
                            enum.process_deductions(by_col)
                            fail_if_overgrown()
                        col += 1
                alpha += 1
    except EnumerationOverflow:
        raise
    # the table is closed; a final deduction pass is unnecessary for HLT since
    # every live row was scanned against every relator
    flat = enum.compressed_standardized()
    table = CosetTable(
        index=len(flat),
        action=tuple(tuple(row[cols.fwd[g]] for row in flat)
                     for g in range(pres.generator_count)),
        subgroup_words=tuple(subgen),
    )
    table.validate(pres)
    return table


# -- low-index subgroups -------------------------------------------------------


def canonical_table_form(pres_or_cols, table: CosetTable) -> bytes:
    """Flattened table minimized over all base-coset renumberings."""
    cols = pres_or_cols if isinstance(pres_or_cols, _Columns) else _Columns(pres_or_cols)
    flat = _flatten(cols, table)
    n, w = table.index, cols.width
    best = None
    for base in range(n):
        cand = _standardize_flat(flat, n, w, base)
        if best is None or cand < best:
            best = cand
    return _pack_form(best)


def _flatten(cols: _Columns, table: CosetTable) -> list[int]:
    inv = table.inverse_action()
    flat = [0] * (table.index * cols.width)
    for c in range(table.index):
        for g in range(len(table.action)):
            flat[c * cols.width + cols.fwd[g]] = table.action[g][c]
            flat[c * cols.width + cols.bwd[g]] = inv[g][c]
    return flat


def _standardize_flat(flat: list[int], n: int, w: int, base: int) -> tuple[int, ...]:
    sigma = [-1] * n
    order = [base]
    sigma[base] = 0
    out = []
    for k in range(n):
        o = order[k]
        for col in range(w):
            v = flat[o * w + col]
            if sigma[v] == -1:
                sigma[v] = len(order)
                order.append(v)
            out.append(sigma[v])
    return tuple(out)


def _pack_form(entries) -> bytes:
    return struct.pack(f">{len(entries)}H", *entries)


def low_index_subgroups(pres: Presentation, max_index: int,
                        node_budget: int | None = None) -> list[SubgroupRecord]:
    """All subgroups of index <= max_index, one per conjugacy class.

    Records are sorted by (index, canonical_table_form).  The search walks
    standardized partial coset tables depth-first and prunes branches that
    cannot be first in their conjugacy class, so each class surfaces exactly
    once.  Raises :class:`NodeBudgetExceeded` when the configurable node
    budget runs out rather than returning a truncated list.
    """
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    if max_index >= 1 << 16:
        raise ValueError("max_index beyond 65535 is not supported")
    if node_budget is None:
        node_budget = _lowindex.default_node_budget()
    cols = _Columns(pres)
    tables, nodes, status = _lowindex.search(
        width=cols.width,
        inv_col=cols.inv_col,
        max_index=max_index,
        rotations_by_col=cols.rotations_by_col(),
        node_budget=node_budget,
    )
    if status == _lowindex.STATUS_BUDGET:
        raise NodeBudgetExceeded(
            f"low-index search exceeded the node budget of {node_budget}; "
            "raise LATCOL_NODE_BUDGET to continue")
    involutions = pres.involutions()
    records = []
    for flat in tables:
        n = len(flat) // cols.width
        action = tuple(
            tuple(int(flat[c * cols.width + cols.fwd[g]]) for c in range(n))
            for g in range(pres.generator_count))
        table = CosetTable(index=n, action=action)
        table = CosetTable(index=n, action=action,
                           subgroup_words=table.schreier_generators(involutions))
        records.append(SubgroupRecord(table, _pack_form([int(x) for x in flat])))
    records.sort(key=lambda r: (r.index, r.canonical_table_form))
    for a, b in zip(records, records[1:]):
        if a.canonical_table_form == b.canonical_table_form:
            raise AssertionError("duplicate conjugacy class escaped the search")
    return records


# -- Reidemeister-Schreier ------------------------------------------------------


def reidemeister_schreier(pres: Presentation, table: CosetTable,
                          simplify: bool = True) -> tuple[Presentation, list[Word]]:
    """Present the subgroup given by a closed coset table.

    Returns the subgroup presentation on Schreier generators together with
    each generator's expression as a word in the parent's generators.  Light
    cleanup only: trivial and singly-occurring generators are eliminated, no
    further Tietze simplification.
    """
    table.validate(pres)
    cols = _Columns(pres)
    inv_action = table.inverse_action()
    trans = table.transversal_words()

    # tree edges are those whose Schreier word freely reduces to nothing
    gen_of_edge: dict[tuple[int, int], int] = {}
    expressions: list[Word] = []
    for c in range(table.index):
        for g in range(pres.generator_count):
            img = table.action[g][c]
            w = (Word(trans[c].letters + (g + 1,)) * trans[img].inverse()).reduced()
            if not w.letters:
                gen_of_edge[(c, g)] = 0
                continue
            idx = len(expressions) + 1
            expressions.append(w)
            gen_of_edge[(c, g)] = idx

    def rewrite_from(coset: int, relator: Word) -> Word:
        out: list[int] = []
        c = coset
        for k in relator.letters:
            g = abs(k) - 1
            if k > 0:
                s = gen_of_edge[(c, g)]
                if s:
                    out.append(s)
                c = table.action[g][c]
            else:
                c = inv_action[g][c]
                s = gen_of_edge[(c, g)]
                if s:
                    out.append(-s)
        return Word(tuple(out)).reduced()

    relators: list[Word] = []
    seen: set[tuple[int, ...]] = set()
    for c in range(table.index):
        for r in pres.relators:
            w = rewrite_from(c, r).cyclically_reduced()
            if not w.letters:
                continue
            key = _cyclic_key(w)
            if key not in seen:
                seen.add(key)
                relators.append(w)

    if not expressions:
        # index-1 table of the trivial presentation edge case cannot occur
        # (tree edges only happen for index > 1 targets); keep a guard anyway
        return Presentation(pres.generator_count, pres.relators), [
            Word((g + 1,)) for g in range(pres.generator_count)]

    sub = Presentation(len(expressions), tuple(relators))
    if simplify:
        sub, expressions = _eliminate_redundant(sub, expressions)
    return sub, expressions


def _cyclic_key(w: Word) -> tuple[int, ...]:
    best = None
    for word in (w.letters, w.inverse().letters):
        for i in range(len(word)):
            rot = word[i:] + word[:i]
            if best is None or rot < best:
                best = rot
    return best


def _eliminate_redundant(pres: Presentation,
                         expressions: list[Word]) -> tuple[Presentation, list[Word]]:
    """Drop generators that some relator expresses in terms of the others."""
    relators = [r for r in pres.relators]
    exprs = list(expressions)
    alive = list(range(1, pres.generator_count + 1))
    changed = True
    while changed:
        changed = False
        # find a relator in which some generator occurs exactly once
        for ri, r in enumerate(relators):
            counts: dict[int, int] = {}
            for k in r.letters:
                counts[abs(k)] = counts.get(abs(k), 0) + 1
            single = [g for g, c in counts.items() if c == 1]
            if not single:
                continue
            # eliminate the highest-numbered such generator, deterministic
            g = max(single)
            pos = next(i for i, k in enumerate(r.letters) if abs(k) == g)
            rest = r.letters[pos + 1:] + r.letters[:pos]
            # r = u g v (cyclically) with g once: g = u^-1 v^-1 => g -> rest^-1
            repl = Word(rest).inverse() if r.letters[pos] > 0 else Word(rest)
            del relators[ri]
            relators = [_substitute(w, g, repl) for w in relators]
            relators = [w for w in (r2.cyclically_reduced() for r2 in relators)
                        if w.letters]
            alive.remove(g)
            changed = True
            break
    # renumber remaining generators densely
    remap = {g: i + 1 for i, g in enumerate(alive)}
    relators = [Word(tuple((remap[abs(k)] if k > 0 else -remap[abs(k)])
                           for k in w.letters)) for w in relators]
    seen: set[tuple[int, ...]] = set()
    uniq = []
    for w in relators:
        key = _cyclic_key(w)
        if key not in seen:
            seen.add(key)
            uniq.append(w)
    exprs = [exprs[g - 1] for g in alive]
    if not alive:
        # the subgroup is trivial; keep one generator with a killing relator
        return Presentation(1, (Word((1,)),)), [Word()]
    return Presentation(len(alive), tuple(uniq)), exprs


def _substitute(w: Word, g: int, repl: Word) -> Word:
    out: list[int] = []
    for k in w.letters:
        if abs(k) != g:
            out.append(k)
        elif k > 0:
            out.extend(repl.letters)
        else:
            out.extend(repl.inverse().letters)
    return Word(tuple(out)).reduced()


def verify_subgroup_presentation(pres: Presentation, table: CosetTable,
                                 sub: Presentation, expressions: list[Word]) -> None:
    """Check RS output: substituted relators act trivially on the whole table."""
    if len(expressions) != sub.generator_count:
        raise ValueError("one expression per subgroup generator required")
    for w in expressions:
        if table.trace(0, w) != 0:
            raise ValueError(f"expression {w} does not fix coset 0")
    for r in sub.relators:
        parent = Word()
        for k in r.letters:
            e = expressions[abs(k) - 1]
            parent = parent * (e if k > 0 else e.inverse())
        if not table.word_acts_trivially(parent.reduced()):
            raise ValueError(f"substituted relator {r} is not parent-trivial")
