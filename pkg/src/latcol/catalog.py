"""Pipeline driver: enumeration runs, censuses, verification, reports.

A catalog run chains the whole machinery: low-index subgroup search on the
built-in presentation, affine realization of each subgroup class, orbit
partitions on the torus, certificate deduplication, and per-class analysis.
Catalogs serialize to canonical JSON (sorted keys, no volatile fields), so
two runs with different worker counts produce byte-identical files; wall
time is reported on stderr only.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import sys
import time
from dataclasses import dataclass, field

from latcol import __version__
from latcol.crystgeom import (AffineMap, CrystGroup, GroupFingerprint,
                              affine_compose, affine_inverse, full_group,
                              group_from_coset_table, group_from_generators,
                              hyperoctahedral_order, image_list,
                              validate_generator_images, word_to_affine)
from latcol.fpgroup import (CosetTable, NodeBudgetExceeded,
                            low_index_subgroups, make_presentation,
                            reidemeister_schreier,
                            verify_subgroup_presentation)
from latcol.orbits import OrbitPartition, orbit_partition, proposition1_check
from latcol.partitions import (NeighbourhoodSignature, PartitionFlags,
                               PartitionRecord, aut_partition,
                               aut_partition_by_inclusion, build_record,
                               canonical_form, conjugate_group)


class BudgetExhausted(RuntimeError):
    """A search budget ran out; carries the pipeline stage for diagnostics."""

    def __init__(self, stage: str, detail: str):
        super().__init__(f"budget exhausted during {stage}: {detail}")
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one enumeration run."""

    dimension: int
    orbits: int
    max_index: int | None = None
    jobs: int = 1
    node_budget: int | None = None

    def index_bound(self) -> int:
        if self.max_index is not None:
            return self.max_index
        return self.orbits * hyperoctahedral_order(self.dimension)


@dataclass(frozen=True)
class Catalog:
    dimension: int
    orbit_count: int
    records: tuple[PartitionRecord, ...]
    provenance: dict

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "orbit_count": self.orbit_count,
            "records": [r.to_json() for r in self.records],
            "provenance": self.provenance,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")) + "\n"

    @staticmethod
    def from_json(data: dict) -> "Catalog":
        return Catalog(
            dimension=int(data["dimension"]),
            orbit_count=int(data["orbit_count"]),
            records=tuple(record_from_json(r) for r in data["records"]),
            provenance=dict(data["provenance"]),
        )

    @staticmethod
    def loads(text: str) -> "Catalog":
        return Catalog.from_json(json.loads(text))


def record_from_json(data: dict) -> PartitionRecord:
    sig = data["signatures"]
    return PartitionRecord(
        certificate=bytes.fromhex(data["certificate"]),
        partition=OrbitPartition.from_json(data["partition"]),
        subgroup=CrystGroup.from_json(data["subgroup"]),
        aut=CrystGroup.from_json(data["aut"]),
        i_t=int(data["i_t"]),
        i_k=int(data["i_k"]),
        flags=PartitionFlags(**data["flags"]),
        signature_r1=_signature_from_json(1, sig["radius_1"]),
        signature_r2=_signature_from_json(2, sig["radius_2"]),
        stabilizer_fingerprints=tuple(
            _fingerprint_from_json(f) for f in data["stabilizer_fingerprints"]),
    )


def _signature_from_json(radius: int, data) -> NeighbourhoodSignature:
    return NeighbourhoodSignature(
        radius, tuple(tuple(int(c) for c in word) for word in data))


def _fingerprint_from_json(data: dict) -> GroupFingerprint:
    return GroupFingerprint(
        order=int(data["order"]),
        abelian_invariants=tuple(int(x) for x in data["abelian_invariants"]),
        element_orders=tuple(sorted((int(k), int(v))
                                    for k, v in data["element_orders"].items())),
        center_order=int(data["center_order"]),
    )


# -- the main pipeline ----------------------------------------------------------


def _analyze_table(args):
    """Per-subgroup work: affine group, orbit count, certificate if it matches."""
    d, orbits, table = args
    group = group_from_coset_table(d, table)
    part = orbit_partition(group)
    if part.orbit_count != orbits:
        return None
    cert, _canon, witness = canonical_form(part)
    return group, part, cert, witness


def _map_jobs(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(fn, items, chunksize=max(1, len(items) // (jobs * 8)))


def enumerate_partitions(cfg: RunConfig) -> Catalog:
    """Full catalog of partitions of Lambda^d into exactly `orbits` orbits."""
    d, n = cfg.dimension, cfg.orbits
    validate_generator_images(d)
    pres = make_presentation(d)
    bound = cfg.index_bound()
    t0 = time.monotonic()
    try:
        subs = low_index_subgroups(pres, bound, cfg.node_budget)
    except NodeBudgetExceeded as exc:
        raise BudgetExhausted("low-index subgroup search", str(exc)) from exc

    analyzed = _map_jobs(_analyze_table,
                         [(d, n, rec.coset_table) for rec in subs], cfg.jobs)

    by_cert: dict[bytes, list] = {}
    for item in analyzed:
        if item is None:
            continue
        by_cert.setdefault(item[2], []).append(item)

    records = _map_jobs(_build_record_from_pair,
                        [by_cert[cert][0][:2] for cert in sorted(by_cert)],
                        cfg.jobs)
    records.sort(key=lambda r: r.certificate)

    # cross-check: the inclusion-maximal group per class must agree with the
    # normalizer-recipe result (only meaningful when the run was not truncated)
    if bound >= n * hyperoctahedral_order(d):
        triples = [(g, c, w) for items in by_cert.values() for g, _p, c, w in items]
        maximal = aut_partition_by_inclusion(triples)
        for rec in records:
            if maximal[rec.certificate] != rec.aut:
                raise AssertionError(
                    "inclusion-maximal group disagrees with aut_partition for "
                    + rec.certificate.hex())

    wall = time.monotonic() - t0
    provenance = {
        "tool": "latcol",
        "version": __version__,
        "dimension": d,
        "orbits": n,
        "max_index": bound,
        "presentation": pres.to_text(),
        "subgroup_classes_scanned": len(subs),
        "wall_time_s": None,  # kept out of the file so runs are byte-identical
    }
    catalog = Catalog(d, n, tuple(records), provenance)
    print(f"latcol: enumerated d={d} n={n} in {wall:.2f}s "
          f"({len(subs)} subgroup classes, {len(records)} partitions)",
          flush=True, file=sys.stderr)
    return catalog


def _build_record_from_pair(pair):
    group, part = pair
    return build_record(group, part)


def enumerate_node_transitive(d: int, node_budget: int | None = None,
                              long_run: bool = False, jobs: int = 1,
                              ) -> list[CrystGroup]:
    """All node-transitive subgroup classes (index divides 2^d d!)."""
    if d >= 4 and not long_run:
        raise ValueError("the d=4 transitive census needs the long-run flag")
    validate_generator_images(d)
    pres = make_presentation(d)
    try:
        subs = low_index_subgroups(pres, hyperoctahedral_order(d), node_budget)
    except NodeBudgetExceeded as exc:
        raise BudgetExhausted("transitive census low-index search", str(exc)) from exc
    analyzed = _map_jobs(_transitive_filter, [(d, rec.coset_table) for rec in subs],
                         jobs)
    return [g for g in analyzed if g is not None]


def _transitive_filter(args):
    d, table = args
    group = group_from_coset_table(d, table)
    if orbit_partition(group).orbit_count == 1:
        return group
    return None


# -- the two-step procedure -------------------------------------------------------


def two_step_enumerate(d: int = 4, n: int = 2, checkpoint: str | None = None,
                       node_budget: int | None = None, long_run: bool = False,
                       jobs: int = 1) -> Catalog:
    """Partitions via node-transitive groups and their bounded-index subgroups.

    For each node-transitive class G the subgroup is re-presented on Schreier
    generators and searched up to index n*|node stabilizer of G| (so index 2
    for trivial stabilizers, 4 for order-2 stabilizers when n=2).  Progress
    is checkpointed per transitive group into a JSON-lines file.
    """
    if d >= 4 and not long_run:
        raise ValueError("the d=4 two-step run needs the long-run flag")
    validate_generator_images(d)
    pres = make_presentation(d)
    images = image_list(d)
    hyper = hyperoctahedral_order(d)
    transitives = _transitive_tables(d, node_budget)

    done: dict[int, list] = {}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            for line in fh:
                entry = json.loads(line)
                done[entry["transitive"]] = entry["found"]

    ck = open(checkpoint, "a") if checkpoint else None
    by_cert: dict[bytes, CrystGroup] = {}
    try:
        for ti, table in enumerate(transitives):
            if ti in done:
                found = [(bytes.fromhex(f["cert"]), CrystGroup.from_json(f["subgroup"]))
                         for f in done[ti]]
            else:
                found = _two_step_one(d, n, pres, images, hyper, table, node_budget)
                if ck:
                    ck.write(json.dumps({
                        "transitive": ti,
                        "found": [{"cert": c.hex(), "subgroup": g.to_json()}
                                  for c, g in found],
                    }, sort_keys=True) + "\n")
                    ck.flush()
            for cert, group in found:
                if cert not in by_cert:
                    by_cert[cert] = group
    finally:
        if ck:
            ck.close()

    records = _map_jobs(_rebuild_record, [g for _c, g in sorted(by_cert.items())], jobs)
    records.sort(key=lambda r: r.certificate)
    provenance = {
        "tool": "latcol",
        "version": __version__,
        "dimension": d,
        "orbits": n,
        "max_index": None,
        "presentation": pres.to_text(),
        "method": "two-step",
        "transitive_classes": len(transitives),
        "wall_time_s": None,
    }
    return Catalog(d, n, tuple(records), provenance)


def _rebuild_record(group: CrystGroup) -> PartitionRecord:
    return build_record(group, orbit_partition(group))


def _transitive_tables(d: int, node_budget) -> list[CosetTable]:
    pres = make_presentation(d)
    try:
        subs = low_index_subgroups(pres, hyperoctahedral_order(d), node_budget)
    except NodeBudgetExceeded as exc:
        raise BudgetExhausted("transitive census low-index search", str(exc)) from exc
    out = []
    for rec in subs:
        group = group_from_coset_table(d, rec.coset_table)
        if orbit_partition(group).orbit_count == 1:
            out.append(rec.coset_table)
    return out


def _two_step_one(d, n, pres, images, hyper, table, node_budget):
    """Subgroups of one node-transitive group with exactly n orbits."""
    stab_order = hyper // table.index  # Proposition 1 for the transitive group
    bound = n * stab_order
    sub_pres, expressions = reidemeister_schreier(pres, table)
    verify_subgroup_presentation(pres, table, sub_pres, expressions)
    expr_maps = [word_to_affine(w, images) for w in expressions]
    try:
        subs = low_index_subgroups(sub_pres, bound, node_budget)
    except NodeBudgetExceeded as exc:
        raise BudgetExhausted(
            f"two-step low-index search inside transitive group of index {table.index}",
            str(exc)) from exc
    found = []
    for rec in subs:
        gens = []
        for w in rec.coset_table.subgroup_words:
            m = AffineMap.identity(d)
            for k in w.letters:
                e = expr_maps[abs(k) - 1]
                m = affine_compose(m, e if k > 0 else affine_inverse(e))
            gens.append(m)
        group = group_from_generators(d, gens)
        part = orbit_partition(group)
        if part.orbit_count != n:
            continue
        cert, _canon, witness = canonical_form(part)
        found.append((cert, conjugate_group(group, witness)))
    return found


# -- verification -----------------------------------------------------------------


@dataclass
class VerifyReport:
    checks: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def add(self, cert_hex: str, what: str):
        self.mismatches.append(f"{cert_hex[:16]}: {what}")


def verify_catalog(catalog: Catalog) -> VerifyReport:
    """Re-derive every record from its stored subgroup and compare."""
    report = VerifyReport()
    full = full_group(catalog.dimension)
    last = None
    for rec in catalog.records:
        h = rec.certificate.hex()
        report.checks += 1
        if last is not None and rec.certificate <= last:
            report.add(h, "records not sorted by certificate / duplicate")
        last = rec.certificate

        part = orbit_partition(rec.subgroup)
        if part.orbit_count != catalog.orbit_count:
            report.add(h, "stored subgroup has wrong orbit count")
            continue
        fresh = build_record(rec.subgroup, part)
        if fresh.certificate != rec.certificate:
            report.add(h, "certificate mismatch on recompute")
            continue
        if fresh.partition != rec.partition:
            report.add(h, "canonical partition mismatch")
        if fresh.aut != rec.aut:
            report.add(h, "stored Aut differs from recomputed Aut")
        if (fresh.i_t, fresh.i_k) != (rec.i_t, rec.i_k):
            report.add(h, "index decomposition mismatch")
        if fresh.flags != rec.flags:
            report.add(h, "flags mismatch")
        if (fresh.signature_r1 != rec.signature_r1
                or fresh.signature_r2 != rec.signature_r2):
            report.add(h, "neighbourhood signatures mismatch")
        if fresh.stabilizer_fingerprints != rec.stabilizer_fingerprints:
            report.add(h, "stabilizer fingerprints mismatch")

        # the stored Aut must be a fixed point of the recipe
        try:
            aut_again = aut_partition(rec.aut, orbit_partition(rec.aut))
            if aut_again != rec.aut:
                report.add(h, "stored Aut is not a fixed point of aut_partition")
        except (ValueError, AssertionError) as exc:
            report.add(h, f"stored Aut rejected: {exc}")

        if not proposition1_check(full, rec.subgroup).ok:
            report.add(h, "Proposition 1 fails for the stored subgroup")
        p1 = proposition1_check(full, rec.aut)
        if not p1.ok or p1.index != rec.i_t * rec.i_k:
            report.add(h, "Proposition 1 fails for the stored Aut")
    return report


# -- rendering and reporting --------------------------------------------------------


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _color_hex(i: int) -> str:
    if i < len(_PALETTE):
        return _PALETTE[i]
    # deterministic extension: golden-angle hue walk
    hue = (i * 137.508) % 360.0
    c = 0.55
    x = c * (1 - abs((hue / 60.0) % 2 - 1))
    seg = int(hue // 60) % 6
    rgb = [(c, x, 0), (x, c, 0), (0, c, x), (0, x, c), (x, 0, c), (c, 0, x)][seg]
    return "#" + "".join(f"{int((v + 0.35) * 255):02x}" for v in rgb)


def render_svg(record: PartitionRecord, window: int, cell: int = 24) -> str:
    """SVG of a window x window patch of a square-lattice partition."""
    part = record.partition
    if part.dim != 2:
        raise ValueError("SVG rendering is only defined for d=2 partitions")
    size = window * cell
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    for y in range(window):
        for x in range(window):
            c = part.color_of((x, y))
            px = x * cell
            py = (window - 1 - y) * cell
            lines.append(
                f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" '
                f'fill="{_color_hex(c)}" stroke="#222" stroke-width="1"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def report_tables(catalog: Catalog) -> str:
    """Human-readable per-record table, ordered by certificate."""
    head = (f"partitions of the {catalog.dimension}-dimensional cubic lattice "
            f"into {catalog.orbit_count} orbits: {len(catalog.records)} classes")
    cols = f"{'certificate':<18} {'index':<8} {'sizes':<12} {'flags':<7} " \
           f"{'|Aut pt|':<9} {'stab orders':<14} r1 signature"
    lines = [head, cols, "-" * len(cols)]
    for rec in catalog.records:
        flags = "".join((
            "P" if rec.flags.proper_colouring else "-",
            "V" if rec.flags.swap_symmetric else "-",
            "S" if rec.flags.superposed else "-",
        ))
        sizes = ",".join(str(s) for s in rec.partition.orbit_sizes())
        stabs = ",".join(str(f.order) for f in rec.stabilizer_fingerprints)
        sig = "; ".join(
            " ".join(f"{c}:{k}" for c, k in rec.signature_r1.counts(col))
            for col in range(rec.partition.orbit_count))
        lines.append(f"{rec.certificate.hex()[:16]:<18} "
                     f"{rec.i_t}*{rec.i_k:<6} {sizes:<12} {flags:<7} "
                     f"{rec.aut.point_order:<9} {stabs:<14} {sig}")
    return "\n".join(lines) + "\n"
