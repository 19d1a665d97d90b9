"""Census orchestration: enumerate, group, name, annotate, emit files.

Manifold names look like otet08_0002 (orientable) or ntet02_0000
(non-orientable): prefix, two-digit tetrahedron count, four-digit index.
Within an isometry class the tessellations are sorted lexicographically
by signature and suffixed #0, #1, ...; classes are indexed per
tetrahedron count by the signature of their #0 representative.  All
output files are sorted, line-oriented and newline-terminated, so two
runs of the same census are byte-identical.
"""

import os
from dataclasses import dataclass, field

from .canonical import isometry_signature
from .enumeration import SearchConfig, SearchStats, enumerate_ctts
from .errors import CanonizationFailed, GeometryError
from .geometry import certification_report
from .homology import first_homology, is_homology_link
from .morphisms import covering_pairs, morphism_lines
from .signatures import (
    canonical_signature,
    find_isomorphisms,
    signature_text,
    triangulation_from_signature,
)


@dataclass
class CensusRecord:
    name: str
    n_tets: int
    orientable: bool
    n_cusps: int
    ctt_sigs: list
    isometry_sig: str
    regime: str
    homology: object
    homology_link: bool | None
    two_colorable: list
    hides_symmetries: list
    canonical_is_ctt: bool

    def tsv_row(self):
        hl = "-" if self.homology_link is None else str(self.homology_link).lower()
        return "\t".join(
            [
                self.name,
                str(self.n_tets),
                str(self.orientable).lower(),
                str(self.n_cusps),
                ";".join(self.ctt_sigs),
                self.isometry_sig,
                self.regime,
                str(self.homology),
                hl,
                ";".join(str(b).lower() for b in self.two_colorable),
                ";".join(str(b).lower() for b in self.hides_symmetries),
                str(self.canonical_is_ctt).lower(),
            ]
        )


TSV_COLUMNS = (
    "name",
    "n_tets",
    "orientable",
    "n_cusps",
    "ctt_sigs",
    "isometry_sig",
    "regime",
    "H1",
    "homology_link",
    "two_colorable",
    "hides_symmetries",
    "canonical_is_ctt",
)


def group_and_name(sigs, orientable, seed=0):
    """Group tessellation signatures by isometry class and assign names.

    Returns (records, failures): ``records`` sorted by (tetrahedron
    count, index); ``failures`` lists (signature, error message) for
    anything that could not be canonized and certified.
    """
    groups = {}
    failures = []
    for text in sorted(sigs):
        tri = triangulation_from_signature(text)
        try:
            result = isometry_signature(tri, seed=seed)
        except (CanonizationFailed, GeometryError) as exc:
            failures.append((text, f"{type(exc).__name__}: {exc}"))
            continue
        groups.setdefault(result.signature, []).append((text, tri, result))

    by_count = {}
    for iso_sig, members in groups.items():
        members.sort(key=lambda m: m[0])
        n = members[0][1].n
        if any(t.n != n for _s, t, _r in members):
            # tessellations of one manifold have equal volume, hence count
            failures.append((iso_sig, "isometry class mixes tetrahedron counts"))
            continue
        by_count.setdefault(n, []).append(members)

    prefix = "otet" if orientable else "ntet"
    records = []
    for n in sorted(by_count):
        classes = sorted(by_count[n], key=lambda ms: ms[0][0])
        for idx, members in enumerate(classes):
            name = f"{prefix}{n:02d}_{idx:04d}"
            rep_tri = members[0][1]
            result = members[0][2]
            canonical_tri = result.canonical_triangulation
            ctt_sigs = [m[0] for m in members]
            n_cusps = len(rep_tri.vertex_links())
            h1 = first_homology(rep_tri)
            homlink = is_homology_link(rep_tri) if orientable else None
            twocol = [m[1].is_two_colorable() for m in members]
            canon_auts = len(find_isomorphisms(canonical_tri, canonical_tri))
            hides = [
                canon_auts > len(find_isomorphisms(m[1], m[1])) for m in members
            ]
            canonical_is_ctt = result.regime == "simplicial" and any(
                result.signature[2:] == s for s in ctt_sigs
            )
            records.append(
                CensusRecord(
                    name=name,
                    n_tets=n,
                    orientable=orientable,
                    n_cusps=n_cusps,
                    ctt_sigs=ctt_sigs,
                    isometry_sig=result.signature,
                    regime=result.regime,
                    homology=h1,
                    homology_link=homlink,
                    two_colorable=twocol,
                    hides_symmetries=hides,
                    canonical_is_ctt=canonical_is_ctt,
                )
            )
    return records, failures


def summary_lines(records, stats, max_tets, orientable):
    """Per-size counts in the layout of the paper-style summary table."""
    per_n_ctt = {}
    per_n_man = {}
    per_n_hl = {}
    for rec in records:
        per_n_ctt[rec.n_tets] = per_n_ctt.get(rec.n_tets, 0) + len(rec.ctt_sigs)
        per_n_man[rec.n_tets] = per_n_man.get(rec.n_tets, 0) + 1
        if rec.homology_link:
            per_n_hl[rec.n_tets] = per_n_hl.get(rec.n_tets, 0) + 1
    flag = "orientable" if orientable else "non-orientable"
    lines = [f"census {flag} max_tets={max_tets}"]
    lines.append("tetrahedra\ttessellations\tmanifolds\thomology_links")
    for n in range(1, max_tets + 1):
        lines.append(
            f"{n}\t{per_n_ctt.get(n, 0)}\t{per_n_man.get(n, 0)}"
            f"\t{per_n_hl.get(n, 0) if orientable else '-'}"
        )
    if orientable:
        odd = [
            rec.name
            for rec in records
            if rec.homology_link and rec.n_tets % 2 == 1
        ]
        lines.append(
            "observation: every homology link has an even tetrahedron count: "
            + ("holds" if not odd else f"FAILS for {','.join(odd)}")
        )
    return lines


def run_census(cfg: SearchConfig, outdir, seed=0):
    """Full pipeline; writes the census files and returns (records, stats).

    Files: ctt_sigs_<o|n>.txt (sorted signatures), census_<o|n>.tsv,
    morphisms.txt, summary.txt, enumeration stats as a key=value sidecar.
    Certification failures do not abort the run: partial outputs are
    flushed with a FAILURES section and a nonzero exit is signalled by
    the caller inspecting ``failures``.
    """
    os.makedirs(outdir, exist_ok=True)
    tag = "o" if cfg.orientable else "n"
    stats = SearchStats()
    raw_sigs, stats = enumerate_ctts(cfg, stats)
    sigs = sorted(signature_text(s) for s in raw_sigs)

    with open(os.path.join(outdir, f"ctt_sigs_{tag}.txt"), "w") as fh:
        fh.write("".join(s + "\n" for s in sigs))
    with open(os.path.join(outdir, f"ctt_sigs_{tag}.stats.txt"), "w") as fh:
        fh.write("".join(line + "\n" for line in stats.as_lines()))

    records, failures = group_and_name(sigs, cfg.orientable, seed=seed)

    named = []
    for rec in records:
        for k, text in enumerate(rec.ctt_sigs):
            named.append((f"{rec.name}#{k}", triangulation_from_signature(text)))
    pairs = covering_pairs(named)
    with open(os.path.join(outdir, "morphisms.txt"), "w") as fh:
        fh.write("".join(line + "\n" for line in morphism_lines(pairs)))

    with open(os.path.join(outdir, f"census_{tag}.tsv"), "w") as fh:
        fh.write("\t".join(TSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(rec.tsv_row() + "\n")

    lines = summary_lines(records, stats, cfg.max_tets, cfg.orientable)
    if failures:
        lines.append("FAILURES")
        for sig, msg in failures:
            lines.append(f"{sig}\t{msg}")
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write("".join(line + "\n" for line in lines))

    return records, stats, failures


def verify_census(outdir, orientable=True, seed=0):
    """Recompute the invariant suite for a finished census directory.

    Checks per record: name format, signature decodability, tessellation
    validity (closed, connected, all edges order 6), certification of the
    canonized structure, grouping well-definedness (every member yields
    the record's isometry signature) and homology annotations.  Returns
    (ok, report_lines).
    """
    tag = "o" if orientable else "n"
    path = os.path.join(outdir, f"census_{tag}.tsv")
    report = []
    ok = True
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != TSV_COLUMNS:
            return False, ["header mismatch"]
        rows = [line.rstrip("\n").split("\t") for line in fh]

    sig_file = os.path.join(outdir, f"ctt_sigs_{tag}.txt")
    with open(sig_file) as fh:
        listed = [line.strip() for line in fh if line.strip()]
    from_records = sorted(
        s for row in rows for s in row[4].split(";") if s
    )
    if sorted(listed) != from_records:
        ok = False
        report.append("grouping mismatch: tsv signatures != enumerated signatures")

    prefix = "otet" if orientable else "ntet"
    for row in rows:
        name, n_tets = row[0], int(row[1])
        expect = f"{prefix}{n_tets:02d}_"
        if not (name.startswith(expect) and len(name) == len(expect) + 4):
            ok = False
            report.append(f"{name}: bad name format")
            continue
        iso_sig = row[5]
        for text in row[4].split(";"):
            tri = triangulation_from_signature(text)
            if tri.n != n_tets:
                ok = False
                report.append(f"{name}: size mismatch for {text}")
            if not all(
                e.order == 6 and not e.open for e in tri.edge_classes()
            ):
                ok = False
                report.append(f"{name}: {text} is not a tessellation")
            if canonical_signature(tri) != text:
                ok = False
                report.append(f"{name}: {text} is not canonical")
            try:
                result = isometry_signature(tri, seed=seed)
            except GeometryError as exc:
                ok = False
                report.append(f"{name}: canonization replay failed: {exc}")
                continue
            if result.signature != iso_sig:
                ok = False
                report.append(f"{name}: isometry signature replay mismatch")
            good, lines = certification_report(result.proto, result.shapes)
            if not good:
                ok = False
                report.append(f"{name}: certification replay failed")
                report.extend("  " + line for line in lines)
        h1 = first_homology(triangulation_from_signature(row[4].split(";")[0]))
        if str(h1) != row[7]:
            ok = False
            report.append(f"{name}: homology mismatch")
    report.append(f"records={len(rows)} status={'pass' if ok else 'FAIL'}")
    return ok, report
