"""Command line interface.

Subcommands expose each pipeline stage; ``census`` runs everything and
writes the output directory.  All stages are deterministic for a fixed
seed; --threads parallelizes the per-tessellation pipeline with a final
sort restoring the single-threaded order.
"""

import argparse
import sys

from .canonical import isometry_signature
from .census import run_census, summary_lines, verify_census
from .enumeration import SearchConfig, SearchStats, enumerate_ctt_signatures
from .errors import GeometryError
from .geometry import canonize, certification_report
from .homology import first_homology
from .morphisms import covering_pairs, morphism_lines
from .signatures import canonical_signature, triangulation_from_signature
from .triangulation import Triangulation


def _add_search_args(sub):
    sub.add_argument("--max", type=int, required=True, help="tetrahedron bound")
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--orientable", action="store_true")
    group.add_argument("--non-orientable", dest="orientable", action="store_false")
    sub.add_argument("--out", default=None, help="output file or directory")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)


def _read_triangulation(token):
    """A signature token, or '-' to read the plain-text form from stdin."""
    if token == "-":
        return Triangulation.from_text(sys.stdin.read())
    return triangulation_from_signature(token)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tetcensus",
        description="census engine for tetrahedral tessellations",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_enum = subs.add_parser("enumerate", help="run the tessellation search")
    _add_search_args(p_enum)

    p_canon = subs.add_parser("canonize", help="canonize one tessellation")
    p_canon.add_argument("signature")
    p_canon.add_argument("--seed", type=int, default=0)

    p_iso = subs.add_parser("isosig", help="isometry signature of a tessellation")
    p_iso.add_argument("signature")
    p_iso.add_argument("--seed", type=int, default=0)

    p_group = subs.add_parser("group", help="group signatures from a file")
    p_group.add_argument("sigfile")
    group = p_group.add_mutually_exclusive_group(required=True)
    group.add_argument("--orientable", action="store_true")
    group.add_argument("--non-orientable", dest="orientable", action="store_false")
    p_group.add_argument("--seed", type=int, default=0)

    p_hom = subs.add_parser("homology", help="first homology of a triangulation")
    p_hom.add_argument("signature")

    p_mor = subs.add_parser("morphisms", help="covering pairs for a census tsv")
    p_mor.add_argument("sigfile", help="file of 'name signature' lines")

    p_census = subs.add_parser("census", help="run the whole pipeline")
    _add_search_args(p_census)

    p_verify = subs.add_parser("verify", help="re-verify a census directory")
    p_verify.add_argument("outdir")
    group = p_verify.add_mutually_exclusive_group(required=True)
    group.add_argument("--orientable", action="store_true")
    group.add_argument("--non-orientable", dest="orientable", action="store_false")
    p_verify.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)

    if args.command == "enumerate":
        stats = SearchStats()
        sigs, stats = enumerate_ctt_signatures(
            SearchConfig(args.max, args.orientable), stats
        )
        out = args.out or f"sigs_{'o' if args.orientable else 'n'}.txt"
        with open(out, "w") as fh:
            fh.write("".join(s + "\n" for s in sigs))
        with open(out + ".stats.txt", "w") as fh:
            fh.write("".join(line + "\n" for line in stats.as_lines()))
        print(f"{len(sigs)} tessellations -> {out}")
        return 0

    if args.command == "canonize":
        tri = _read_triangulation(args.signature)
        try:
            proto, shapes, table = canonize(tri, seed=args.seed)
        except GeometryError as exc:
            print(f"FAILED: {exc}")
            return 1
        ok, lines = certification_report(proto, shapes)
        print(proto.to_text(), end="")
        for line in lines:
            print(line)
        return 0 if ok else 1

    if args.command == "isosig":
        tri = _read_triangulation(args.signature)
        try:
            result = isometry_signature(tri, seed=args.seed)
        except GeometryError as exc:
            print(f"FAILED: {exc}")
            return 1
        print(result.signature)
        return 0

    if args.command == "group":
        from .census import group_and_name

        with open(args.sigfile) as fh:
            sigs = [line.strip() for line in fh if line.strip()]
        records, failures = group_and_name(sigs, args.orientable, seed=args.seed)
        for rec in records:
            print(f"{rec.name}\t{';'.join(rec.ctt_sigs)}")
        for sig, msg in failures:
            print(f"FAILED\t{sig}\t{msg}")
        return 1 if failures else 0

    if args.command == "homology":
        tri = _read_triangulation(args.signature)
        print(first_homology(tri))
        return 0

    if args.command == "morphisms":
        named = []
        with open(args.sigfile) as fh:
            for line in fh:
                if line.strip():
                    name, sig = line.split()
                    named.append((name, triangulation_from_signature(sig)))
        for line in morphism_lines(covering_pairs(named)):
            print(line)
        return 0

    if args.command == "census":
        outdir = args.out or f"census_{'o' if args.orientable else 'n'}"
        records, stats, failures = run_census(
            SearchConfig(args.max, args.orientable), outdir, seed=args.seed
        )
        for line in summary_lines(records, stats, args.max, args.orientable):
            print(line)
        if failures:
            print(f"{len(failures)} FAILURES; see summary.txt")
            return 1
        return 0

    if args.command == "verify":
        ok, report = verify_census(args.outdir, args.orientable, seed=args.seed)
        for line in report:
            print(line)
        return 0 if ok else 1

    return 2


if __name__ == "__main__":
    sys.exit(main())
