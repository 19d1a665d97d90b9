"""The covering-map relation over the census, reduced like the paper's list.

A pair (M, N) enters when a combinatorial homomorphism M -> N exists.
Reflexive pairs and pairs factoring through a third census member are
dropped: they are recoverable from the reflexive-transitive closure.
Factoring is tested against the listed census only, by existence alone.
"""

from .signatures import find_homomorphisms


def _compatible(src, dst):
    # degree-1 pairs between distinct entries would contradict signature
    # completeness, so only proper multiples are searched; a covering maps
    # cusps onto cusps, so the source needs at least as many
    if src.n % dst.n != 0 or src.n == dst.n:
        return False
    return len(src.vertex_links()) >= len(dst.vertex_links())


def covering_pairs(named):
    """All reduced covering pairs (src_name, dst_name, degree).

    ``named`` is a list of (name, Triangulation) for the whole census.
    Returns pairs sorted lexicographically; a pair is omitted when some
    third member K admits homomorphisms src -> K and K -> dst.
    """
    edges = {}
    names = [name for name, _t in named]
    tris = {name: t for name, t in named}
    for sname in names:
        for dname in names:
            if sname == dname:
                continue
            src, dst = tris[sname], tris[dname]
            if not _compatible(src, dst):
                continue
            homs = find_homomorphisms(src, dst)
            if homs:
                edges[(sname, dname)] = homs[0].degree

    reachable = set(edges)
    reduced = []
    for (sname, dname), degree in sorted(edges.items()):
        factors = any(
            (sname, k) in reachable and (k, dname) in reachable
            for k in names
            if k != sname and k != dname
        )
        if not factors:
            reduced.append((sname, dname, degree))
    return reduced


def morphism_lines(pairs):
    """Text lines for morphisms.txt, already sorted."""
    return [f"{s} -> {d} degree={deg}" for s, d, deg in pairs]
