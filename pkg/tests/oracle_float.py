"""Independent floating-point oracle for the exact geometry pipeline.

Everything here is derived from explicit numeric developments of ideal
tetrahedra in the upper half-space model, on purpose sharing no lookup
tables or ratio conventions with the exact implementation: cusp triangle
sides come from moduli of differences of developed ideal points, corner
angles from the law of cosines, tilts from the circumradius formula.
Used by the tests to cross-check exact cusp sections and tilt tables.
"""

import cmath
import math

from tetcensus.perm4 import PERMS

INF = None  # marker for the point at infinity


def _vertex_positions(z):
    """Placement (inf, 0, 1, z) matching the exact convention."""
    return [INF, 0j, 1 + 0j, complex(z)]


def _send_to_inf(points, v):
    """Mobius x -> 1/(x - p_v) sending vertex v to infinity (numeric)."""
    pv = points[v]
    out = []
    for u, p in enumerate(points):
        if u == v:
            out.append(INF)
        elif pv is INF:
            out.append(p)
        elif p is INF:
            out.append(0j)
        else:
            out.append(1.0 / (p - pv))
    return out


def cusp_triangle_raw(z, v):
    """Raw corner positions {u: complex} of the cusp triangle at vertex v."""
    pts = _send_to_inf(_vertex_positions(z), v)
    return {u: pts[u] for u in range(4) if u != v}


def raw_side_lengths(z, v):
    """Raw side lengths {face f: length} of the cusp triangle at v.

    The side on face f connects the corners at the two vertices of f
    other than v; raw values are only meaningful as ratios.
    """
    corners = cusp_triangle_raw(z, v)
    sides = {}
    for f in range(4):
        if f == v:
            continue
        u1, u2 = [u for u in corners if u != f]
        sides[f] = abs(corners[u1] - corners[u2])
    return sides


def corner_cos(z, v, u):
    """cos of the cusp-triangle corner at vertex u's direction (edge v-u).

    This is the cosine of the dihedral angle along edge (v, u), obtained
    from the developed triangle by the law of cosines.
    """
    corners = cusp_triangle_raw(z, v)
    others = [w for w in corners if w != u]
    a = abs(corners[others[0]] - corners[u])
    b = abs(corners[others[1]] - corners[u])
    c = abs(corners[others[0]] - corners[others[1]])
    return (a * a + b * b - c * c) / (2 * a * b)


def cusp_data(tri, shapes):
    """Numeric cusp cross sections: lengths per (tet, v, face), cusp areas.

    Mirrors the recursion contract only (seed side 1, ratios within a
    triangle, equality across gluings) with all ratios taken from the
    numeric developments.
    """
    zs = [complex(z) for z in shapes]
    cusps = tri.vertex_links()
    cusp_of = {}
    for i, cls in enumerate(cusps):
        for tv in cls.corners:
            cusp_of[tv] = i
    raw = {}
    for t in range(tri.n):
        for v in range(4):
            raw[(t, v)] = raw_side_lengths(zs[t], v)

    lengths = {}
    for i, cls in enumerate(cusps):
        t0, v0 = min(cls.corners)
        f0 = min(f for f in range(4) if f != v0)
        stack = [(t0, v0, f0)]
        lengths[(t0, v0, f0)] = 1.0
        while stack:
            t, v, f = stack.pop()
            cur = lengths[(t, v, f)]
            for f2 in range(4):
                if f2 == v or f2 == f:
                    continue
                val = cur * raw[(t, v)][f2] / raw[(t, v)][f]
                if (t, v, f2) not in lengths:
                    lengths[(t, v, f2)] = val
                    stack.append((t, v, f2))
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            key = (t2, img[v], img[f])
            if key not in lengths:
                lengths[key] = cur
                stack.append(key)

    areas = {}
    for t in range(tri.n):
        for v in range(4):
            fs = [f for f in range(4) if f != v]
            scale = lengths[(t, v, fs[0])] / raw[(t, v)][fs[0]]
            a, b, c = (raw[(t, v)][f] * scale for f in fs)
            s = (a + b + c) / 2
            areas[(t, v)] = math.sqrt(max(s * (s - a) * (s - b) * (s - c), 0.0))
    cusp_areas = [0.0] * len(cusps)
    for (t, v), a in areas.items():
        cusp_areas[cusp_of[(t, v)]] += a
    return lengths, areas, cusp_of, cusp_areas


def tilt_table_numeric(tri, shapes, target=math.sqrt(3)):
    """Face tilts as floats, straight from the defining formulas."""
    zs = [complex(z) for z in shapes]
    lengths, areas, cusp_of, cusp_areas = cusp_data(tri, shapes)
    factors = [target / a for a in cusp_areas]
    radius = {}
    for t in range(tri.n):
        for v in range(4):
            fac = factors[cusp_of[(t, v)]]
            sides = [lengths[(t, v, f)] * math.sqrt(fac) for f in range(4) if f != v]
            area = areas[(t, v)] * fac
            radius[(t, v)] = sides[0] * sides[1] * sides[2] / (4 * area)
    vertex_tilt = {}
    for t in range(tri.n):
        for v in range(4):
            total = radius[(t, v)]
            for u in range(4):
                if u != v:
                    total -= radius[(t, u)] * corner_cos(zs[t], v, u)
            vertex_tilt[(t, v)] = total
    face_tilts = {}
    for t in range(tri.n):
        for f in range(4):
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            other = (t2, PERMS[p][f])
            if (t, f) <= other:
                face_tilts[((t, f), other)] = (
                    vertex_tilt[(t, f)] + vertex_tilt[other]
                )
    return face_tilts
