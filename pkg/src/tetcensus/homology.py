"""First homology from the dual-spine presentation, via Smith normal form.

An ideal triangulation deformation-retracts onto its dual 2-spine, so
pi_1 has one generator per face class and one relator per edge class
(the signed word of faces crossed by a small loop around the edge).
Abelianizing and killing a spanning tree of the face-pairing graph
leaves an integer matrix whose cokernel is H_1.
"""

from dataclasses import dataclass, field
from math import gcd

from .errors import NotClosed, NotConnected, NotOrientable
from .perm4 import PERMS


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        for i in range(len(self.torsion) - 1):
            if self.torsion[i + 1] % self.torsion[i] != 0:
                raise ValueError("invariant factors must form a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("invariant factors must be at least 2")

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def smith_normal_form(matrix):
    """Invariant factors (d1 | d2 | ...) of an integer matrix, all > 0.

    Small dense matrices only: pivot on the smallest nonzero entry and
    reduce until the pivot divides its row and column, then recurse on
    the remaining block; fix up the divisibility chain at the end.
    """
    m = [list(row) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    top = 0
    while top < rows and top < cols:
        # locate smallest nonzero entry in the remaining block
        pr = pc = -1
        best = None
        for i in range(top, rows):
            for j in range(top, cols):
                v = abs(m[i][j])
                if v and (best is None or v < best):
                    best, pr, pc = v, i, j
        if best is None:
            break
        m[top], m[pr] = m[pr], m[top]
        for row in m:
            row[top], row[pc] = row[pc], row[top]
        while True:
            pivot = m[top][top]
            dirty = False
            for i in range(top + 1, rows):
                q = m[i][top] // pivot
                if q:
                    for j in range(top, cols):
                        m[i][j] -= q * m[top][j]
                if m[i][top]:
                    m[top], m[i] = m[i], m[top]
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(top + 1, cols):
                q = m[top][j] // pivot
                if q:
                    for i in range(top, rows):
                        m[i][j] -= q * m[i][top]
                if m[top][j]:
                    for row in m:
                        row[top], row[j] = row[j], row[top]
                    dirty = True
                    break
            if dirty:
                continue
            # pivot must divide every remaining entry for the chain to work
            offender = None
            for i in range(top + 1, rows):
                for j in range(top + 1, cols):
                    if m[i][j] % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(top, cols):
                m[top][j] += m[offender][j]
        diag.append(abs(m[top][top]))
        top += 1

    # enforce divisibility (entries are already mutually divisible up to
    # gcd/lcm swaps thanks to the offender pass, but keep this exact)
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = gcd(a, b)
            diag[i], diag[j] = g, a // g * b
    return [d for d in diag if d]


def _face_classes(tri):
    """Face classes as ((t1, f1), (t2, f2)) pairs with the primary side first."""
    classes = []
    index = {}
    for t in range(tri.n):
        for f in range(4):
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            other = (t2, PERMS[p][f])
            if (t, f) <= other:
                index[(t, f)] = len(classes)
                index[other] = len(classes)
                classes.append(((t, f), other))
    return classes, index


def first_homology(tri):
    """H_1 of the underlying cusped manifold as an AbelianGroup."""
    if not tri.is_closed():
        raise NotClosed("homology needs a closed triangulation")
    if not tri.is_connected():
        raise NotConnected("homology needs a connected triangulation")

    classes, index = _face_classes(tri)
    primary = {pair[0]: k for k, pair in enumerate(classes)}

    # spanning tree of the face-pairing graph
    tree_cols = set()
    seen = {0}
    queue = [0]
    while queue:
        t = queue.pop()
        for f in range(4):
            t2 = tri.adj[4 * t + f] // 24
            if t2 not in seen:
                seen.add(t2)
                queue.append(t2)
                key = (t, f)
                if key not in primary:
                    g = tri.adj[4 * t + f]
                    tt, p = divmod(g, 24)
                    key = (tt, PERMS[p][f])
                tree_cols.add(primary[key])

    # relator rows: the signed word of faces crossed around each edge
    rows = _edge_relators(tri, classes, set(primary))

    keep = [j for j in range(len(classes)) if j not in tree_cols]
    reduced = [[row[j] for j in keep] for row in rows]
    factors = smith_normal_form(reduced) if reduced and keep else []
    rank = len(keep) - len(factors)
    torsion = tuple(d for d in factors if d > 1)
    return AbelianGroup(rank, torsion)


def _edge_relators(tri, classes, prim_side):
    """Signed face-crossing words for every edge class, by direct walking."""
    index = {}
    for k, pair in enumerate(classes):
        index[pair[0]] = k
        index[pair[1]] = k
    adj = tri.adj
    rows = []
    for edge in tri.edge_classes():
        row = [0] * len(classes)
        t0, a0, b0 = edge.incidences[0]
        c = [v for v in range(4) if v != a0 and v != b0]
        state = (t0, a0, b0, c[1])
        start = state
        while True:
            t, a, b, exit_face = state
            row[index[(t, exit_face)]] += (
                1 if (t, exit_face) in prim_side else -1
            )
            g = adj[4 * t + exit_face]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            a2, b2 = img[a], img[b]
            entry = img[exit_face]
            state = (t2, a2, b2, 6 - a2 - b2 - entry)
            if state == start:
                break
        rows.append(row)
    return rows


def is_homology_link(tri):
    """H_1 = Z^c with c the number of cusps (orientable manifolds only)."""
    if not tri.is_orientable():
        raise NotOrientable("the homology-link test is defined for orientable input")
    h = first_homology(tri)
    cusps = len(tri.vertex_links())
    return h.rank == cusps and not h.torsion
