"""Ideal triangulations: tetrahedra with face gluings by vertex permutations.

A triangulation with n tetrahedra is stored as a flat tuple ``adj`` of
length 4n: entry 4*t + f describes face f of tetrahedron t and is either
-1 (open face) or tgt*24 + p, where p indexes the gluing permutation in
perm4.PERMS.  Gluings are symmetric: if (t1, f1) is glued to (t2, f2)
via p then p(f1) == f2 and (t2, f2) carries the inverse permutation.
Partial triangulations (open faces) are first class; only the topology
checks require closedness.

The low-level helpers that the enumeration hammers on (edge walking,
eager closing) work directly on lists of ints; the Triangulation class
wraps a frozen tuple and provides the derived skeleta.
"""

from .errors import (
    NotClosed,
    NotConnected,
    SelfGluingForbidden,
    TriangulationError,
)
from .perm4 import INV, MUL, PARITY, PERMS, Perm4, perm_from_images

# edge index tables: the 6 edges of a tetrahedron, by vertex pair
EDGE_ENDS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {}
for _i, (_a, _b) in enumerate(EDGE_ENDS):
    EDGE_INDEX[(_a, _b)] = _i
    EDGE_INDEX[(_b, _a)] = _i


class EdgeClass:
    """One edge class of a triangulation.

    ``incidences`` lists (tet, a, b) flags in the order the edge is walked,
    with consistently propagated orientation.  For an open edge, ``ends``
    holds the two terminal states (tet, a, b, open_face); both may name
    the same open face, in which case the edge cannot be closed.
    """

    __slots__ = ("incidences", "order", "open", "orientation_reversing", "ends")

    def __init__(self, incidences, open_, reversing, ends):
        self.incidences = incidences
        self.order = len(incidences)
        self.open = open_
        self.orientation_reversing = reversing
        self.ends = ends

    def __repr__(self):
        state = "open" if self.open else "closed"
        rev = ", reversing" if self.orientation_reversing else ""
        return f"EdgeClass(order={self.order}, {state}{rev})"


class VertexClass:
    """One ideal vertex (cusp candidate) with its link surface data."""

    __slots__ = ("corners", "euler", "link_orientable")

    def __init__(self, corners, euler, link_orientable):
        self.corners = corners
        self.euler = euler
        self.link_orientable = link_orientable

    @property
    def link_surface(self):
        if self.euler == 2:
            return "sphere"
        if self.euler == 0:
            return "torus" if self.link_orientable else "klein_bottle"
        return "other"

    def __repr__(self):
        return f"VertexClass({len(self.corners)} corners, {self.link_surface})"


def _walk_step(adj, t, a, b, exit_face):
    """One step around an edge; returns the next state or None at an open face."""
    g = adj[4 * t + exit_face]
    if g < 0:
        return None
    t2, p = divmod(g, 24)
    img = PERMS[p]
    a2 = img[a]
    b2 = img[b]
    entry = img[exit_face]
    return t2, a2, b2, 6 - a2 - b2 - entry


def _trace_edge(adj, t0, a0, b0):
    """Walk the full edge class of (t0, {a0,b0}).

    Returns (incidences, open?, reversing?, ends).  For a closed edge the
    walk continues to the exact return of the start state, so a class that
    is identified with itself end-for-end is detected no matter where the
    reversal happens.
    """
    c0 = [v for v in range(4) if v != a0 and v != b0]
    start = (t0, a0, b0, c0[1])
    seen = {}
    order = []
    reversing = False

    state = start
    while True:
        t, a, b, _x = state
        key = (t, EDGE_INDEX[(a, b)])
        if key not in seen:
            seen[key] = (a, b)
            order.append((t, a, b))
        elif seen[key] != (a, b):
            reversing = True
        nxt = _walk_step(adj, *state)
        if nxt is None:
            break
        if nxt == start:
            return order, False, reversing, None
        state = nxt

    end1 = state
    # other direction from the seed
    state = (t0, b0, a0, c0[0])
    while True:
        t, a, b, _x = state
        key = (t, EDGE_INDEX[(a, b)])
        if key not in seen:
            # store reversed so orientations stay coherent along the path
            seen[key] = (b, a)
            order.insert(0, (t, b, a))
        elif seen[key] != (b, a):
            reversing = True
        nxt = _walk_step(adj, *state)
        if nxt is None:
            break
        state = nxt
    end2 = state
    return order, True, reversing, (end1, end2)


def edge_classes_raw(adj, n):
    """All edge classes of the raw gluing table."""
    classes = []
    done = [False] * (6 * n)
    for t in range(n):
        for e in range(6):
            if done[6 * t + e]:
                continue
            a, b = EDGE_ENDS[e]
            inc, open_, rev, ends = _trace_edge(adj, t, a, b)
            for tt, aa, bb in inc:
                done[6 * tt + EDGE_INDEX[(aa, bb)]] = True
            classes.append(EdgeClass(inc, open_, rev, ends))
    return classes


def glue_raw(adj, t1, f1, t2, f2, p):
    """Install a gluing into a mutable adjacency list (both directions)."""
    if adj[4 * t1 + f1] != -1 or adj[4 * t2 + f2] != -1:
        raise TriangulationError("face already glued")
    if t1 == t2 and f1 == f2:
        raise TriangulationError("face glued to itself")
    if PERMS[p][f1] != f2:
        raise TriangulationError("gluing permutation does not map face to face")
    adj[4 * t1 + f1] = t2 * 24 + p
    adj[4 * t2 + f2] = t1 * 24 + INV[p]


def closing_gluing(edge):
    """The forced gluing (t1, f1, t2, f2, p) closing an open edge class.

    Raises SelfGluingForbidden when the two adjacent open faces coincide
    as (tetrahedron, face) pairs; such a branch can never become a
    tessellation and must be pruned.
    """
    if not edge.open:
        raise TriangulationError("edge already closed")
    (t1, a1, b1, f1), (t2, a2, b2, f2) = edge.ends
    if t1 == t2 and f1 == f2:
        raise SelfGluingForbidden("open edge bounded twice by one face")
    # identify the walk-propagated orientations: end2 was walked with the
    # reversed seed orientation, so match (a1,b1) with (b2,a2)
    images = [None] * 4
    images[a1] = b2
    images[b1] = a2
    images[f1] = f2
    x1 = 6 - a1 - b1 - f1
    images[x1] = 6 - a2 - b2 - f2
    return t1, f1, t2, f2, perm_from_images(images)


class Triangulation:
    """Immutable ideal triangulation (possibly partial)."""

    __slots__ = ("n", "adj", "_edges", "_vertices")

    def __init__(self, n, adj):
        adj = tuple(adj)
        if len(adj) != 4 * n:
            raise TriangulationError("adjacency table has wrong length")
        self.n = n
        self.adj = adj
        self._edges = None
        self._vertices = None
        self._check()

    def _check(self):
        for t in range(self.n):
            for f in range(4):
                g = self.adj[4 * t + f]
                if g < 0:
                    continue
                t2, p = divmod(g, 24)
                if not 0 <= t2 < self.n:
                    raise TriangulationError("gluing target out of range")
                f2 = PERMS[p][f]
                if t2 == t and f2 == f:
                    raise TriangulationError("face glued to itself")
                back = self.adj[4 * t2 + f2]
                if back != t * 24 + INV[p]:
                    raise TriangulationError("gluing symmetry violated")

    # -- constructors

    @classmethod
    def single_tetrahedron(cls):
        return cls(1, (-1, -1, -1, -1))

    @classmethod
    def from_gluings(cls, n, gluings):
        """Build from (t1, f1, t2, f2, images) tuples."""
        adj = [-1] * (4 * n)
        for t1, f1, t2, f2, images in gluings:
            p = images if isinstance(images, int) else perm_from_images(images)
            glue_raw(adj, t1, f1, t2, f2, p)
        return cls(n, adj)

    def glue(self, t1, f1, t2, f2, images):
        adj = list(self.adj)
        p = images if isinstance(images, int) else perm_from_images(images)
        glue_raw(adj, t1, f1, t2, f2, p)
        return Triangulation(self.n, adj)

    # -- basic queries

    def gluing(self, t, f):
        """(target, Perm4) for a glued face, None for an open one."""
        g = self.adj[4 * t + f]
        if g < 0:
            return None
        t2, p = divmod(g, 24)
        return t2, Perm4(p)

    def open_faces(self):
        return [
            (t, f) for t in range(self.n) for f in range(4) if self.adj[4 * t + f] < 0
        ]

    def is_closed(self):
        return all(g >= 0 for g in self.adj)

    def is_connected(self):
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for f in range(4):
                g = self.adj[4 * t + f]
                if g >= 0:
                    t2 = g // 24
                    if t2 not in seen:
                        seen.add(t2)
                        stack.append(t2)
        return len(seen) == self.n

    # -- derived skeleta

    def edge_classes(self):
        if self._edges is None:
            self._edges = edge_classes_raw(self.adj, self.n)
        return self._edges

    def close_edge(self, edge):
        """Glue the two open faces adjacent to an open edge."""
        t1, f1, t2, f2, p = closing_gluing(edge)
        return self.glue(t1, f1, t2, f2, p)

    def vertex_links(self):
        """Vertex classes with link Euler characteristics and orientability.

        The link of an ideal vertex class is a closed surface built from
        one corner triangle per (tet, vertex) incidence.  Its vertices are
        the orbits of corner flags (tet, v, u) under the face gluings, its
        edges the glued triangle sides, so the Euler characteristic comes
        straight out of the identification counts.
        """
        if self._vertices is not None:
            return self._vertices
        if not self.is_closed():
            raise NotClosed("vertex links need a closed triangulation")
        n, adj = self.n, self.adj

        parent = list(range(16 * n))  # (t, v, u) packed as 16*t + 4*v + u

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for t in range(n):
            for f in range(4):
                g = adj[4 * t + f]
                t2, p = divmod(g, 24)
                img = PERMS[p]
                for v in range(4):
                    if v == f:
                        continue
                    union(16 * t + 4 * v + v, 16 * t2 + 4 * img[v] + img[v])
                    for u in range(4):
                        if u != f and u != v:
                            union(16 * t + 4 * v + u, 16 * t2 + 4 * img[v] + img[u])

        # cusps: orbits of (t, v), tracked via the diagonal flags (t, v, v)
        cusp_corners = {}
        for t in range(n):
            for v in range(4):
                cusp_corners.setdefault(find(16 * t + 4 * v + v), []).append((t, v))

        # link vertices: orbits of off-diagonal corner flags, per cusp
        corner_orbits = {}
        for t in range(n):
            for v in range(4):
                for u in range(4):
                    if u != v:
                        root = find(16 * t + 4 * v + u)
                        corner_orbits[root] = find(16 * t + 4 * v + v)
        verts_per_cusp = {}
        for _orbit, cusp in corner_orbits.items():
            verts_per_cusp[cusp] = verts_per_cusp.get(cusp, 0) + 1

        classes = []
        for root, corners in cusp_corners.items():
            faces = len(corners)
            edges_cnt = 3 * faces // 2
            euler = verts_per_cusp.get(root, 0) - edges_cnt + faces
            classes.append(
                VertexClass(corners, euler, _link_orientable(self, corners))
            )
        classes.sort(key=lambda c: min(c.corners))
        self._vertices = classes
        return classes

    def face_pairing_graph(self):
        """Multigraph on tetrahedra: one edge per face gluing (loops allowed)."""
        if not self.is_closed():
            raise NotClosed("face pairing graph needs a closed triangulation")
        edges = []
        for t in range(self.n):
            for f in range(4):
                g = self.adj[4 * t + f]
                t2, p = divmod(g, 24)
                if (t, f) <= (t2, PERMS[p][f]):
                    edges.append((t, t2))
        return self.n, edges

    def is_two_colorable(self):
        """True iff the face pairing graph is bipartite."""
        if not self.is_connected():
            raise NotConnected("two-colorability needs a connected triangulation")
        _n, edges = self.face_pairing_graph()
        color = {}
        for a, b in edges:
            if a == b:
                return False
        neighbors = {}
        for a, b in edges:
            neighbors.setdefault(a, []).append(b)
            neighbors.setdefault(b, []).append(a)
        for start in range(self.n):
            if start in color:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                u = stack.pop()
                for w in neighbors.get(u, ()):
                    if w not in color:
                        color[w] = color[u] ^ 1
                        stack.append(w)
                    elif color[w] == color[u]:
                        return False
        return True

    def is_orientable(self):
        """Local orientations exist with every gluing parity-consistent.

        Convention: an odd gluing permutation connects tetrahedra of equal
        sign (the orientation-compatible case), matching the enumeration's
        orientable branch which only glues via odd permutations.
        """
        if not self.is_closed():
            raise NotClosed("orientability needs a closed triangulation")
        if not self.is_connected():
            raise NotConnected("orientability needs a connected triangulation")
        return self.orientation_signs() is not None

    def orientation_signs(self):
        """Per-tetrahedron signs +-1 if consistently orientable, else None."""
        sign = [0] * self.n
        sign[0] = 1
        stack = [0]
        while stack:
            t = stack.pop()
            for f in range(4):
                g = self.adj[4 * t + f]
                if g < 0:
                    continue
                t2, p = divmod(g, 24)
                s2 = sign[t] if PARITY[p] else -sign[t]
                if sign[t2] == 0:
                    sign[t2] = s2
                    stack.append(t2)
                elif sign[t2] != s2:
                    return None
        return sign

    # -- serialization

    def to_text(self):
        """Stable plain-text form: count line, then one line per tetrahedron."""
        lines = [str(self.n)]
        for t in range(self.n):
            entries = []
            for f in range(4):
                g = self.adj[4 * t + f]
                if g < 0:
                    entries.append("-")
                else:
                    t2, p = divmod(g, 24)
                    digits = "".join(str(v) for v in PERMS[p])
                    entries.append(f"{t2}:{digits}")
            lines.append(" ".join(entries))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.strip().splitlines()]
        n = int(lines[0])
        adj = [-1] * (4 * n)
        for t in range(n):
            entries = lines[1 + t].split()
            for f, entry in enumerate(entries):
                if entry == "-":
                    continue
                tgt, digits = entry.split(":")
                p = perm_from_images(tuple(int(c) for c in digits))
                adj[4 * t + f] = int(tgt) * 24 + p
        tri = cls(n, adj)
        return tri

    def __eq__(self, other):
        return (
            isinstance(other, Triangulation)
            and self.n == other.n
            and self.adj == other.adj
        )

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        state = "closed" if self.is_closed() else "partial"
        return f"Triangulation({self.n} tets, {state})"


def _triple_parity(reference, triple):
    """Parity (0 even, 1 odd) of the permutation sending reference to triple."""
    idx = [reference.index(x) for x in triple]
    inv = 0
    for i in range(3):
        for j in range(i + 1, 3):
            if idx[i] > idx[j]:
                inv += 1
    return inv & 1


def _link_orientable(tri, corners):
    """Orientability of one vertex link, by propagating triangle signs.

    Each corner triangle (t, v) gets the reference orientation given by
    its corners in ascending order; crossing a side gluing demands the
    neighbor carry the reversed image orientation.  A sign conflict means
    the link is non-orientable.
    """
    adj = tri.adj
    sign = {}
    start = corners[0]
    sign[start] = 1
    stack = [start]
    while stack:
        t, v = stack.pop()
        ref = [u for u in range(4) if u != v]
        s = sign[(t, v)]
        for f in range(4):
            if f == v:
                continue
            g = adj[4 * t + f]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            v2 = img[v]
            ref2 = [u for u in range(4) if u != v2]
            # endpoints of the shared side, arranged inside the current
            # orientation class so the boundary traverses x -> y
            x, y = (u for u in ref if u != f)
            if _triple_parity(ref, [x, y, f]) != (0 if s == 1 else 1):
                x, y = y, x
            # the neighbor must traverse the side backwards
            required = [img[y], img[x], img[f]]
            needed = 1 if _triple_parity(ref2, required) == 0 else -1
            key = (t2, v2)
            if key not in sign:
                sign[key] = needed
                stack.append(key)
            elif sign[key] != needed:
                return False
    return True
