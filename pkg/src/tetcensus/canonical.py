"""Canonical cell decomposition, canonical retriangulation, isometry signature.

Starting from a certified proto-canonical triangulation with exact
opacities, the cells of the canonical decomposition are assembled
combinatorially: 3-cells are components of tetrahedra across transparent
faces; opaque faces merge into polygon 2-cells across edges with exactly
two opaque incidences; the remaining edges are 1-cells.

The canonical retriangulation subdivides the suspension of each polygon
2-cell by the centers of its two neighboring 3-cells into one
tetrahedron per boundary side.  Axial faces (through both centers) glue
around the polygon; lateral faces glue to the adjacent polygon in the
same 3-cell sector around the shared boundary edge.  The isometry
signature of a manifold is the signature of this retriangulation, or of
the proto-canonical triangulation itself when every cell is a simplex.
"""

from dataclasses import dataclass, field

from .errors import InconsistentCells
from .geometry import canonize
from .perm4 import PERMS, perm_from_images
from .signatures import canonical_signature
from .triangulation import Triangulation


@dataclass
class TwoCell:
    """A polygon 2-cell: its triangles and its boundary cycle.

    ``boundary`` lists, in cyclic order, one entry per polygon side:
    (edge_class_id, walk_position, endpoint_flip, side_before, side_after)
    where endpoint_flip records whether the boundary direction opposes
    the 1-cell's walk orientation and side_before/side_after name the
    polygon's global side (+1 for A, -1 for B) facing the sector before
    and after the slot in the edge walk.
    """

    triangles: list
    boundary: list
    apex_a: int  # 3-cell on global side A
    apex_b: int

    @property
    def sides(self):
        return len(self.boundary)


@dataclass
class CellDecomposition:
    three_cells: list  # list of sorted tet lists
    cell3_of: dict  # tet -> 3-cell id
    two_cells: list  # list of TwoCell
    one_cells: list  # list of edge-class walk data

    def is_simplicial(self):
        return all(len(c) == 1 for c in self.three_cells) and all(
            len(p.triangles) == 1 for p in self.two_cells
        )


def _edge_walks(tri):
    """Cyclic wedge walks for every closed edge class.

    Each walk is a list of (tet, a, b, exit_face) states; the slot after
    state i is the face (tet_i, exit_face_i) crossed into state i+1.
    """
    walks = []
    seen = set()
    for edge in tri.edge_classes():
        t0, a0, b0 = edge.incidences[0]
        key = (t0, frozenset((a0, b0)))
        if key in seen:
            continue
        c = [v for v in range(4) if v != a0 and v != b0]
        state = (t0, a0, b0, c[1])
        start = state
        walk = []
        while True:
            t, a, b, exit_face = state
            seen.add((t, frozenset((a, b))))
            walk.append(state)
            g = tri.adj[4 * t + exit_face]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            a2, b2 = img[a], img[b]
            entry = img[exit_face]
            state = (t2, a2, b2, 6 - a2 - b2 - entry)
            if state == start:
                break
        walks.append(walk)
    return walks


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


def assemble_cells(tri, tilt_table):
    """Cell decomposition from certified opacities.

    Raises InconsistentCells when the opacity pattern cannot come from a
    valid decomposition (an edge with exactly one opaque incidence, a
    one-sided polygon, a polygon that is not a disk).
    """
    faces = tilt_table.faces
    face_index = tilt_table.face_index
    opaque = [s < 0 for s in tilt_table.sign]
    if not any(opaque):
        raise InconsistentCells("no opaque faces: not a valid decomposition")

    # 3-cells: components across transparent faces
    uf3 = _UnionFind(tri.n)
    for k, ((t1, _f1), (t2, _f2)) in enumerate(faces):
        if not opaque[k]:
            uf3.union(t1, t2)
    cell3_root = {}
    three_cells = []
    cell3_of = {}
    for t in range(tri.n):
        r = uf3.find(t)
        if r not in cell3_root:
            cell3_root[r] = len(three_cells)
            three_cells.append([])
        cell3_of[t] = cell3_root[r]
        three_cells[cell3_root[r]].append(t)

    # classify edges by their opaque slots
    walks = _edge_walks(tri)
    interior2 = []  # (edge walk id, slot positions) with exactly two opaque
    one_cells = []  # (edge walk id, opaque slot positions) with >= 3
    slot_face = []  # per walk: face class id per position
    for w_id, walk in enumerate(walks):
        kfaces = [face_index[(t, exit_face)] for t, _a, _b, exit_face in walk]
        slot_face.append(kfaces)
        ops = [i for i, k in enumerate(kfaces) if opaque[k]]
        if len(ops) == 1:
            raise InconsistentCells("edge with exactly one opaque face")
        if len(ops) == 2:
            interior2.append((w_id, ops))
        elif len(ops) >= 3:
            one_cells.append((w_id, ops))

    # polygon assembly: union opaque faces across interior-to-2-cell edges
    uf2 = _UnionFind(len(faces))
    for w_id, (i, j) in interior2:
        uf2.union(slot_face[w_id][i], slot_face[w_id][j])

    # a slot in rep1 coordinates: the walk's oriented edge pair mapped to
    # the first representative of the face class
    def slot_r1(w_id, pos):
        t, a, b, exit_face = walks[w_id][pos]
        k = slot_face[w_id][pos]
        rep1, rep2 = faces[k]
        if (t, exit_face) == rep1:
            return k, (a, b), 1
        if (t, exit_face) != rep2:
            raise InconsistentCells("slot does not match its face class")
        g = tri.adj[4 * t + exit_face]
        _t1, p = divmod(g, 24)
        img = PERMS[p]
        return k, (img[a], img[b]), 2

    # polygon side coherence: orient[k] = +1 when rep1 faces global side A
    adjacency = {}  # face k -> list of (other face, relative orientation)
    for w_id, (i, j) in interior2:
        ki, pair_i, side_i = slot_r1(w_id, i)
        kj, pair_j, side_j = slot_r1(w_id, j)
        # the sector between slot i and slot j (after i, before j) is seen
        # from rep(other side of i's crossing) and rep(side of j's wedge)
        after_i = 3 - side_i  # the wedge after slot i lies on the other rep
        before_j = side_j
        rel = 1 if after_i == before_j else -1
        adjacency.setdefault(ki, []).append((kj, rel, w_id, (i, j)))
        adjacency.setdefault(kj, []).append((ki, rel, w_id, (j, i)))

    orient = {}
    for k in range(len(faces)):
        if not opaque[k] or k in orient:
            continue
        orient[k] = 1
        stack = [k]
        while stack:
            cur = stack.pop()
            for other, rel, _w, _pos in adjacency.get(cur, ()):
                need = orient[cur] * rel
                if other not in orient:
                    orient[other] = need
                    stack.append(other)
                elif orient[other] != need:
                    raise InconsistentCells("one-sided polygon")

    # interior-edge mates: (face, unordered pair) -> (face', oriented map)
    mate = {}
    for w_id, (i, j) in interior2:
        ki, pair_i, _si = slot_r1(w_id, i)
        kj, pair_j, _sj = slot_r1(w_id, j)
        mate[(ki, frozenset(pair_i))] = (kj, pair_i, pair_j)
        mate[(kj, frozenset(pair_j))] = (ki, pair_j, pair_i)

    # boundary slots per polygon root, with sector sides
    boundary_slots = {}  # (face k, frozenset pair) -> slot record
    for w_id, ops in one_cells:
        walk = walks[w_id]
        m = len(ops)
        for a_idx in range(m):
            pos = ops[a_idx]
            k, pair, side = slot_r1(w_id, pos)
            if not opaque[k]:
                raise InconsistentCells("boundary slot on a transparent face")
            # global sides of the sectors before/after this slot
            g_before = orient[k] if side == 1 else -orient[k]
            g_after = -g_before
            rec = {
                "face": k,
                "pair": pair,  # oriented with the edge walk
                "walk": w_id,
                "pos": pos,
                "side_before": g_before,
                "side_after": g_after,
            }
            key = (k, frozenset(pair))
            if key in boundary_slots:
                raise InconsistentCells("duplicate boundary slot")
            boundary_slots[key] = rec

    # assemble polygons
    root_faces = {}
    for k in range(len(faces)):
        if opaque[k]:
            root_faces.setdefault(uf2.find(k), []).append(k)

    two_cells = []
    cell2_of_slot = {}
    for root, ks in sorted(root_faces.items()):
        tri_count = len(ks)
        # boundary walk: rotate around polygon corners across interior edges
        b_slots = [
            key for key in boundary_slots if boundary_slots[key]["face"] in ks
        ]
        if not b_slots:
            raise InconsistentCells("polygon without boundary")
        start_key = min(b_slots)
        k0 = boundary_slots[start_key]["face"]
        x0, y0 = boundary_slots[start_key]["pair"]
        cycle = []
        k_cur, x_cur, y_cur = k0, x0, y0
        while True:
            rec = boundary_slots[(k_cur, frozenset((x_cur, y_cur)))]
            flip = rec["pair"] != (x_cur, y_cur)
            cycle.append(
                (
                    rec["walk"],
                    rec["pos"],
                    flip,
                    rec["side_before"],
                    rec["side_after"],
                    k_cur,
                    (x_cur, y_cur),
                )
            )
            # rotate around corner y_cur to the next boundary side
            k_rot, y_rot = k_cur, y_cur
            x_rot = x_cur
            while True:
                rep1_face = faces[k_rot][0][1]
                corners = [v for v in range(4) if v != rep1_face]
                (z_rot,) = [v for v in corners if v != x_rot and v != y_rot]
                key = (k_rot, frozenset((y_rot, z_rot)))
                if key in boundary_slots:
                    k_cur, x_cur, y_cur = k_rot, y_rot, z_rot
                    break
                k_next, pair_here, pair_there = mate[key]
                here = {pair_here[0]: pair_there[0], pair_here[1]: pair_there[1]}
                y_rot = here[y_rot]
                x_rot = here[z_rot]  # arrived through this edge
                k_rot = k_next
            if (k_cur, x_cur, y_cur) == (k0, x0, y0):
                break
            if len(cycle) > 4 * len(b_slots) + 4:
                raise InconsistentCells("polygon boundary walk does not close")
        if len(cycle) != len(b_slots):
            raise InconsistentCells("polygon boundary is not a single cycle")

        # apexes: 3-cells adjacent to the two global sides
        k_any = ks[0]
        rep1, rep2 = faces[k_any]
        if orient[k_any] == 1:
            apex_a, apex_b = cell3_of[rep1[0]], cell3_of[rep2[0]]
        else:
            apex_a, apex_b = cell3_of[rep2[0]], cell3_of[rep1[0]]
        # verify side consistency across the polygon
        for k in ks:
            rep1, rep2 = faces[k]
            ca = cell3_of[rep1[0]] if orient[k] == 1 else cell3_of[rep2[0]]
            cb = cell3_of[rep2[0]] if orient[k] == 1 else cell3_of[rep1[0]]
            if (ca, cb) != (apex_a, apex_b):
                raise InconsistentCells("polygon sides straddle 3-cells")

        cell = TwoCell(
            triangles=sorted(ks),
            boundary=[entry[:5] for entry in cycle],
            apex_a=apex_a,
            apex_b=apex_b,
        )
        for s_idx, entry in enumerate(cycle):
            cell2_of_slot[(entry[0], entry[1])] = (len(two_cells), s_idx)
        two_cells.append(cell)

    decomposition = CellDecomposition(
        three_cells=[sorted(c) for c in three_cells],
        cell3_of=cell3_of,
        two_cells=two_cells,
        one_cells=[(w_id, ops) for w_id, ops in one_cells],
    )
    decomposition._slot_lookup = cell2_of_slot
    decomposition._walks = walks
    return decomposition


def retriangulate(cells):
    """Canonical retriangulation: one tetrahedron per polygon boundary side.

    Labels of the diamond tetrahedron of side k of a polygon:
    0 -> center of the side-A 3-cell, 1 -> center of the side-B 3-cell,
    2 -> start corner, 3 -> end corner of the boundary side.
    """
    tet_ids = {}
    count = 0
    for c_id, cell in enumerate(cells.two_cells):
        for s_idx in range(cell.sides):
            tet_ids[(c_id, s_idx)] = count
            count += 1

    adj = [-1] * (4 * count)

    def install(t1, f1, t2, f2, images):
        p = perm_from_images(images)
        if PERMS[p][f1] != f2:
            raise InconsistentCells("retriangulation gluing is inconsistent")
        adj[4 * t1 + f1] = t2 * 24 + p
        inv_images = [0] * 4
        for a, b in enumerate(images):
            inv_images[b] = a
        adj[4 * t2 + f2] = t1 * 24 + perm_from_images(inv_images)

    # axial gluings around each polygon
    for c_id, cell in enumerate(cells.two_cells):
        n = cell.sides
        for k in range(n):
            t1 = tet_ids[(c_id, k)]
            t2 = tet_ids[(c_id, (k + 1) % n)]
            # face opposite 2 of tet k meets face opposite 3 of tet k+1
            install(t1, 2, t2, 3, (0, 1, 3, 2))

    # lateral gluings: consecutive opaque slots around each 1-cell
    slot_lookup = cells._slot_lookup
    for w_id, ops in cells.one_cells:
        m = len(ops)
        for a_idx in range(m):
            pos_s = ops[a_idx]
            pos_t = ops[(a_idx + 1) % m]
            c_s, k_s = slot_lookup[(w_id, pos_s)]
            c_t, k_t = slot_lookup[(w_id, pos_t)]
            cell_s = cells.two_cells[c_s]
            cell_t = cells.two_cells[c_t]
            _w, _p, flip_s, _sb, sa = cell_s.boundary[k_s]
            _w2, _p2, flip_t, tb, _ta = cell_t.boundary[k_t]
            # apex labels on the shared sector: side_after of s, side_before of t
            apex_s = 0 if sa == 1 else 1
            apex_t = 0 if tb == 1 else 1
            cell3_s = (cell_s.apex_a, cell_s.apex_b)[apex_s]
            cell3_t = (cell_t.apex_a, cell_t.apex_b)[apex_t]
            if cell3_s != cell3_t:
                raise InconsistentCells("lateral sector crosses 3-cells")
            images = [0] * 4
            images[apex_s] = apex_t
            images[1 - apex_s] = 1 - apex_t
            # endpoint labels 2/3 follow the 1-cell's walk orientation
            if flip_s == flip_t:
                images[2], images[3] = 2, 3
            else:
                images[2], images[3] = 3, 2
            t_s = tet_ids[(c_s, k_s)]
            t_t = tet_ids[(c_t, k_t)]
            f_s = 1 - apex_s
            f_t = 1 - apex_t
            if adj[4 * t_s + f_s] != -1:
                continue  # installed from the mate side
            install(t_s, f_s, t_t, f_t, tuple(images))

    if any(g < 0 for g in adj):
        raise InconsistentCells("retriangulation left open faces")
    return Triangulation(count, adj)


@dataclass
class IsometryResult:
    """Isometry signature plus the intermediate canonical objects."""

    signature: str
    regime: str  # "simplicial" | "retriangulated"
    proto: Triangulation
    shapes: list
    tilt_table: object
    cells: CellDecomposition
    retriangulation: Triangulation | None = None

    @property
    def canonical_triangulation(self):
        return self.retriangulation if self.retriangulation is not None else self.proto


def isometry_signature(tri, seed=0):
    """Complete isometry invariant of the underlying tetrahedral manifold.

    Canonizes, assembles the cell decomposition from the certified
    opacities, and takes the signature of the canonical retriangulation,
    or of the proto-canonical triangulation itself when the decomposition
    is simplicial.  The regime prefix keeps the two namespaces apart.
    """
    proto, shapes, table = canonize(tri, seed=seed)
    cells = assemble_cells(proto, table)
    if cells.is_simplicial():
        return IsometryResult(
            signature="S:" + canonical_signature(proto),
            regime="simplicial",
            proto=proto,
            shapes=shapes,
            tilt_table=table,
            cells=cells,
        )
    retri = retriangulate(cells)
    return IsometryResult(
        signature="R:" + canonical_signature(retri),
        regime="retriangulated",
        proto=proto,
        shapes=shapes,
        tilt_table=table,
        cells=cells,
        retriangulation=retri,
    )
