"""2-3 and 3-2 moves with exact shape transport through the shape field.

A 2-3 move replaces two tetrahedra sharing a face by three around the
dual edge; a 3-2 move is its inverse.  When shapes are supplied, the
five ideal points of the bipyramid are developed exactly in the chart
of the first tetrahedron (projective points over the shape field, with
mirrored neighbors placed via the conjugated shape) and the new shapes
are cross-ratios of those points.  A move is geometric exactly when the
turn factors around the new (respectively old) axis rotate consistently,
which shows up as a uniform imaginary-part sign; mixed signs mean the
new tetrahedra would overlap and the move is rejected.  With
``geometric=False`` negatively oriented results are allowed (the
transport is rational algebra, so the gluing equations stay exactly
satisfied); this is only sound on coherently oriented triangulations
where the mirror bookkeeping is inert, and is what lets canonization
tunnel between geometric triangulations.

The combinatorial construction is split out (_two_three_build,
_three_two_build, _trace_order3) so that the numeric pilot in pilot.py
can drive the identical combinatorics with floating-point shapes.
"""

from .errors import DegenerateShape, FlatOrNegative, InvalidEdge, InvalidFace
from .exact import ShapeNum
from .perm4 import INV, MUL, PARITY, PERMS, perm_from_images
from .shapes import (
    INF_POINT,
    ONE_POINT,
    ZERO_POINT,
    cross_ratio,
    place_fourth_vertex,
    proj_equal,
)
from .triangulation import Triangulation

_CYCLIC_PAIRS = ((0, 1), (1, 2), (2, 0))


def _translate_external(tri, slots, keep_index, new_count):
    """Rebuild the gluing table after replacing some tetrahedra.

    ``slots`` maps each retired (tet, face) that survives as an external
    face to (new_tet, new_face, lam) where lam (a perm index) sends the
    new tetrahedron's labels to the retired tetrahedron's labels.
    ``keep_index`` maps surviving old tets to their new indices.
    """
    adj = [-1] * (4 * new_count)
    retired = {t for (t, _f) in slots}

    for t in keep_index:
        for f in range(4):
            g = tri.adj[4 * t + f]
            if g < 0:
                continue
            t2, p = divmod(g, 24)
            if t2 in keep_index:
                adj[4 * keep_index[t] + f] = keep_index[t2] * 24 + p

    for (t, f), (nt, nf, lam) in slots.items():
        g = tri.adj[4 * t + f]
        if g < 0:
            continue
        t2, p = divmod(g, 24)
        if t2 in retired or (t2, PERMS[p][f]) in slots:
            f2 = PERMS[p][f]
            nt2, nf2, lam2 = slots[(t2, f2)]
            # new1 -> old1 -> old2 -> new2
            q = MUL[MUL[INV[lam2]][p]][lam]
            adj[4 * nt + nf] = nt2 * 24 + q
            adj[4 * nt2 + nf2] = nt * 24 + INV[q]
        else:
            q = MUL[p][lam]
            adj[4 * nt + nf] = keep_index[t2] * 24 + q
            adj[4 * keep_index[t2] + PERMS[p][f]] = nt * 24 + INV[q]
    return adj


def two_three_data(tri, tet, face):
    """Validated combinatorial context of a 2-3 move.

    Returns (t_a, f_a, t_b, f_b, p_ab, face_verts) or raises InvalidFace.
    """
    g = tri.adj[4 * tet + face]
    if g < 0:
        raise InvalidFace("2-3 move needs an interior face")
    t_b, p_ab = divmod(g, 24)
    if t_b == tet:
        raise InvalidFace("2-3 move needs the face glued to a distinct tetrahedron")
    face_verts = [v for v in range(4) if v != face]
    return tet, face, t_b, PERMS[p_ab][face], p_ab, face_verts


def _two_three_build(tri, tet, face, apex_first):
    """The triangulation after the 2-3 move, plus the surviving-tet list.

    New tetrahedron k (of 3, appended after the survivors) has labels
    (apex_a, apex_b, V_i, V_j) for the cyclic vertex pair (i, j) of the
    old face, with the apexes swapped when apex_first is false.
    """
    t_a, f_a, t_b, _f_b, p_ab, face_verts = two_three_data(tri, tet, face)
    img_ab = PERMS[p_ab]

    keep = [t for t in range(tri.n) if t != t_a and t != t_b]
    keep_index = {t: i for i, t in enumerate(keep)}
    base = len(keep)

    la, lb = (0, 1) if apex_first else (1, 0)
    slots = {}
    for k, (i, j) in enumerate(_CYCLIC_PAIRS):
        m = 3 - i - j
        lam_a = [0, 0, 0, 0]
        lam_a[la] = f_a
        lam_a[lb] = face_verts[m]
        lam_a[2] = face_verts[i]
        lam_a[3] = face_verts[j]
        lam_b = [img_ab[v] for v in lam_a]
        lam_b[la], lam_b[lb] = lam_b[lb], lam_b[la]
        slots[(t_a, face_verts[m])] = (base + k, lb, perm_from_images(lam_a))
        slots[(t_b, img_ab[face_verts[m]])] = (base + k, la, perm_from_images(lam_b))

    adj = _translate_external(tri, slots, keep_index, base + 3)

    p_int = perm_from_images((0, 1, 3, 2))
    for k in range(3):
        prev = (k + 2) % 3
        adj[4 * (base + k) + 3] = (base + prev) * 24 + p_int
        adj[4 * (base + prev) + 2] = (base + k) * 24 + p_int

    return Triangulation(base + 3, adj), keep


def two_three_turns(tri, tet, face, shapes):
    """Exact turn factors of the bipyramid around the prospective new edge.

    The k-th value is the shape the k-th new tetrahedron would carry
    under the apex-first labeling; DegenerateShape propagates as
    FlatOrNegative.
    """
    t_a, f_a, t_b, _f_b, p_ab, face_verts = two_three_data(tri, tet, face)
    img_ab = PERMS[p_ab]
    targets = (ZERO_POINT, ONE_POINT, INF_POINT)
    placed_a = {face_verts[m]: targets[m] for m in range(3)}
    p_apex_a = place_fourth_vertex(shapes[t_a], False, placed_a)
    mirror_b = PARITY[p_ab] == 0
    placed_b = {img_ab[face_verts[m]]: targets[m] for m in range(3)}
    p_apex_b = place_fourth_vertex(shapes[t_b], mirror_b, placed_b)
    try:
        return [
            cross_ratio(p_apex_a, p_apex_b, targets[i], targets[j])
            for i, j in _CYCLIC_PAIRS
        ]
    except DegenerateShape as exc:
        raise FlatOrNegative(str(exc)) from exc


def two_three_move(tri, tet, face, shapes=None, geometric=True, branch=None):
    """Replace the two tetrahedra glued along (tet, face) by three.

    Returns (triangulation, shapes).  Raises FlatOrNegative when a new
    tetrahedron would be flat, or (in geometric mode) when the three do
    not tile the bipyramid coherently.  ``branch`` forces the apex
    labeling (used when replaying a pilot script); the stored shapes
    always match the chosen labels, so forcing is value-safe.
    """
    apex_first = True
    new_shapes = None
    if shapes is not None:
        turns = two_three_turns(tri, tet, face, shapes)
        signs = {w.im_sign() for w in turns}
        if 0 in signs:
            raise FlatOrNegative("2-3 move would create a flat tetrahedron")
        if branch is not None:
            apex_first = branch
            new_shapes = turns if branch else [ShapeNum(1) / w for w in turns]
        elif signs == {1}:
            new_shapes = turns
        elif signs == {-1}:
            apex_first = False
            new_shapes = [ShapeNum(1) / w for w in turns]
        elif not geometric:
            new_shapes = turns  # keep the chart labeling; mixed orientation
        else:
            raise FlatOrNegative("2-3 move would create folded tetrahedra")

    out, keep = _two_three_build(tri, tet, face, apex_first)
    if shapes is None:
        return out, None
    return out, [shapes[t] for t in keep] + new_shapes


def _trace_order3(tri, edge):
    """Wedge walk data of an order-3 edge: per wedge (tet, a, b, exit, entry).

    Also returns the parities of the three gluings crossed.  Raises
    InvalidEdge unless the edge is closed of order 3 with distinct
    tetrahedra.
    """
    if edge.open or edge.order != 3:
        raise InvalidEdge("3-2 move needs a closed edge of order 3")
    tets = [t for t, _a, _b in edge.incidences]
    if len(set(tets)) != 3:
        raise InvalidEdge("3-2 move needs three distinct tetrahedra")

    t0, a0, b0 = edge.incidences[0]
    c = [v for v in range(4) if v != a0 and v != b0]
    wedges = []
    parities = []
    state = (t0, a0, b0, c[1])
    for _i in range(3):
        t, a, b, exit_face = state
        ent_face = 6 - a - b - exit_face
        wedges.append((t, a, b, exit_face, ent_face))
        g = tri.adj[4 * t + exit_face]
        t2, p = divmod(g, 24)
        parities.append(PARITY[p])
        img = PERMS[p]
        a2, b2 = img[a], img[b]
        entry = img[exit_face]
        state = (t2, a2, b2, 6 - a2 - b2 - entry)
    if state[0] != t0 or {state[1], state[2]} != {a0, b0}:
        raise InvalidEdge("edge walk did not close after three wedges")
    return wedges, parities


def _three_two_build(tri, wedges, a_normal, b_normal):
    """The triangulation after the 3-2 move, plus the surviving-tet list.

    The two new tetrahedra (appended after the survivors) carry labels
    (V0, V1, V2, P) and (V0, V1, V2, Q) over the equatorial vertices and
    the two ends of the removed axis, with labels 0 and 1 swapped when
    the corresponding ``normal`` flag is false.
    """
    tets = {t for t, _a, _b, _e, _n in wedges}
    keep = [t for t in range(tri.n) if t not in tets]
    keep_index = {t: i for i, t in enumerate(keep)}
    base = len(keep)
    idx_a, idx_b = base, base + 1

    def eq_label(normal, m):
        return m if normal else (1, 0, 2)[m]

    slots = {}
    for i in range(3):
        t, a, b, exit_face, ent_face = wedges[i]
        lam_a = [0, 0, 0, 0]
        lam_a[3] = a
        lam_a[eq_label(a_normal, i)] = exit_face
        lam_a[eq_label(a_normal, (i + 1) % 3)] = ent_face
        lam_a[eq_label(a_normal, (i + 2) % 3)] = b
        lam_b = [0, 0, 0, 0]
        lam_b[3] = b
        lam_b[eq_label(b_normal, i)] = exit_face
        lam_b[eq_label(b_normal, (i + 1) % 3)] = ent_face
        lam_b[eq_label(b_normal, (i + 2) % 3)] = a
        slots[(t, b)] = (
            idx_a, eq_label(a_normal, (i + 2) % 3), perm_from_images(lam_a)
        )
        slots[(t, a)] = (
            idx_b, eq_label(b_normal, (i + 2) % 3), perm_from_images(lam_b)
        )

    adj = _translate_external(tri, slots, keep_index, base + 2)

    images = [0, 0, 0, 3]
    for m in range(3):
        images[eq_label(a_normal, m)] = eq_label(b_normal, m)
    p_int = perm_from_images(images)
    adj[4 * idx_a + 3] = idx_b * 24 + p_int
    adj[4 * idx_b + 3] = idx_a * 24 + INV[p_int]

    return Triangulation(base + 2, adj), keep


def three_two_halves(tri, wedges, parities, shapes):
    """Exact shapes of the two prospective halves, apex-normal labeling.

    Develops the three wedges around the axis and returns (z_a, z_b) for
    the labelings (V0, V1, V2, P) and (V0, V1, V2, Q).  Raises
    FlatOrNegative when the development degenerates or does not close.
    """
    eq = [ONE_POINT]
    mirror = False
    for i in range(3):
        t, a, b, exit_face, _ent = wedges[i]
        placed = {a: INF_POINT, b: ZERO_POINT, exit_face: eq[i]}
        eq.append(place_fourth_vertex(shapes[t], mirror, placed))
        mirror ^= parities[i] == 0
    if mirror or not proj_equal(eq[3], eq[0]):
        raise FlatOrNegative("shapes do not close up around the edge")
    try:
        z_a = cross_ratio(eq[0], eq[1], eq[2], INF_POINT)
        z_b = cross_ratio(eq[0], eq[1], eq[2], ZERO_POINT)
    except DegenerateShape as exc:
        raise FlatOrNegative(str(exc)) from exc
    return z_a, z_b


def three_two_move(tri, edge, shapes=None, geometric=True):
    """Replace the three tetrahedra around an order-3 edge by two.

    Inverse of two_three_move, with the same exactness and geometricity
    contract.
    """
    wedges, parities = _trace_order3(tri, edge)

    a_normal = True
    b_normal = False
    new_a = new_b = None
    if shapes is not None:
        z_a, z_b = three_two_halves(tri, wedges, parities, shapes)
        sa, sb = z_a.im_sign(), z_b.im_sign()
        if sa == 0 or sb == 0:
            raise FlatOrNegative("3-2 move would create a flat tetrahedron")
        if sa != sb:
            a_normal = True
            b_normal = True
            if sa < 0:
                a_normal = False
                z_a = ShapeNum(1) / z_a
            else:
                b_normal = False
                z_b = ShapeNum(1) / z_b
        elif geometric:
            raise FlatOrNegative("3-2 move would create folded tetrahedra")
        else:
            z_b = ShapeNum(1) / z_b  # match the default swapped labeling
        new_a, new_b = z_a, z_b

    out, keep = _three_two_build(tri, wedges, a_normal, b_normal)
    if shapes is None:
        return out, None
    return out, [shapes[t] for t in keep] + [new_a, new_b]
