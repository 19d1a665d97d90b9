"""Geometric decoration and certification of ideal triangulations.

Everything here is exact: shapes live in the quadratic field of the
regular tessellation, cusp cross-section lengths and tilts in the field
of sums of square roots.  Floating point never enters; the only
approximate objects are outward-rounded interval enclosures used to
decide signs and the logarithmic edge condition, and those decisions are
certified by interval semantics.

The pipeline for one tessellation: assign the regular shape everywhere,
develop cusp cross sections, normalize all cusps to area sqrt(3), read
off circumradii and tilts, and 2-3 away positive-tilt faces (with exact
shape transport) until the triangulation is proto-canonical.  The five
certification checks are exposed individually and as a report.
"""

import random
from fractions import Fraction
from functools import cmp_to_key

from .errors import (
    CanonizationFailed,
    FieldViolation,
    FlatOrNegative,
    InconsistentHolonomy,
    InvalidEdge,
    InvalidFace,
    NotCTT,
    NotProtoCanonical,
    PrecisionExhausted,
)
from .exact import ShapeNum, SqrtSum, ZETA
from .intervals import pi_interval
from .moves import three_two_move, two_three_move
from .perm4 import MUL, PARITY, PERMS, perm_from_images
from .shapes import EVEN_COMPLETION, edge_param, shape_params
from .triangulation import Triangulation

_SQRT3 = SqrtSum.term(1, 3)
_HALF = Fraction(1, 2)


def is_ctt(tri):
    """Closed, connected, every edge class of order 6, no reversing edges."""
    if not tri.is_closed() or not tri.is_connected():
        return False
    return all(
        e.order == 6 and not e.orientation_reversing for e in tri.edge_classes()
    )


def regular_shapes(tri):
    """The exact regular shape for every tetrahedron of a tessellation."""
    if not is_ctt(tri):
        raise NotCTT("regular shapes require all edges of order 6")
    return [ZETA] * tri.n


# -- certification checks (1) and (2) -------------------------------------------

def _edge_product(tri, params, edge):
    """Exact product of edge parameters around a closed edge class.

    Crossing an orientation-incompatible gluing (even permutation) flips
    the local chart, after which a wedge contributes 1 / conjugate(z)
    instead of z; this is exactly the non-orientable rectangular form.
    """
    t0, a0, b0 = edge.incidences[0]
    c = [v for v in range(4) if v != a0 and v != b0]
    state = (t0, a0, b0, c[1])
    start = state
    product = ShapeNum(1)
    mirrored = False
    while True:
        t, a, b, exit_face = state
        z = edge_param(params[t], a, b)
        if mirrored:
            product = product * (ShapeNum(1) / z.conjugate())
        else:
            product = product * z
        g = tri.adj[4 * t + exit_face]
        t2, p = divmod(g, 24)
        if PARITY[p] == 0:
            mirrored = not mirrored
        img = PERMS[p]
        a2, b2 = img[a], img[b]
        entry = img[exit_face]
        state = (t2, a2, b2, 6 - a2 - b2 - entry)
        if state == start:
            break
    return product


def verify_rectangular(tri, shapes):
    """Check (1): every edge's rectangular gluing product equals 1 exactly."""
    params = [shape_params(z) for z in shapes]
    for edge in tri.edge_classes():
        if edge.open:
            continue
        if _edge_product(tri, params, edge) != ShapeNum(1):
            return False
    return True


def verify_positive_orientation(tri, shapes):
    """Check (2): Im(z) > 0 for every tetrahedron (exact, hence certified)."""
    return all(z.im_sign() > 0 for z in shapes)


def verify_logarithmic(tri, shapes, tol=Fraction(1, 10 ** 7)):
    """Check (3): each edge's angle sum differs from 2*pi by less than tol.

    Uses interval enclosures of the dihedral angles; combined with the
    exact rectangular form and positive orientation this certifies the
    logarithmic gluing equations exactly, since the error is then pinned
    to a multiple of 2*pi*i.
    """
    params = [shape_params(z) for z in shapes]
    angle_lists = []
    for edge in tri.edge_classes():
        if edge.open:
            continue
        angle_lists.append(
            [edge_param(params[t], a, b) for t, a, b in edge.incidences]
        )
    prec = 64
    while prec <= 1 << 13:
        ok = True
        for zs in angle_lists:
            total = None
            for z in zs:
                # a mirrored wedge contributes 1/conj(z), whose argument
                # equals that of z, so the plain argument sum is correct
                a = z.interval(prec).arg()
                total = a if total is None else total + a
            two_pi = pi_interval(prec).scale(2)
            diff = total - two_pi
            if diff.is_inside(-tol, tol):
                continue
            lo, hi = diff.to_fractions()
            if lo >= tol or hi <= -tol:
                return False
            ok = False
            break
        if ok:
            return True
        prec *= 2
    raise PrecisionExhausted("logarithmic edge check undecided")


# -- cusp cross sections ---------------------------------------------------------

class CuspCrossSection:
    """Exact horotorus cross-section data for every cusp.

    ``lengths`` maps a triangle side (tet, vertex, face) to its SqrtSum
    length; ``areas`` maps (tet, vertex) to the Euclidean triangle area;
    ``cusp_of`` maps (tet, vertex) to the cusp index and ``cusp_areas``
    lists the per-cusp totals.
    """

    __slots__ = ("lengths", "areas", "cusp_of", "cusp_areas")

    def __init__(self, lengths, areas, cusp_of, cusp_areas):
        self.lengths = lengths
        self.areas = areas
        self.cusp_of = cusp_of
        self.cusp_areas = cusp_areas

    def scaled(self, factors):
        """Scale every cusp by its factor (areas by the factor, lengths
        by its square root)."""
        sqrt_factors = [SqrtSum.sqrt_rational(f) for f in factors]
        lengths = {
            side: length * sqrt_factors[self.cusp_of[(side[0], side[1])]]
            for side, length in self.lengths.items()
        }
        areas = {
            tv: area * factors[self.cusp_of[tv]] for tv, area in self.areas.items()
        }
        cusp_areas = [a * f for a, f in zip(self.cusp_areas, factors)]
        return CuspCrossSection(lengths, areas, self.cusp_of, cusp_areas)


def _side_ratio(params_t, v, f_new, f_known):
    """Multiplier m with len(side f_new) = m * len(side f_known)."""
    u = 6 - v - f_new - f_known
    z = edge_param(params_t, v, u)
    mod = z.abs_sqrtsum()
    if EVEN_COMPLETION[(v, u)] == (f_new, f_known):
        return mod
    return SqrtSum.from_rational(1) / mod


def cusp_cross_section(tri, shapes):
    """Develop exact cusp cross sections (certification check (4) built in).

    Per cusp one side gets length 1 and the edge-ratio rule propagates
    the rest; every re-derivation of an already known length must agree
    exactly, otherwise the structure is incomplete and the function
    raises InconsistentHolonomy.
    """
    params = [shape_params(z) for z in shapes]
    cusps = tri.vertex_links()
    cusp_of = {}
    for i, cls in enumerate(cusps):
        for tv in cls.corners:
            cusp_of[tv] = i

    lengths = {}
    one = SqrtSum.from_rational(1)
    for i, cls in enumerate(cusps):
        t0, v0 = min(cls.corners)
        f0 = min(f for f in range(4) if f != v0)
        seed = (t0, v0, f0)
        lengths[seed] = one
        stack = [seed]
        while stack:
            t, v, f = stack.pop()
            cur = lengths[(t, v, f)]
            # within the triangle
            for f2 in range(4):
                if f2 == v or f2 == f:
                    continue
                val = cur * _side_ratio(params[t], v, f2, f)
                key = (t, v, f2)
                if key in lengths:
                    if lengths[key] != val:
                        raise InconsistentHolonomy(
                            f"cusp recursion mismatch at {key}"
                        )
                else:
                    lengths[key] = val
                    stack.append(key)
            # across the face gluing
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            key = (t2, img[v], img[f])
            if key in lengths:
                if lengths[key] != cur:
                    raise InconsistentHolonomy(f"cusp gluing mismatch at {key}")
            else:
                lengths[key] = cur
                stack.append(key)

    areas = {}
    for t in range(tri.n):
        for v in range(4):
            u = min(x for x in range(4) if x != v)
            k, l = EVEN_COMPLETION[(v, u)]
            z = edge_param(params[t], v, u)
            side = lengths[(t, v, l)]
            sq = (side * side).rational_value()
            # area = len(side_l)^2 * Im(z(v,u)) / 2, and Im = b * sqrt(3)
            areas[(t, v)] = SqrtSum.term(z.b * sq * _HALF, 3)

    cusp_areas = [SqrtSum() for _ in cusps]
    for tv, a in areas.items():
        i = cusp_of[tv]
        cusp_areas[i] = cusp_areas[i] + a
    return CuspCrossSection(lengths, areas, cusp_of, cusp_areas)


def verify_cusp_equations(tri, shapes):
    """Check (4): the edge-ratio recursion closes up exactly."""
    try:
        cusp_cross_section(tri, shapes)
    except InconsistentHolonomy:
        return False
    return True


def normalize_cusps(cs, target=_SQRT3):
    """Scale every cusp cross section to the common target area.

    With target sqrt(3) all scaled lengths stay in the square-root field:
    tessellation cusp areas are rational multiples of sqrt(3), so each
    scaling factor is rational.  A cusp area outside Q+*sqrt(3) signals a
    bug or non-tessellation input and raises FieldViolation.
    """
    t_coeff = target.single_sqrt3_coeff()
    if t_coeff is None:
        raise FieldViolation("target area must be a rational multiple of sqrt(3)")
    factors = []
    for area in cs.cusp_areas:
        q = area.single_sqrt3_coeff()
        if q is None or q <= 0:
            raise FieldViolation(f"cusp area {area!r} is not in Q+*sqrt(3)")
        factors.append(t_coeff / q)
    return cs.scaled(factors)


# -- tilts -----------------------------------------------------------------------

class TiltTable:
    """Exact face tilts and the derived opacities.

    ``faces`` lists the face classes as ((t1, f1), (t2, f2)) pairs;
    ``tilt`` the SqrtSum tilt per class; ``sign`` its exact sign.  A face
    is opaque (part of a 2-cell of the canonical decomposition) when its
    tilt is negative and transparent (interior to a 3-cell) at zero.
    """

    __slots__ = ("faces", "tilt", "sign", "face_index")

    def __init__(self, faces, tilt, sign):
        self.faces = faces
        self.tilt = tilt
        self.sign = sign
        self.face_index = {}
        for k, pair in enumerate(faces):
            self.face_index[pair[0]] = k
            self.face_index[pair[1]] = k

    def is_proto_canonical(self):
        return all(s <= 0 for s in self.sign)

    def opacity(self, k):
        if self.sign[k] > 0:
            raise NotProtoCanonical(self.faces[k], self.tilt[k])
        return "opaque" if self.sign[k] < 0 else "transparent"

    def transparent_faces(self):
        return [k for k, s in enumerate(self.sign) if s == 0]

    def positive_faces(self):
        """Face-class ids with positive tilt: largest tilt first, exact
        comparisons, ties by canonical face index."""
        pos = [k for k, s in enumerate(self.sign) if s > 0]

        def cmp(a, b):
            s = (self.tilt[b] - self.tilt[a]).sign()
            if s:
                return s
            return -1 if self.faces[a][0] < self.faces[b][0] else 1

        pos.sort(key=cmp_to_key(cmp))
        return pos


def _face_class_pairs(tri):
    pairs = []
    for t in range(tri.n):
        for f in range(4):
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            other = (t2, PERMS[p][f])
            if (t, f) <= other:
                pairs.append(((t, f), other))
    return pairs


def compute_tilts(tri, shapes, cs=None):
    """TiltTable of a geometric structure (cross sections normalized here)."""
    params = [shape_params(z) for z in shapes]
    if cs is None:
        cs = normalize_cusps(cusp_cross_section(tri, shapes))

    # circumradius R = product of the three sides / (4 * area)
    radius = {}
    for t in range(tri.n):
        for v in range(4):
            sides = [cs.lengths[(t, v, f)] for f in range(4) if f != v]
            prod = sides[0] * sides[1] * sides[2]
            radius[(t, v)] = prod / (cs.areas[(t, v)] * 4)

    vertex_tilt = {}
    for t in range(tri.n):
        for v in range(4):
            total = radius[(t, v)]
            for u in range(4):
                if u == v:
                    continue
                z = edge_param(params[t], v, u)
                # Re(z)/|z| as an exact SqrtSum
                cosine = SqrtSum.from_rational(z.a) / z.abs_sqrtsum()
                total = total - radius[(t, u)] * cosine
            vertex_tilt[(t, v)] = total

    faces = _face_class_pairs(tri)
    tilt = []
    sign = []
    for (t1, f1), (t2, f2) in faces:
        value = vertex_tilt[(t1, f1)] + vertex_tilt[(t2, f2)]
        tilt.append(value)
        sign.append(value.sign())
    return TiltTable(faces, tilt, sign)


def tilts(tri, shapes, cs=None):
    """Certified tilt table; raises NotProtoCanonical on a positive tilt."""
    table = compute_tilts(tri, shapes, cs)
    for k, s in enumerate(table.sign):
        if s > 0:
            raise NotProtoCanonical(table.faces[k], table.tilt[k])
    return table


def certify_canonical_simplicial(tri, shapes):
    """True iff every face tilt is certified strictly negative.

    In that case the triangulation itself is the canonical cell
    decomposition (no transparent faces, all cells simplices).  An exact
    zero tilt returns False; exact arithmetic always decides, so
    Indeterminate cannot occur on field input.
    """
    table = compute_tilts(tri, shapes)
    return all(s < 0 for s in table.sign)


def certification_report(tri, shapes, tol=Fraction(1, 10 ** 7)):
    """Pass/fail lines for the five checks, with witnesses on failure."""
    lines = []
    ok1 = verify_rectangular(tri, shapes)
    lines.append(f"check1_rectangular_exact={'pass' if ok1 else 'FAIL'}")
    ok2 = verify_positive_orientation(tri, shapes)
    lines.append(f"check2_positive_orientation={'pass' if ok2 else 'FAIL'}")
    ok3 = verify_logarithmic(tri, shapes, tol)
    lines.append(f"check3_logarithmic_error={'pass' if ok3 else 'FAIL'}")
    ok4 = verify_cusp_equations(tri, shapes)
    lines.append(f"check4_cusp_equations_exact={'pass' if ok4 else 'FAIL'}")
    try:
        table = compute_tilts(tri, shapes)
        ok5 = table.is_proto_canonical()
        witness = ""
        if not ok5:
            k = table.positive_faces()[0]
            witness = f" face={table.faces[k]} tilt={table.tilt[k]!r}"
    except (FieldViolation, InconsistentHolonomy) as exc:
        ok5 = False
        witness = f" error={exc}"
    lines.append(f"check5_tilt_signs={'pass' if ok5 else 'FAIL'}{witness}")
    return (ok1 and ok2 and ok3 and ok4 and ok5), lines


# -- canonize --------------------------------------------------------------------

def _geometric_two_three(tri, shapes, face_pair):
    (t1, f1), _other = face_pair
    return two_three_move(tri, t1, f1, shapes)


def _order3_edges(tri):
    return [e for e in tri.edge_classes() if not e.open and e.order == 3]


def _shrink(tri, shapes, limit=None, coherent=False):
    """Apply legal geometric 3-2 moves until none remain (or limit hit)."""
    budget = limit if limit is not None else 4 * tri.n
    for _ in range(budget):
        for edge in _order3_edges(tri):
            try:
                tri, shapes = _apply(
                    tri, shapes, "32", edge, geometric=True, coherent=coherent
                )
                break
            except (FlatOrNegative, InvalidEdge):
                continue
        else:
            return tri, shapes
    return tri, shapes


def _bad_count(shapes):
    return sum(1 for z in shapes if z.im_sign() <= 0)


def _all_moves(tri):
    moves = [("23", pair) for pair in _face_class_pairs(tri)]
    moves.extend(("32", e) for e in _order3_edges(tri))
    return moves


def _coherentize(tri, shapes):
    """Relabel an orientable triangulation so every gluing is odd.

    With coherent labels the mirror bookkeeping is inert and the stored
    shapes are plain cross-ratios in one global chart, a calculus that
    stays exactly consistent through negatively oriented tetrahedra.
    Tetrahedra on the minority orientation get labels 2, 3 swapped,
    which inverts their shape; if the whole chart ends up negatively
    oriented it is conjugated away.
    """
    signs = tri.orientation_signs()
    if signs is None:
        raise NotCTT("coherent orientation needs an orientable triangulation")
    if all(s == 1 for s in signs):
        out_tri, out_shapes = tri, list(shapes)
    else:
        swap = perm_from_images((0, 1, 3, 2))
        adj = [-1] * (4 * tri.n)
        for t in range(tri.n):
            for f in range(4):
                g = tri.adj[4 * t + f]
                t2, p = divmod(g, 24)
                q = p
                if signs[t] < 0:
                    q = MUL[q][swap]  # pre-compose with the relabel of t
                if signs[t2] < 0:
                    q = MUL[swap][q]
                f_new = f if signs[t] > 0 else PERMS[swap][f]
                adj[4 * t + f_new] = t2 * 24 + q
        out_tri = Triangulation(tri.n, adj)
        one = ShapeNum(1)
        out_shapes = [
            (one / z) if s < 0 else z for z, s in zip(shapes, signs)
        ]
    # normalize the global chart so most tetrahedra are positive
    neg = _bad_count(out_shapes)
    if 2 * neg > len(out_shapes) or (
        2 * neg == len(out_shapes) and out_shapes[0].im_sign() < 0
    ):
        out_shapes = [z.conjugate() for z in out_shapes]
    return out_tri, out_shapes


def _apply(tri, shapes, kind, obj, geometric, coherent):
    if kind == "23":
        (t1, f1), _other = obj
        out = two_three_move(tri, t1, f1, shapes, geometric=geometric)
    else:
        out = three_two_move(tri, obj, shapes, geometric=geometric)
    if coherent:
        return _coherentize(*out)
    return out


def _random_walk(tri, shapes, rng, count, coherent):
    """A bounded random walk through the move graph, then regeometrize.

    In the coherent (orientable) mode the walk may tunnel through states
    with negatively oriented tetrahedra; it then removes them greedily,
    with a few sideways moves allowed, so the descent can restart from a
    geometric triangulation.  Without coherent labels only geometric
    moves are sound and the walk stays within them.  Returns the original
    state only when every attempt at regeometrization fails.
    """
    start = (tri, shapes)
    size_cap = 2 * tri.n + 6
    for _round in range(4):
        for _ in range(count):
            moves = [m for m in _all_moves(tri) if m[0] == "32" or tri.n < size_cap]
            rng.shuffle(moves)
            for kind, obj in moves:
                try:
                    tri, shapes = _apply(
                        tri, shapes, kind, obj,
                        geometric=not coherent, coherent=coherent,
                    )
                    break
                except (FlatOrNegative, InvalidFace, InvalidEdge):
                    continue
            else:
                break

        # remove negative tetrahedra: prefer strict decreases, allow a
        # bounded number of sideways moves to escape local plateaus
        sideways = 3 * tri.n
        for _ in range(10 * tri.n):
            bad = _bad_count(shapes)
            if bad == 0:
                break
            options = _all_moves(tri)
            rng.shuffle(options)
            results = []
            for kind, obj in options:
                try:
                    nt, ns = _apply(
                        tri, shapes, kind, obj,
                        geometric=not coherent, coherent=coherent,
                    )
                except (FlatOrNegative, InvalidFace, InvalidEdge):
                    continue
                nbad = _bad_count(ns)
                if nbad < bad:
                    results = [(nt, ns)]
                    break
                if nbad == bad and nt.n <= size_cap:
                    results.append((nt, ns))
            if results and _bad_count(results[0][1]) < bad:
                tri, shapes = results[0]
            elif results and sideways > 0:
                sideways -= 1
                tri, shapes = results[rng.randrange(len(results))]
            else:
                break
        if _bad_count(shapes) == 0:
            # trim excess size but do not collapse back to the start
            while tri.n > size_cap:
                before = tri.n
                tri, shapes = _shrink(tri, shapes, limit=1, coherent=coherent)
                if tri.n == before:
                    break
            return tri, shapes
    return start


def canonize(tri, seed=0, step_budget=None, retry_budget=25):
    """Certified geometric proto-canonical triangulation of a tessellation.

    Starts from the regular shapes and repeatedly retriangulates with
    exact shape transport: a 2-3 move on a positive-tilt face (largest
    tilt first), or a 3-2 move when no positive face admits one.  Moves
    that would create flat or negative tetrahedra are rejected, and
    states already visited are not re-entered, so the descent cannot
    cycle.  When it stalls anyway, a bounded random walk of legal moves
    (seeded, hence reproducible) perturbs the triangulation and the
    descent restarts, up to ``retry_budget`` times.

    Returns (triangulation, shapes, tilt_table) with all face tilts <= 0
    and the full certification suite passing.  Raises CanonizationFailed
    when the budgets are exhausted; the result is never silently wrong.
    """
    from .signatures import canonical_signature_bytes

    rng = random.Random(seed)
    budget = step_budget if step_budget is not None else 100 * tri.n
    coherent = tri.orientation_signs() is not None

    def descend(start_tri, start_shapes):
        """Backtracking descent through the move graph, positive faces first."""
        seen = {canonical_signature_bytes(start_tri.n, start_tri.adj)}
        table = compute_tilts(start_tri, start_shapes)
        if not table.positive_faces():
            return start_tri, start_shapes, table

        def candidates(cur_tri, cur_table):
            for k in cur_table.positive_faces():
                yield "23", cur_table.faces[k]
            for e in _order3_edges(cur_tri):
                yield "32", e

        stack = [(start_tri, start_shapes, candidates(start_tri, table))]
        steps = 0
        while stack and steps < budget:
            cur_tri, cur_shapes, cands = stack[-1]
            advanced = False
            for kind, obj in cands:
                try:
                    nxt_tri, nxt_shapes = _apply(
                        cur_tri, cur_shapes, kind, obj,
                        geometric=True, coherent=coherent,
                    )
                except (FlatOrNegative, InvalidFace, InvalidEdge):
                    continue
                key = canonical_signature_bytes(nxt_tri.n, nxt_tri.adj)
                if key in seen:
                    continue
                seen.add(key)
                steps += 1
                nxt_table = compute_tilts(nxt_tri, nxt_shapes)
                if not nxt_table.positive_faces():
                    return nxt_tri, nxt_shapes, nxt_table
                stack.append((nxt_tri, nxt_shapes, candidates(nxt_tri, nxt_table)))
                advanced = True
                break
            if not advanced:
                stack.pop()
        return None

    if coherent:
        # relabel first; the regular structure is all-regular in any
        # coherent labeling, so the shapes are simply reassigned
        cur_tri, _ = _coherentize(tri, regular_shapes(tri))
        cur_shapes = regular_shapes(cur_tri)
    else:
        cur_tri, cur_shapes = tri, regular_shapes(tri)
    for attempt in range(retry_budget + 1):
        found = descend(cur_tri, cur_shapes)
        if found is not None:
            out_tri, out_shapes, table = found
            ok, lines = certification_report(out_tri, out_shapes)
            if not ok:
                raise CanonizationFailed(
                    "certification failed after descent: " + "; ".join(lines),
                    retries=attempt,
                )
            return out_tri, out_shapes, table
        cur_tri, cur_shapes = _random_walk(
            cur_tri, cur_shapes, rng, cur_tri.n + 2 + attempt, coherent
        )
    raise CanonizationFailed(
        f"no proto-canonical triangulation within {retry_budget} retries",
        retries=retry_budget,
    )
