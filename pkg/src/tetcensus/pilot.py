"""Floating-point pilot search for canonization move scripts.

Finding a proto-canonical triangulation may require long walks through
the move graph, including stretches where intermediate tetrahedra are
negatively oriented.  Exploring that graph in exact arithmetic is
needlessly expensive: this module mirrors the move transport and the
tilt computation in complex floats, searches for a state whose tilts
are all nonpositive, and returns the move script.  The exact layer then
replays the script with exact shape transport and certifies the result;
the pilot chooses paths, never answers.

The combinatorial side is byte-identical to the exact moves (both call
the builders in moves.py), and every branch decision the pilot takes is
recorded in the script and forced during the exact replay, so the two
runs cannot desynchronize structurally.
"""

import random

from .signatures import canonical_signature_bytes
from .moves import (
    _three_two_build,
    _trace_order3,
    _two_three_build,
    two_three_data,
)
from .perm4 import MUL, PARITY, PERMS, perm_from_images
from .shapes import EVEN_COMPLETION
from .triangulation import Triangulation

_EPS_FLAT = 1e-10
_TOL_POS = 1e-9

_INF = (1.0 + 0j, 0j)


def _pp(z):
    return (complex(z), 1.0 + 0j)


def _det(p, q):
    return p[0] * q[1] - q[0] * p[1]


def _cr(p0, p1, p2, p3):
    den = _det(p2, p1) * _det(p3, p0)
    if abs(den) < 1e-14:
        return None
    return (_det(p2, p0) * _det(p3, p1)) / den


def _mob3(q0, q1, q2):
    d10 = _det(q1, q0)
    d12 = _det(q1, q2)
    if abs(d10) < 1e-14 or abs(d12) < 1e-14 or abs(_det(q0, q2)) < 1e-14:
        return None
    return (
        (q0[1] * d12, -(q0[0] * d12)),
        (q2[1] * d10, -(q2[0] * d10)),
    )


def _place4(z, mirror, placed):
    """Numeric twin of shapes.place_fourth_vertex."""
    w = z.conjugate() if mirror else complex(z)
    std = (_INF, (0j, 1.0 + 0j), (1.0 + 0j, 1.0 + 0j), _pp(w))
    known = sorted(placed)
    (missing,) = set(range(4)) - set(known)
    s = _mob3(*(std[l] for l in known))
    t = _mob3(*(placed[l] for l in known))
    if s is None or t is None:
        return None
    # m = t^{-1} . s
    (a, b), (c, d) = t
    tinv = ((d, -b), (-c, a))
    (a1, b1), (c1, d1) = tinv
    (e, f), (g, h) = s
    m = ((a1 * e + b1 * g, a1 * f + b1 * h), (c1 * e + d1 * g, c1 * f + d1 * h))
    p = std[missing]
    num = m[0][0] * p[0] + m[0][1] * p[1]
    den = m[1][0] * p[0] + m[1][1] * p[1]
    if abs(den) < 1e-13 * max(abs(num), 1.0):
        return _INF
    return (num / den, 1.0 + 0j)


def _turns23(tri, zs, tet, face):
    t_a, _f_a, t_b, _f_b, p_ab, face_verts = two_three_data(tri, tet, face)
    img_ab = PERMS[p_ab]
    targets = ((0j, 1 + 0j), (1 + 0j, 1 + 0j), _INF)
    pa = _place4(zs[t_a], False, {face_verts[m]: targets[m] for m in range(3)})
    pb = _place4(
        zs[t_b],
        PARITY[p_ab] == 0,
        {img_ab[face_verts[m]]: targets[m] for m in range(3)},
    )
    if pa is None or pb is None:
        return None
    turns = []
    for i, j in ((0, 1), (1, 2), (2, 0)):
        w = _cr(pa, pb, targets[i], targets[j])
        if w is None:
            return None
        turns.append(w)
    return turns


def pilot_two_three(tri, zs, tet, face, geometric=True):
    """Numeric 2-3 move; returns (tri, zs, apex_first) or None."""
    turns = _turns23(tri, zs, tet, face)
    if turns is None or any(abs(w.imag) <= _EPS_FLAT for w in turns):
        return None
    pos = sum(1 for w in turns if w.imag > 0)
    if pos == 3:
        apex_first, new = True, turns
    elif pos == 0:
        apex_first, new = False, [1 / w for w in turns]
    elif geometric:
        return None
    else:
        apex_first, new = True, turns
    out, keep = _two_three_build(tri, tet, face, apex_first)
    return out, [zs[t] for t in keep] + new, apex_first


def pilot_three_two(tri, zs, edge, geometric=True):
    """Numeric 3-2 move; returns (tri, zs, a_normal, b_normal) or None."""
    try:
        wedges, parities = _trace_order3(tri, edge)
    except Exception:
        return None
    eq = [(1 + 0j, 1 + 0j)]
    mirror = False
    for i in range(3):
        t, a, b, exit_face, _ent = wedges[i]
        nxt = _place4(zs[t], mirror, {a: _INF, b: (0j, 1 + 0j), exit_face: eq[i]})
        if nxt is None:
            return None
        eq.append(nxt)
        mirror ^= parities[i] == 0
    if mirror:
        return None
    z_a = _cr(eq[0], eq[1], eq[2], _INF)
    z_b = _cr(eq[0], eq[1], eq[2], (0j, 1 + 0j))
    if z_a is None or z_b is None:
        return None
    if abs(z_a.imag) <= _EPS_FLAT or abs(z_b.imag) <= _EPS_FLAT:
        return None
    sa = z_a.imag > 0
    sb = z_b.imag > 0
    a_normal, b_normal = True, False
    if sa != sb:
        a_normal, b_normal = True, True
        if not sa:
            a_normal = False
            z_a = 1 / z_a
        else:
            b_normal = False
            z_b = 1 / z_b
    elif geometric:
        return None
    else:
        z_b = 1 / z_b
    out, keep = _three_two_build(tri, wedges, a_normal, b_normal)
    return out, [zs[t] for t in keep] + [z_a, z_b], a_normal, b_normal


def pilot_coherentize(tri, zs):
    """Numeric twin of the coherent relabeling (no chart normalization)."""
    signs = tri.orientation_signs()
    if signs is None or all(s == 1 for s in signs):
        return tri, zs
    swap = perm_from_images((0, 1, 3, 2))
    adj = [-1] * (4 * tri.n)
    for t in range(tri.n):
        for f in range(4):
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            q = p
            if signs[t] < 0:
                q = MUL[q][swap]
            if signs[t2] < 0:
                q = MUL[swap][q]
            f_new = f if signs[t] > 0 else PERMS[swap][f]
            adj[4 * t + f_new] = t2 * 24 + q
    return Triangulation(tri.n, adj), [
        (1 / z) if s < 0 else z for z, s in zip(zs, signs)
    ]


def _normalize_chart(zs):
    if zs and all(z.imag < 0 for z in zs):
        return [z.conjugate() for z in zs]
    return zs


# -- numeric tilts ---------------------------------------------------------------

def _params(z):
    return (z, 1 / (1 - z), 1 - 1 / z)


def _edge_param_num(params_t, v, u):
    pair = (v, u) if v < u else (u, v)
    if pair in ((0, 1), (2, 3)):
        return params_t[0]
    if pair in ((0, 2), (1, 3)):
        return params_t[1]
    return params_t[2]


def pilot_tilts(tri, zs):
    """Numeric face tilts; None when the state is not geometric."""
    if any(z.imag <= 0 for z in zs):
        return None
    params = [_params(z) for z in zs]
    cusps = tri.vertex_links()
    cusp_of = {}
    for i, cls in enumerate(cusps):
        for tv in cls.corners:
            cusp_of[tv] = i

    lengths = {}
    for i, cls in enumerate(cusps):
        t0, v0 = min(cls.corners)
        f0 = min(f for f in range(4) if f != v0)
        lengths[(t0, v0, f0)] = 1.0
        stack = [(t0, v0, f0)]
        while stack:
            t, v, f = stack.pop()
            cur = lengths[(t, v, f)]
            for f2 in range(4):
                if f2 == v or f2 == f:
                    continue
                key = (t, v, f2)
                if key in lengths:
                    continue
                u = 6 - v - f2 - f
                mod = abs(_edge_param_num(params[t], v, u))
                val = cur * mod if EVEN_COMPLETION[(v, u)] == (f2, f) else cur / mod
                lengths[key] = val
                stack.append(key)
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            img = PERMS[p]
            key = (t2, img[v], img[f])
            if key not in lengths:
                lengths[key] = cur
                stack.append(key)

    areas = {}
    cusp_areas = [0.0] * len(cusps)
    for t in range(tri.n):
        for v in range(4):
            u = min(x for x in range(4) if x != v)
            _k, l = EVEN_COMPLETION[(v, u)]
            z = _edge_param_num(params[t], v, u)
            side = lengths[(t, v, l)]
            a = 0.5 * side * side * z.imag
            areas[(t, v)] = a
            cusp_areas[cusp_of[(t, v)]] += a

    target = 3 ** 0.5
    factors = [target / a for a in cusp_areas]
    radius = {}
    for t in range(tri.n):
        for v in range(4):
            fac = factors[cusp_of[(t, v)]]
            sides = 1.0
            for f in range(4):
                if f != v:
                    sides *= lengths[(t, v, f)] * fac ** 0.5
            radius[(t, v)] = sides / (4 * areas[(t, v)] * fac)

    vertex_tilt = {}
    for t in range(tri.n):
        for v in range(4):
            total = radius[(t, v)]
            for u in range(4):
                if u == v:
                    continue
                z = _edge_param_num(params[t], v, u)
                total -= radius[(t, u)] * z.real / abs(z)
            vertex_tilt[(t, v)] = total

    tilts = []
    for t in range(tri.n):
        for f in range(4):
            g = tri.adj[4 * t + f]
            t2, p = divmod(g, 24)
            other = (t2, PERMS[p][f])
            if (t, f) <= other:
                tilts.append(((t, f), vertex_tilt[(t, f)] + vertex_tilt[other]))
    return tilts


# -- the search ------------------------------------------------------------------

def _order3_reps(tri):
    out = []
    for e in tri.edge_classes():
        if not e.open and e.order == 3:
            out.append(e)
    return out


def find_script(tri, zs, seed=0, node_budget=4000, restart_budget=40, size_cap=None):
    """Search for a move script reaching an all-nonpositive-tilt state.

    ``tri`` must carry coherent labels with all shapes positive.  Returns
    a list of steps, each ("23", tet, face, apex_first) or
    ("32", (tet, a, b), a_normal, b_normal), or None.  The walk prefix of
    each restart tunnels through non-geometric states; the descent part
    is geometric with backtracking guided by the largest positive tilt.
    """
    rng = random.Random(seed)
    if size_cap is None:
        size_cap = 2 * tri.n + 8
    base = (tri, list(zs))

    def descend(state_tri, state_zs, prefix, seen, budget):
        def candidates(cur_tri, cur_zs):
            tl = pilot_tilts(cur_tri, cur_zs)
            if tl is None:
                return None
            pos = [(val, pair) for pair, val in tl if val > _TOL_POS]
            if not pos:
                return True
            pos.sort(key=lambda x: -x[0])
            cands = [("23", pair[0], pair[1]) for _v, pair in pos]
            cands.extend(("32", e) for e in _order3_reps(cur_tri))
            return cands

        cands = candidates(state_tri, state_zs)
        if cands is None:
            return None, budget
        if cands is True:
            return list(prefix), budget
        stack = [(state_tri, state_zs, iter(cands))]
        paths = [list(prefix)]
        while stack and budget > 0:
            cur_tri, cur_zs, it = stack[-1]
            advanced = False
            for cand in it:
                if cand[0] == "23":
                    _kind, (t, f), _other = cand[0], cand[1], cand[2]
                    res = pilot_two_three(cur_tri, cur_zs, t, f, geometric=True)
                    if res is None:
                        continue
                    nt, nz, apex = res
                    step = ("23", t, f, apex)
                else:
                    edge = cand[1]
                    res = pilot_three_two(cur_tri, cur_zs, edge, geometric=True)
                    if res is None:
                        continue
                    nt, nz, an, bn = res
                    ti, ai, bi = edge.incidences[0]
                    step = ("32", (ti, ai, bi), an, bn)
                nt, nz = pilot_coherentize(nt, nz)
                nz = _normalize_chart(nz)
                key = canonical_bytes(nt)
                if key in seen:
                    continue
                seen.add(key)
                budget -= 1
                ncands = candidates(nt, nz)
                path = paths[-1] + [step]
                if ncands is True:
                    return path, budget
                if ncands is not None:
                    stack.append((nt, nz, iter(ncands)))
                    paths.append(path)
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                paths.pop()
        return None, budget

    def canonical_bytes(t):
        return canonical_signature_bytes(t.n, t.adj)

    budget = node_budget
    cur_tri, cur_zs = base
    prefix = []
    for attempt in range(restart_budget + 1):
        seen = {canonical_bytes(cur_tri)}
        script, budget = descend(cur_tri, cur_zs, prefix, seen, budget)
        if script is not None:
            return script
        if budget <= 0:
            return None
        # tunnel: a few random moves allowing negative orientations
        walk_len = 3 + rng.randrange(2 * tri.n + attempt + 1)
        for _ in range(walk_len):
            moves = []
            if cur_tri.n < size_cap:
                for t in range(cur_tri.n):
                    for f in range(4):
                        moves.append(("23", t, f))
            moves.extend(("32", e) for e in _order3_reps(cur_tri))
            rng.shuffle(moves)
            for cand in moves:
                if cand[0] == "23":
                    res = pilot_two_three(
                        cur_tri, cur_zs, cand[1], cand[2], geometric=False
                    )
                    if res is None:
                        continue
                    nt, nz, apex = res
                    step = ("23", cand[1], cand[2], apex)
                else:
                    edge = cand[1]
                    res = pilot_three_two(cur_tri, cur_zs, edge, geometric=False)
                    if res is None:
                        continue
                    nt, nz, an, bn = res
                    ti, ai, bi = edge.incidences[0]
                    step = ("32", (ti, ai, bi), an, bn)
                nt, nz = pilot_coherentize(nt, nz)
                nz = _normalize_chart(nz)
                cur_tri, cur_zs = nt, nz
                prefix.append(step)
                break
            else:
                break
        # regeometrize greedily so the next descent can run
        for _ in range(6 * cur_tri.n):
            bad = sum(1 for z in cur_zs if z.imag <= 0)
            if bad == 0:
                break
            moves = []
            for t in range(cur_tri.n):
                for f in range(4):
                    moves.append(("23", t, f))
            moves.extend(("32", e) for e in _order3_reps(cur_tri))
            rng.shuffle(moves)
            improved = False
            for cand in moves:
                if cand[0] == "23":
                    if cur_tri.n >= size_cap + 4:
                        continue
                    res = pilot_two_three(
                        cur_tri, cur_zs, cand[1], cand[2], geometric=False
                    )
                    if res is None:
                        continue
                    nt, nz, apex = res
                    step = ("23", cand[1], cand[2], apex)
                else:
                    edge = cand[1]
                    res = pilot_three_two(cur_tri, cur_zs, edge, geometric=False)
                    if res is None:
                        continue
                    nt, nz, an, bn = res
                    ti, ai, bi = edge.incidences[0]
                    step = ("32", (ti, ai, bi), an, bn)
                nt, nz = pilot_coherentize(nt, nz)
                nz = _normalize_chart(nz)
                if sum(1 for z in nz if z.imag <= 0) < bad:
                    cur_tri, cur_zs = nt, nz
                    prefix.append(step)
                    improved = True
                    break
            if not improved:
                break
        if sum(1 for z in cur_zs if z.imag <= 0) != 0:
            # restart from scratch with fresh randomness
            cur_tri, cur_zs = base
            prefix = []
    return None
