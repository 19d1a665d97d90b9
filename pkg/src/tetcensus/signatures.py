"""Canonical complete invariants and combinatorial (co)homomorphism search.

The canonical signature of a connected triangulation is the lexicographic
minimum, over an isomorphism-invariant set of rooted starts, of a
breadth-first relabeling of the gluing table.  Discovered tetrahedra are
relabeled so their discovery gluing becomes the identity permutation, so
only the root's 24 labelings vary.  Two connected triangulations have
equal signatures iff they are combinatorially isomorphic: the code is
invariant by construction and literally spells out a gluing table.

Signatures serialize to one-line base64 tokens; the token decodes back
to a triangulation, which the command line uses to address census
entries.
"""

import base64

from .errors import NotClosed, NotConnected
from .perm4 import INV, MUL, PERMS, Perm4
from .triangulation import EDGE_INDEX, Triangulation

_OPEN = 0  # symbol for an open face; gluings encode as 1 + target*24 + perm


def _tet_profiles(n, adj):
    """Cheap isomorphism-invariant per-tet profile used to restrict roots.

    Combines the face pattern (open / self-glued / other) with the sorted
    (order, closed) data of the six incident edge classes.  Only tetrahedra
    with the minimal profile are tried as signature roots; the set is
    invariant under relabeling, so the minimum over it stays canonical.
    """
    from .triangulation import edge_classes_raw

    orders = [None] * (6 * n)
    for cls in edge_classes_raw(adj, n):
        tag = (cls.order, not cls.open, cls.orientation_reversing)
        for t, a, b in cls.incidences:
            orders[6 * t + EDGE_INDEX[(a, b)]] = tag

    profiles = []
    for t in range(n):
        faces = []
        for f in range(4):
            g = adj[4 * t + f]
            faces.append(0 if g < 0 else (1 if g // 24 == t else 2))
        profiles.append(
            (tuple(sorted(faces)), tuple(sorted(orders[6 * t : 6 * t + 6])))
        )
    return profiles


def canonical_code(n, adj):
    """Canonical code as a list of ints: [n, sym(0,0), ..., sym(n-1,3)]."""
    if n == 0:
        return [0]
    profiles = _tet_profiles(n, adj)
    best_profile = min(profiles)
    roots = [t for t in range(n) if profiles[t] == best_profile]

    best = None
    mul = MUL
    inv = INV
    perms = PERMS
    for t0 in roots:
        for p0 in range(24):
            new_of_old = [-1] * n
            perm_of_old = [0] * n
            order = [t0]
            new_of_old[t0] = 0
            perm_of_old[t0] = p0
            cur = [n]
            better = best is None
            pos = 1
            dead = False
            i = 0
            while i < len(order):
                t_old = order[i]
                sigma = perm_of_old[t_old]
                sigma_inv = inv[sigma]
                f_olds = perms[sigma_inv]
                base = 4 * t_old
                for f_new in range(4):
                    g = adj[base + f_olds[f_new]]
                    if g < 0:
                        sym = _OPEN
                    else:
                        tgt, p = divmod(g, 24)
                        j = new_of_old[tgt]
                        if j < 0:
                            j = len(order)
                            new_of_old[tgt] = j
                            perm_of_old[tgt] = mul[sigma][inv[p]]
                            order.append(tgt)
                            sym = 1 + j * 24  # discovery gluing is identity
                        else:
                            q = mul[mul[perm_of_old[tgt]][p]][sigma_inv]
                            sym = 1 + j * 24 + q
                    if not better:
                        b = best[pos]
                        if sym > b:
                            dead = True
                            break
                        if sym < b:
                            better = True
                    cur.append(sym)
                    pos += 1
                if dead:
                    break
                i += 1
            if dead:
                continue
            if len(order) < n:
                raise NotConnected("signature needs a connected triangulation")
            if better:
                best = cur
    return best


def canonical_signature_bytes(n, adj):
    code = canonical_code(n, adj)
    return b"".join(sym.to_bytes(2, "big") for sym in code)


def signature_text(sig_bytes):
    """Printable single-line token for a signature byte string."""
    return base64.urlsafe_b64encode(sig_bytes).decode("ascii").rstrip("=")


def signature_from_text(token):
    pad = "=" * (-len(token) % 4)
    return base64.urlsafe_b64decode(token + pad)


def canonical_signature(tri):
    """Canonical signature token of a connected triangulation.

    Deterministic and invariant under relabeling of tetrahedra and their
    vertices.  Defined for partial triangulations as well (open faces
    serialize as a distinguished symbol); the enumeration relies on that.
    """
    if not tri.is_connected():
        raise NotConnected("signature needs a connected triangulation")
    return signature_text(canonical_signature_bytes(tri.n, tri.adj))


def triangulation_from_signature(token):
    """Rebuild the (canonically labeled) triangulation a signature encodes."""
    raw = signature_from_text(token)
    code = [
        int.from_bytes(raw[i : i + 2], "big") for i in range(0, len(raw), 2)
    ]
    n = code[0]
    adj = []
    for sym in code[1 : 1 + 4 * n]:
        adj.append(-1 if sym == _OPEN else sym - 1)
    return Triangulation(n, adj)


# -- homomorphisms -------------------------------------------------------------

class Homomorphism:
    """A gluing-compatible simplicial map between triangulations.

    Maps tetrahedron t of the source to ``tet_images[t] = (tet, Perm4)``
    of the destination.  Topologically this is a covering map preserving
    the triangulations.
    """

    __slots__ = ("tet_images", "degree")

    def __init__(self, tet_images, degree):
        self.tet_images = tuple(tet_images)
        self.degree = degree

    def __eq__(self, other):
        return (
            isinstance(other, Homomorphism) and self.tet_images == other.tet_images
        )

    def __hash__(self):
        return hash(self.tet_images)

    def __repr__(self):
        return f"Homomorphism(degree={self.degree}, {list(self.tet_images)!r})"


def _propagate(src, dst, tet0_image, perm0):
    """Extend a seed assignment along the source gluings; None on conflict."""
    n = src.n
    images = [None] * n
    images[0] = (tet0_image, perm0)
    queue = [0]
    while queue:
        t = queue.pop()
        d, q = images[t]
        for f in range(4):
            g = src.adj[4 * t + f]
            t2, p = divmod(g, 24)
            f_img = PERMS[q][f]
            g_dst = dst.adj[4 * d + f_img]
            d2, pd = divmod(g_dst, 24)
            q2 = MUL[MUL[pd][q]][INV[p]]
            if images[t2] is None:
                images[t2] = (d2, q2)
                queue.append(t2)
            elif images[t2] != (d2, q2):
                return None
    return images


def verify_homomorphism(src, dst, images):
    """Independent check that an assignment commutes with all gluings."""
    for t in range(src.n):
        d, q = images[t]
        for f in range(4):
            g = src.adj[4 * t + f]
            t2, p = divmod(g, 24)
            d2, q2 = images[t2]
            g_dst = dst.adj[4 * d + PERMS[q][f]]
            dd, pd = divmod(g_dst, 24)
            if dd != d2:
                return False
            if MUL[pd][q] != MUL[q2][p]:
                return False
    return True


def find_homomorphisms(src, dst):
    """All combinatorial homomorphisms from src to dst.

    Fixes the image of source tetrahedron 0 among the |dst|*24 choices and
    propagates along gluings.  Connected closed tessellations only admit
    maps when |src| is a multiple of |dst|.
    """
    if not (src.is_closed() and dst.is_closed()):
        raise NotClosed("homomorphism search needs closed triangulations")
    if not (src.is_connected() and dst.is_connected()):
        raise NotConnected("homomorphism search needs connected triangulations")
    if src.n % dst.n != 0:
        return []
    found = []
    for d0 in range(dst.n):
        for p0 in range(24):
            images = _propagate(src, dst, d0, p0)
            if images is not None:
                found.append(
                    Homomorphism(
                        [(d, Perm4(q)) for d, q in images], src.n // dst.n
                    )
                )
    return found


def find_isomorphisms(a, b):
    """All bijective gluing-compatible maps; find_isomorphisms(t, t) is Aut(t)."""
    if a.n != b.n:
        return []
    isos = []
    for h in find_homomorphisms(a, b):
        tets = {d for d, _p in h.tet_images}
        if len(tets) == a.n:
            isos.append(h)
    return isos


def hides_symmetries(ctt, canonical_tri):
    """True when the canonical triangulation has strictly more automorphisms.

    The canonical cell decomposition sees every isometry of the manifold,
    so extra automorphisms downstairs are exactly the hidden symmetries.
    """
    return len(find_isomorphisms(canonical_tri, canonical_tri)) > len(
        find_isomorphisms(ctt, ctt)
    )
