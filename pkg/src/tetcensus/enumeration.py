"""The census search: recursive face pairing with eager order-6 closing.

The search grows a connected triangulation from a single tetrahedron.
At every node it first closes all open edges of order 6 and rejects
states that can no longer become a tessellation (an edge of order > 6,
a closed edge of order != 6, or an edge identified with itself in
reverse, whose midpoint would have a projective-plane link).  Signatures
of every visited state, partial ones included, feed a dedup set so each
combinatorial isomorphism class is expanded once.

Branching follows the open face adjacent to an open edge of highest
order: either a fresh tetrahedron is glued there (via one odd
permutation; all labelings of a fresh tetrahedron are isomorphic), or
the face is glued to another open face by every permutation compatible
with the requested orientability.
"""

from dataclasses import dataclass, field

from .errors import SelfGluingForbidden
from .perm4 import INV, ODD_PERMS_BY_MAP, PARITY, PERMS, PERMS_BY_MAP
from .signatures import canonical_signature_bytes, signature_text
from .triangulation import closing_gluing, edge_classes_raw


@dataclass(frozen=True)
class SearchConfig:
    max_tets: int
    orientable: bool = True
    max_seen: int | None = None  # dedup-set cap; None means unbounded

    def __post_init__(self):
        if self.max_tets < 1:
            raise ValueError("max_tets must be at least 1")


@dataclass
class SearchStats:
    nodes: int = 0
    dedup_hits: int = 0
    prunes_edge_order: int = 0
    prunes_projective_plane: int = 0
    prunes_self_gluing: int = 0
    results_per_size: dict = field(default_factory=dict)

    def as_lines(self):
        lines = [
            f"nodes={self.nodes}",
            f"dedup_hits={self.dedup_hits}",
            f"prunes_edge_order={self.prunes_edge_order}",
            f"prunes_projective_plane={self.prunes_projective_plane}",
            f"prunes_self_gluing={self.prunes_self_gluing}",
        ]
        for size in sorted(self.results_per_size):
            lines.append(f"results_{size}={self.results_per_size[size]}")
        return lines


_EDGE_OK = 0
_EDGE_BAD_ORDER = 1
_EDGE_PROJECTIVE = 2
_EDGE_SELF_GLUING = 3


def fix_edges_raw(adj, n, eager_close=True):
    """Algorithm 2 on a mutable gluing table.

    Closes open order-6 edges until none remain, then decides validity.
    Returns (status, edge_classes) where status is one of the _EDGE_*
    codes and edge_classes describes the final state (None when invalid).
    """
    while True:
        classes = edge_classes_raw(adj, n)
        to_close = None
        for cls in classes:
            if cls.orientation_reversing:
                return _EDGE_PROJECTIVE, None
            if cls.open:
                if cls.order > 6:
                    return _EDGE_BAD_ORDER, None
                if cls.order == 6 and eager_close and to_close is None:
                    to_close = cls
            elif cls.order != 6:
                return _EDGE_BAD_ORDER, None
        if to_close is None:
            # without eager closing, open order-6 edges simply remain open
            return _EDGE_OK, classes
        try:
            t1, f1, t2, f2, p = closing_gluing(to_close)
        except SelfGluingForbidden:
            return _EDGE_SELF_GLUING, None
        adj[4 * t1 + f1] = t2 * 24 + p
        adj[4 * t2 + f2] = t1 * 24 + INV[p]


def fix_edges(tri, eager_close=True):
    """Public wrapper: returns ("valid" | "invalid", Triangulation)."""
    from .triangulation import Triangulation

    adj = list(tri.adj)
    status, _classes = fix_edges_raw(adj, tri.n, eager_close)
    if status == _EDGE_OK:
        return "valid", Triangulation(tri.n, adj)
    return "invalid", Triangulation(tri.n, adj)


def _orientable_raw(n, adj):
    """Sign propagation over a closed connected table; None if inconsistent."""
    sign = [0] * n
    sign[0] = 1
    stack = [0]
    while stack:
        t = stack.pop()
        st = sign[t]
        for f in range(4):
            g = adj[4 * t + f]
            t2, p = divmod(g, 24)
            s2 = st if PARITY[p] else -st
            if sign[t2] == 0:
                sign[t2] = s2
                stack.append(t2)
            elif sign[t2] != s2:
                return None
    return sign


def _choose_open_face(adj, classes):
    """Open face adjacent to an open edge of highest order (smallest such)."""
    best_order = -1
    candidates = []
    for cls in classes:
        if not cls.open:
            continue
        if cls.order > best_order:
            best_order = cls.order
            candidates = []
        if cls.order == best_order:
            for t, _a, _b, f in cls.ends:
                candidates.append((t, f))
    return min(candidates)


def enumerate_ctts(cfg, stats=None, eager_close=True, first_face_heuristic=False):
    """All tessellation signatures up to cfg.max_tets, per Algorithm 1.

    Returns the set of signature byte strings of the closed connected
    triangulations with every edge of order 6 and the requested
    orientability, up to combinatorial isomorphism.  ``stats`` (optional
    SearchStats) collects search counters.  The two keyword flags exist
    for the invariance tests: disabling eager closing or replacing the
    open-face heuristic must not change the result set.
    """
    if stats is None:
        stats = SearchStats()
    seen = set()
    results = {}
    max_tets = cfg.max_tets
    orientable = cfg.orientable
    max_seen = cfg.max_seen
    perm_table = ODD_PERMS_BY_MAP if orientable else PERMS_BY_MAP
    new_tet_perm = [min(ODD_PERMS_BY_MAP[f1][0]) for f1 in range(4)]

    def recurse(n, adj):
        stats.nodes += 1
        status, classes = fix_edges_raw(adj, n, eager_close)
        if status != _EDGE_OK:
            if status == _EDGE_PROJECTIVE:
                stats.prunes_projective_plane += 1
            elif status == _EDGE_SELF_GLUING:
                stats.prunes_self_gluing += 1
            else:
                stats.prunes_edge_order += 1
            return
        sig = canonical_signature_bytes(n, adj)
        if sig in seen:
            stats.dedup_hits += 1
            return
        if max_seen is None or len(seen) < max_seen:
            seen.add(sig)

        open_faces = [
            (t, f) for t in range(n) for f in range(4) if adj[4 * t + f] < 0
        ]
        if not open_faces:
            # orientable search builds orientable results by construction
            if orientable or _orientable_raw(n, adj) is None:
                bucket = results.setdefault(n, set())
                bucket.add(sig)
            return

        if first_face_heuristic:
            t1, f1 = open_faces[0]
        else:
            t1, f1 = _choose_open_face(adj, classes)

        if n < max_tets:
            child = adj + [-1, -1, -1, -1]
            p = new_tet_perm[f1]
            child[4 * t1 + f1] = n * 24 + p
            child[4 * n + 0] = t1 * 24 + INV[p]
            recurse(n + 1, child)

        for t2, f2 in open_faces:
            if (t2, f2) == (t1, f1):
                continue
            for p in perm_table[f1][f2]:
                child = list(adj)
                child[4 * t1 + f1] = t2 * 24 + p
                child[4 * t2 + f2] = t1 * 24 + INV[p]
                recurse(n, child)

    recurse(1, [-1, -1, -1, -1])

    all_sigs = set()
    for size, sigs in results.items():
        stats.results_per_size[size] = len(sigs)
        all_sigs.update(sigs)
    return all_sigs, stats


def enumerate_ctt_signatures(cfg, stats=None):
    """Sorted text signatures of the census up to cfg.max_tets."""
    sigs, stats = enumerate_ctts(cfg, stats)
    return sorted(signature_text(s) for s in sigs), stats
