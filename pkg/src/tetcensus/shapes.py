"""Shape parameters, projective points and exact Mobius placement.

Conventions, fixed once and used everywhere:

* The shape z of a tetrahedron is the edge parameter of edge 01 (and its
  opposite 23) under the tetrahedron's own labeling.  Edges 02/13 carry
  z' = 1/(1-z), edges 03/12 carry z'' = 1 - 1/z, and z * z' * z'' = -1.
* The cross-ratio convention: for a placement p of the four vertices in
  the boundary sphere, the parameter of edge (i, j) is
  cr(p_i, p_j; p_k, p_l) = (p_k - p_i)(p_l - p_j) / ((p_k - p_j)(p_l - p_i))
  where (i, j, k, l) is an even arrangement of (0, 1, 2, 3).  The
  placement (inf, 0, 1, z) realizes a tetrahedron of shape z, and a
  stored assignment is geometric when every Im(z) > 0.
* Ideal points are projective pairs (a : b) of shape-field elements, so
  infinity needs no special cases: inf = (1 : 0).

Placement of a tetrahedron into a partially built picture happens by the
unique Mobius transformation matching three already placed vertices; a
mirrored neighbor (one glued by an even permutation) is placed with the
conjugated shape, which is exactly the anti-Mobius development.
"""

from fractions import Fraction
from itertools import permutations

from .errors import DegenerateShape
from .exact import ShapeNum

# -- edge parameter bookkeeping ------------------------------------------------

#: kind of the edge parameter carried by each vertex pair: 0 -> z, 1 -> z', 2 -> z''
EDGE_PARAM_KIND = {
    (0, 1): 0, (1, 0): 0, (2, 3): 0, (3, 2): 0,
    (0, 2): 1, (2, 0): 1, (1, 3): 1, (3, 1): 1,
    (0, 3): 2, (3, 0): 2, (1, 2): 2, (2, 1): 2,
}


def _parity4(seq):
    inv = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if seq[i] > seq[j]:
                inv += 1
    return inv & 1


#: EVEN_COMPLETION[(v, u)] = (k, l) with (v, u, k, l) an even arrangement
EVEN_COMPLETION = {}
for _seq in permutations(range(4)):
    if _parity4(_seq) == 0:
        EVEN_COMPLETION[(_seq[0], _seq[1])] = (_seq[2], _seq[3])


def shape_params(z):
    """The exact triple (z, z', z''); raises DegenerateShape at 0 or 1."""
    if z.is_zero() or z == 1:
        raise DegenerateShape(f"shape {z!r} is degenerate")
    one = ShapeNum(1)
    return (z, one / (one - z), one - one / z)


def edge_param(params, v, u):
    """Parameter of the edge between vertices v and u, from (z, z', z'')."""
    return params[EDGE_PARAM_KIND[(v, u)]]


# -- projective points over the shape field ------------------------------------

_ONE = ShapeNum(1)
_ZERO_NUM = ShapeNum(0)

INF_POINT = (_ONE, _ZERO_NUM)
ZERO_POINT = (_ZERO_NUM, _ONE)
ONE_POINT = (_ONE, _ONE)


def proj(z):
    """Finite projective point for a ShapeNum (or rational)."""
    if not isinstance(z, ShapeNum):
        z = ShapeNum(Fraction(z))
    return (z, _ONE)


def proj_normalize(p):
    a, b = p
    if b.is_zero():
        if a.is_zero():
            raise DegenerateShape("projective point (0 : 0)")
        return INF_POINT
    return (a / b, _ONE)


def proj_det(p, q):
    """a_p * b_q - a_q * b_p; the numerator of p - q."""
    return p[0] * q[1] - q[0] * p[1]


def proj_equal(p, q):
    return proj_det(p, q).is_zero()


def cross_ratio(p0, p1, p2, p3):
    """cr(p0, p1; p2, p3) as a ShapeNum; DegenerateShape on collisions."""
    num = proj_det(p2, p0) * proj_det(p3, p1)
    den = proj_det(p2, p1) * proj_det(p3, p0)
    if den.is_zero():
        raise DegenerateShape("cross-ratio with coinciding points")
    return num / den


def tet_shape_from_points(p0, p1, p2, p3):
    """Shape (edge-01 parameter) of the labeled placement (p0, p1, p2, p3)."""
    return cross_ratio(p0, p1, p2, p3)


# -- Mobius transformations -----------------------------------------------------

def _mobius_to_standard(q0, q1, q2):
    """Matrix sending q0 -> (0:1), q1 -> (1:1), q2 -> (1:0)."""
    d10 = proj_det(q1, q0)
    d12 = proj_det(q1, q2)
    if d10.is_zero() or d12.is_zero() or proj_det(q0, q2).is_zero():
        raise DegenerateShape("Mobius through coinciding points")
    row0 = (q0[1] * d12, -(q0[0] * d12))
    row1 = (q2[1] * d10, -(q2[0] * d10))
    return (row0, row1)


def _mobius_inverse(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def _mobius_compose(m2, m1):
    """m2 after m1."""
    (a, b), (c, d) = m2
    (e, f), (g, h) = m1
    return (
        (a * e + b * g, a * f + b * h),
        (c * e + d * g, c * f + d * h),
    )


def mobius_from_to(sources, targets):
    """The Mobius transformation mapping three points onto three points."""
    s = _mobius_to_standard(*sources)
    t = _mobius_to_standard(*targets)
    return _mobius_compose(_mobius_inverse(t), s)


def mobius_apply(m, p):
    (a, b), (c, d) = m
    return proj_normalize((a * p[0] + b * p[1], c * p[0] + d * p[1]))


# -- tetrahedron placement -------------------------------------------------------

def standard_placement(z, mirror=False):
    """Vertex positions (labels 0..3) of a tetrahedron of shape z.

    The chart is the tetrahedron's own: (inf, 0, 1, z).  A mirrored
    development (entered through an orientation-incompatible gluing)
    conjugates the shape.
    """
    w = z.conjugate() if mirror else z
    return (INF_POINT, ZERO_POINT, ONE_POINT, proj(w))


def place_fourth_vertex(z, mirror, placed):
    """Position of the one unplaced vertex of a tetrahedron.

    ``placed`` maps three of the labels 0..3 to projective points already
    fixed in the ambient chart; the tetrahedron has shape z and is
    developed mirrored or not.  Returns the image of the missing label.
    """
    std = standard_placement(z, mirror)
    known = sorted(placed)
    if len(known) != 3:
        raise ValueError("exactly three vertices must be placed")
    (missing,) = set(range(4)) - set(known)
    m = mobius_from_to(
        tuple(std[l] for l in known), tuple(placed[l] for l in known)
    )
    return mobius_apply(m, std[missing])
