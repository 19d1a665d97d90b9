"""Permutations of {0,1,2,3} encoded as indices into a fixed table.

The 24 permutations are enumerated in lexicographic order of their image
tuples, so index 0 is the identity.  All hot paths work on raw indices
through the module-level tables; the Perm4 class is a thin wrapper for
public interfaces.
"""

from itertools import permutations

#: image tuples, lexicographically sorted; PERMS[0] == (0, 1, 2, 3)
PERMS = tuple(permutations(range(4)))

INDEX = {p: i for i, p in enumerate(PERMS)}

IDENTITY = INDEX[(0, 1, 2, 3)]


def _parity(images):
    inv = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if images[i] > images[j]:
                inv += 1
    return inv & 1


#: PARITY[i] is 0 for even permutations, 1 for odd ones
PARITY = tuple(_parity(p) for p in PERMS)

#: MUL[a][b] = index of a∘b  (apply b first, then a)
MUL = tuple(
    tuple(INDEX[tuple(PERMS[a][PERMS[b][k]] for k in range(4))] for b in range(24))
    for a in range(24)
)

#: INV[a] = index of the inverse permutation
INV = tuple(
    INDEX[tuple(sorted(range(4), key=lambda k, p=PERMS[a]: p[k]))] for a in range(24)
)

#: permutation indices p with p(f1) == f2, all parities / odd only
PERMS_BY_MAP = tuple(
    tuple(tuple(i for i in range(24) if PERMS[i][f1] == f2) for f2 in range(4))
    for f1 in range(4)
)
ODD_PERMS_BY_MAP = tuple(
    tuple(
        tuple(i for i in range(24) if PERMS[i][f1] == f2 and PARITY[i])
        for f2 in range(4)
    )
    for f1 in range(4)
)


def perm_from_images(images):
    """Index of the permutation with the given image tuple."""
    key = tuple(images)
    if key not in INDEX:
        raise ValueError(f"not a permutation of 0..3: {images!r}")
    return INDEX[key]


class Perm4:
    """A permutation of {0,1,2,3} with parity, wrapping a table index."""

    __slots__ = ("index",)

    def __init__(self, index):
        if not 0 <= index < 24:
            raise ValueError(f"permutation index out of range: {index}")
        self.index = index

    @classmethod
    def from_images(cls, images):
        return cls(perm_from_images(images))

    @property
    def images(self):
        return PERMS[self.index]

    @property
    def parity(self):
        return PARITY[self.index]

    def __call__(self, k):
        return PERMS[self.index][k]

    def __mul__(self, other):
        """Composition self∘other (apply ``other`` first)."""
        return Perm4(MUL[self.index][other.index])

    def inverse(self):
        return Perm4(INV[self.index])

    def __eq__(self, other):
        return isinstance(other, Perm4) and self.index == other.index

    def __hash__(self):
        return hash(self.index)

    def __repr__(self):
        return f"Perm4{self.images}"
