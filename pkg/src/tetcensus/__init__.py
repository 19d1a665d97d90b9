"""Census engine for tetrahedral tessellations of cusped 3-manifolds.

Enumerates ideal triangulations in which every edge has order 6, groups
them into isometry classes via certified canonical cell decompositions
computed with exact arithmetic, and emits named census files with
homology, two-colorability and covering-map data.
"""

__version__ = "0.1.0"
