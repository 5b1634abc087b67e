"""Named grid diagrams used by the tests, the self-test and the docs."""

from .griddiag import GridDiagram, torus_grid

UNKNOT = GridDiagram.from_one_based([1, 2], [2, 1])
# left-handed trefoil; its knot Floer homology sits in (A, M) = (-1,0), (0,1), (1,2)
TREFOIL = GridDiagram.from_one_based([3, 4, 5, 1, 2], [1, 2, 3, 4, 5])
# Hopf link with eight empty squares and canonical generator x0 = (2143)
HOPF = GridDiagram.from_one_based([2, 1, 4, 3], [4, 3, 2, 1])
UNLINK2 = GridDiagram.from_one_based([1, 2, 3, 4], [2, 1, 4, 3])
UNKNOT3 = GridDiagram.from_one_based([1, 2, 3], [2, 3, 1])
FIGURE_EIGHT = GridDiagram.from_one_based([3, 4, 6, 5, 2, 1], [5, 2, 3, 1, 6, 4])
# positive 5_2 twist knot (genus 1, not fibered)
FIVE_TWO = GridDiagram.from_one_based([2, 7, 6, 1, 5, 3, 4], [6, 5, 4, 3, 2, 7, 1])
T34 = torus_grid(7, 3)
T25 = torus_grid(7, 2)
