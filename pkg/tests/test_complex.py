from collections import Counter

import numpy as np
import pytest

from gridfloer import griddiag as gd
from gridfloer.complex import (
    MonomialArrow,
    all_permutations,
    blocked_arrows,
    boundary_blocked,
    boundary_hat,
    boundary_minus,
    dump_arrows,
    dump_minus,
    empty_rectangle_census,
    enumerate_generators,
    hat_arrows,
    lex_rank,
    minus_squared,
    rectangles_between,
    square_support,
)
from gridfloer.fixtures import HOPF, TREFOIL, UNKNOT
from gridfloer.grading import parse_perm
from gridfloer.griddiag import NotAKnot


def test_generator_counts():
    g4 = gd.random_grid(4, np.random.default_rng(0))
    assert enumerate_generators(g4).count == 24
    assert enumerate_generators(TREFOIL).count == 120


def test_lexicographic_order_and_rank():
    perms = all_permutations(5)
    assert [tuple(p) for p in perms] == sorted(tuple(p) for p in perms)
    assert np.array_equal(lex_rank(perms), np.arange(120))


def test_window_matches_full_scan():
    full = enumerate_generators(TREFOIL)
    win = enumerate_generators(TREFOIL, window=(1, 1))
    assert win.count == int(np.count_nonzero(full.alexander2[:, 0] == 2))
    assert win.count > 0
    assert np.all(win.alexander2 == 2)
    idx = full.index_of(win.perms)
    assert np.all(idx >= 0)


def test_index_of_missing():
    win = enumerate_generators(TREFOIL, window=(1, 1))
    outside = enumerate_generators(TREFOIL, window=(-5, -5)).perms
    assert np.all(win.index_of(outside) == -1)


def test_rectangles_between():
    x = (0, 1, 2, 3)
    assert len(rectangles_between(x, (1, 0, 2, 3))) == 2
    assert rectangles_between(x, x) == []
    assert rectangles_between(x, (1, 2, 0, 3)) == []


def test_unknot_boundaries():
    for sigma in [(0, 1), (1, 0)]:
        assert boundary_blocked(UNKNOT, sigma) == []
    assert boundary_hat(UNKNOT, (1, 0)) == []
    assert boundary_minus(UNKNOT, (0, 1)) == [
        MonomialArrow((1, 0), (0, 1)),
        MonomialArrow((1, 0), (1, 0)),
    ]
    assert boundary_minus(UNKNOT, (1, 0)) == []


def test_hat_homology_of_unknot_has_rank_two():
    gens = enumerate_generators(UNKNOT)
    arrows = hat_arrows(UNKNOT, gens)
    assert len(arrows) == 0  # two generators, both cycles, rank H(T^1) = 2


def test_hat_requires_knot_unless_asked():
    gens = enumerate_generators(HOPF)
    with pytest.raises(NotAKnot):
        hat_arrows(HOPF, gens)
    with pytest.raises(NotAKnot):
        boundary_hat(HOPF, HOPF.x0())
    assert len(hat_arrows(HOPF, gens, knot_only=False)) > 0


def test_hopf_has_sixteen_arrows():
    gens = enumerate_generators(HOPF)
    assert len(blocked_arrows(HOPF, gens)) == 16


def test_vectorised_matches_single_generator():
    rng = np.random.default_rng(1)
    grids = [TREFOIL, HOPF] + [gd.random_grid(int(rng.integers(2, 6)), rng) for _ in range(20)]
    for g in grids:
        gens = enumerate_generators(g)
        arrows = blocked_arrows(g, gens)
        vec = sorted(
            (tuple(gens.perms[s]), tuple(gens.perms[d])) for s, d in zip(arrows.src, arrows.dst)
        )
        single = sorted(
            (tuple(x), tuple(y)) for x in gens for y in boundary_blocked(g, x)
        )
        assert vec == single
        if g.is_knot:
            h = hat_arrows(g, gens)
            vec = sorted(
                (tuple(gens.perms[s]), tuple(gens.perms[d]), int(b))
                for s, d, b in zip(h.src, h.dst, h.drop)
            )
            single = sorted((tuple(x), y, b) for x in gens for y, b in boundary_hat(g, x))
            assert vec == single


def test_d_squared_exhaustive_n_le_4():
    for n in (2, 3, 4):
        for g in gd.all_grids(n):
            gens = enumerate_generators(g)
            assert square_support(blocked_arrows(g, gens), len(gens)) == 0
            assert square_support(hat_arrows(g, gens, knot_only=False), len(gens)) == 0


def test_d_squared_exhaustive_n5():
    for g in gd.all_grids(5):
        gens = enumerate_generators(g)
        assert square_support(blocked_arrows(g, gens), len(gens)) == 0
        assert square_support(hat_arrows(g, gens, knot_only=False), len(gens)) == 0


def test_d_squared_random_larger():
    rng = np.random.default_rng(2)
    for n, count in ((5, 20), (6, 20), (7, 4), (8, 1)):
        for _ in range(count):
            g = gd.random_grid(n, rng)
            gens = enumerate_generators(g)
            assert square_support(blocked_arrows(g, gens), len(gens)) == 0
            assert square_support(hat_arrows(g, gens, knot_only=False), len(gens)) == 0


def test_square_support_detects_nonzero():
    from gridfloer.complex import Arrows

    # 0 -> 1 -> 2 is not a differential
    a = Arrows(np.array([0, 1]), np.array([1, 2]))
    assert square_support(a, 3) == 1
    # 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3 is
    a = Arrows(np.array([0, 0, 1, 2]), np.array([1, 2, 3, 3]))
    assert square_support(a, 4) == 0


def test_minus_squared_vanishes():
    rng = np.random.default_rng(3)
    g = gd.random_grid(4, rng)
    for sigma in enumerate_generators(g):
        assert minus_squared(g, sigma) == []
    for g in (gd.random_grid(5, rng), TREFOIL):
        for sigma in enumerate_generators(g):
            assert minus_squared(g, sigma) == []


def test_minus_exponents_are_zero_one():
    for sigma in enumerate_generators(TREFOIL):
        for arrow in boundary_minus(TREFOIL, sigma):
            assert set(arrow.u_exponents) <= {0, 1}


def test_dumps_are_sorted_and_deterministic():
    gens = enumerate_generators(HOPF)
    text = dump_arrows(gens, blocked_arrows(HOPF, gens))
    lines = text.splitlines()
    assert len(lines) == 16 and lines == sorted(lines)
    assert text == dump_arrows(gens, blocked_arrows(HOPF, enumerate_generators(HOPF)))
    minus = dump_minus(UNKNOT)
    assert minus.splitlines() == ["12 21 [0 1]", "12 21 [1 0]"]


def test_trefoil_rectangle_census():
    census = empty_rectangle_census(TREFOIL)
    assert census == Counter({(1, 1): 15, (2, 1): 5, (1, 2): 5})
    assert sum(census.values()) == 25


def test_hopf_census_is_eight_squares():
    assert empty_rectangle_census(HOPF) == Counter({(1, 1): 8})


def test_grading_of_arrows_on_hopf():
    gens = enumerate_generators(HOPF)
    a = blocked_arrows(HOPF, gens)
    m = gens.maslov
    assert np.all(m[a.dst] == m[a.src] - 1)
    canonical = int(gens.index_of(np.array(parse_perm("2143")))[0])
    assert m[canonical] == -3
