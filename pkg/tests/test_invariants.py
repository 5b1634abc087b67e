import numpy as np
import pytest

from gridfloer import griddiag as gd
from gridfloer.complex import all_permutations
from gridfloer.fixtures import (
    FIGURE_EIGHT,
    FIVE_TWO,
    HOPF,
    T25,
    T34,
    TREFOIL,
    UNKNOT,
    UNKNOT3,
    UNLINK2,
)
from gridfloer.homology import BigradedRanks, bigraded_homology
from gridfloer.invariants import (
    ONE_PLUS_TINV,
    LaurentF2,
    NotDivisible,
    _det_gf2t,
    alexander_poly_mod2,
    divide_v,
    generator_poly_mod2,
    genus_fibered,
    hfk_hat,
    hfl_hat,
    homology_alexander_poly_mod2,
    invariants_report,
    permanent_poly_mod2,
    tau,
    winding_determinant_mod2,
    winding_permanent_mod2,
)

KNOTS = [UNKNOT, UNKNOT3, TREFOIL, gd.mirror(TREFOIL), FIGURE_EIGHT, FIVE_TWO, T25, T34]


# --------------------------------------------------------------------------
# Laurent polynomials over GF(2)


def test_laurent_arithmetic():
    p = LaurentF2.from_exponents([1, 0, -1])
    assert str(p) == "T + 1 + T^-1"
    assert p.exponents() == [-1, 0, 1]
    assert (p + p).is_zero
    assert str(ONE_PLUS_TINV * ONE_PLUS_TINV) == "1 + T^-2"
    assert (p * ONE_PLUS_TINV**3).divexact(ONE_PLUS_TINV**3) == p
    assert LaurentF2.from_exponents([2, 2]) == LaurentF2(0)
    with pytest.raises(NotDivisible):
        LaurentF2.from_exponents([0, 1, 2]).divexact(ONE_PLUS_TINV)
    assert p.is_palindromic() and not ONE_PLUS_TINV.is_palindromic()


def test_determinant_of_small_matrices():
    # [[1, T], [T, 1]] -> 1 + T^2 over GF(2)
    assert _det_gf2t([[1, 2], [2, 1]]) == 0b101
    assert _det_gf2t([[0, 1], [1, 0]]) == 1
    assert _det_gf2t([[1, 1], [1, 1]]) == 0


# --------------------------------------------------------------------------
# Alexander polynomial


def test_alexander_values():
    assert str(alexander_poly_mod2(UNKNOT)) == "1"
    assert str(alexander_poly_mod2(TREFOIL)) == "T + 1 + T^-1"
    assert str(alexander_poly_mod2(gd.stabilize(TREFOIL, 3))) == "T + 1 + T^-1"
    assert str(alexander_poly_mod2(FIGURE_EIGHT)) == "T + 1 + T^-1"
    assert str(alexander_poly_mod2(FIVE_TWO)) == "1"
    assert str(alexander_poly_mod2(T25)) == "T^2 + T + 1 + T^-1 + T^-2"


def test_permanent_equals_determinant():
    for n in (2, 3, 4):
        for g in gd.all_grids(n):
            assert winding_permanent_mod2(g) == winding_determinant_mod2(g)
            if g.is_knot:
                assert permanent_poly_mod2(g) == generator_poly_mod2(g)
                assert alexander_poly_mod2(g).is_palindromic()
    for g in KNOTS:
        assert permanent_poly_mod2(g) == generator_poly_mod2(g)


def test_trefoil_generator_sum_divides():
    s = permanent_poly_mod2(TREFOIL)
    assert str(s.divexact(ONE_PLUS_TINV**4)) == "T + 1 + T^-1"


def test_alexander_requires_knot():
    with pytest.raises(gd.NotAKnot):
        alexander_poly_mod2(HOPF)


def test_euler_characteristic():
    for g in KNOTS:
        h = bigraded_homology(g)
        assert homology_alexander_poly_mod2(h, g.n) == alexander_poly_mod2(g)


def _skein_q(g):
    """Generator sum with the total winding, in powers of T^(1/2), V-factors removed."""
    n = g.n
    a = gd.winding_table(g)
    cells = [(r, g.o[r]) for r in range(n)] + [(r, g.x[r]) for r in range(n)]
    corner = sum(int(a[c, r] + a[c + 1, r] + a[c, r + 1] + a[c + 1, r + 1]) for r, c in cells)
    s = a[:n, :n][all_permutations(n), np.arange(n)].sum(axis=1)
    doubled = 2 * s - corner // 4 - (n - 1)
    vals, counts = np.unique(doubled, return_counts=True)
    p = LaurentF2.from_exponents(int(v) for v, c in zip(vals, counts) if c % 2)
    return p.divexact(LaurentF2.from_exponents([0, -2]) ** (n - 1))


def test_skein_relation():
    """Q(K+) + Q(K-) = (T^1/2 + T^-1/2) Q(K0) mod 2 on twist-region triples.

    Exponents are doubled, so T^1/2 is written as a single power.
    """
    half = LaurentF2.from_exponents([1, -1])
    assert str(_skein_q(UNKNOT)) == "1"
    assert _skein_q(HOPF) == half
    assert _skein_q(UNLINK2).is_zero
    triples = [
        (HOPF, UNLINK2, UNKNOT),
        (TREFOIL, UNKNOT, HOPF),
        (T25, TREFOIL, gd.torus_grid(6, 2)),
    ]
    for plus, minus, zero in triples:
        assert _skein_q(plus) + _skein_q(minus) == half * _skein_q(zero)


# --------------------------------------------------------------------------
# Floer homology


def test_hfk_values():
    assert hfk_hat(TREFOIL).knot_table() == {(-1, 0): 1, (0, 1): 1, (1, 2): 1}
    assert hfk_hat(UNKNOT).knot_table() == {(0, 0): 1}
    assert hfk_hat(gd.stabilize(TREFOIL, 0)) == hfk_hat(TREFOIL)
    assert hfk_hat(FIVE_TWO).knot_table() == {(1, 0): 2, (0, -1): 3, (-1, -2): 2}


def test_hfk_symmetry_and_tau_bounds():
    for g in KNOTS:
        table = hfk_hat(g).knot_table()
        for (a, m), r in table.items():
            assert table.get((-a, m - 2 * a)) == r
        genus, _ = genus_fibered(g)
        t = tau(g)
        assert abs(t) <= genus
        assert tau(gd.mirror(g)) == -t


def test_hfl_hopf():
    assert hfl_hat(HOPF).ranks == {
        (0, (1, 1)): 1,
        (-1, (-1, 1)): 1,
        (-1, (1, -1)): 1,
        (-2, (-1, -1)): 1,
    }


def test_hfl_agrees_with_hfk_on_knots():
    assert hfl_hat(TREFOIL) == hfk_hat(TREFOIL)


def test_hfl_split_unlink_symmetry():
    h = hfl_hat(UNLINK2)
    assert h.total == 2
    for (m, a), r in h.ranks.items():
        assert h[(m - sum(a), tuple(-v for v in a))] == r


def test_divide_v_rejects_non_multiples():
    with pytest.raises(NotDivisible):
        divide_v(BigradedRanks({(0, (0,)): 1}), 0, 1)


def test_genus_fibered():
    assert genus_fibered(TREFOIL) == (1, True)
    assert genus_fibered(UNKNOT) == (0, True)
    assert genus_fibered(gd.stabilize(TREFOIL, 4)) == (1, True)
    assert genus_fibered(FIVE_TWO) == (1, False)
    assert genus_fibered(T34) == (3, True)
    assert genus_fibered(T34, window=(2, 3)) == (3, True)


def test_tau_values():
    assert tau(UNKNOT) == 0
    assert tau(TREFOIL) == -1
    assert tau(gd.mirror(TREFOIL)) == 1
    assert tau(FIGURE_EIGHT) == 0
    assert tau(T25) == -2


def test_report_schema():
    rep = invariants_report(TREFOIL)
    assert set(rep) == {"genus", "fibered", "tau", "alexander_mod2", "hfk"}
    assert rep["genus"] == 1 and rep["fibered"] is True and rep["tau"] == -1
    assert rep["alexander_mod2"] == [[-1, 1], [0, 1], [1, 1]]
    assert rep["hfk"]["total_rank"] == 3
