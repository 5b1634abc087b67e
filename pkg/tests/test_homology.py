import json

import numpy as np
import pytest

from gridfloer import griddiag as gd
from gridfloer.complex import GeneratorSet, blocked_arrows, enumerate_generators
from gridfloer.fixtures import FIGURE_EIGHT, HOPF, TREFOIL, UNKNOT
from gridfloer.homology import (
    BigradedRanks,
    SparseBoolMatrix,
    bigraded_homology,
    filtered_reduction,
    format_alexander,
    gf2_rank,
    gf2_rank_kernel,
    homology_of_blocks,
    tau_by_enumeration,
    top_alexander_block,
)
from gridfloer.resources import Budget, ResourceLimitExceeded


def test_rank_kernel_basics():
    assert gf2_rank_kernel(SparseBoolMatrix.from_dense(np.eye(5, dtype=int))) == (5, 0)
    assert gf2_rank_kernel(SparseBoolMatrix.from_dense(np.zeros((3, 7), dtype=int))) == (0, 7)
    m = SparseBoolMatrix.from_dense([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    assert gf2_rank_kernel(m) == (2, 1)


def test_sparse_roundtrip_and_cancellation():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, size=(6, 9))
    m = SparseBoolMatrix.from_dense(a)
    assert np.array_equal(m.to_dense(), a)
    assert m.nnz() == int(a.sum())
    e = SparseBoolMatrix.from_entries(3, 2, [0, 0, 1], [1, 1, 0])
    assert e.to_dense().tolist() == [[0, 0], [1, 0], [0, 0]]


def test_rank_agrees_with_dense_elimination():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.integers(0, 2, size=(int(rng.integers(1, 12)), int(rng.integers(1, 12))))
        m = a.copy() % 2
        rank, row = 0, 0
        for col in range(m.shape[1]):
            piv = [r for r in range(row, m.shape[0]) if m[r, col]]
            if not piv:
                continue
            m[[row, piv[0]]] = m[[piv[0], row]]
            for r in range(m.shape[0]):
                if r != row and m[r, col]:
                    m[r] ^= m[row]
            row += 1
            rank += 1
        assert gf2_rank(SparseBoolMatrix.from_dense(a).cols) == rank


def test_hopf_boundary_rank():
    gens = enumerate_generators(HOPF)
    a = blocked_arrows(HOPF, gens)
    m = SparseBoolMatrix.from_entries(len(gens), len(gens), a.dst.tolist(), a.src.tolist())
    rank, _ = gf2_rank_kernel(m)
    assert len(gens) - 2 * rank == 16


def test_unknot_homology():
    h = bigraded_homology(UNKNOT)
    assert h.ranks == {(0, (0,)): 1, (-1, (-2,)): 1}
    assert h.total == 2


def test_trefoil_homology():
    h = bigraded_homology(TREFOIL)
    assert h.total == 48
    by_a = h.by_alexander()
    assert [by_a[(2 * k,)] for k in range(-5, 2)] == [1, 5, 11, 14, 11, 5, 1]


def test_hopf_homology():
    assert bigraded_homology(HOPF).total == 16


def test_ordering_and_thread_invariance():
    g = FIGURE_EIGHT
    gens = enumerate_generators(g)
    arrows = blocked_arrows(g, gens)
    ref = homology_of_blocks(gens, arrows)
    assert homology_of_blocks(gens, arrows, threads=4) == ref
    assert bigraded_homology(g, threads=3) == ref
    # reversed generator order
    perm = np.arange(len(gens))[::-1]
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    rev = GeneratorSet(g, gens.perms[perm], gens.alexander2[perm])
    rev._ranks = gens._ranks[perm]  # lookup is not used below
    from gridfloer.complex import Arrows

    rev_arrows = Arrows(inv[arrows.src], inv[arrows.dst])
    assert homology_of_blocks(rev, rev_arrows) == ref


def test_window_restricts_blocks():
    full = bigraded_homology(TREFOIL)
    win = bigraded_homology(TREFOIL, window=(0, 1))
    assert win.ranks == {k: v for k, v in full.ranks.items() if k[1][0] >= 0}


def test_top_block():
    a, block = top_alexander_block(TREFOIL)
    assert a == 1 and block.total == 1
    a, block = top_alexander_block(TREFOIL, window=(-2, 0))
    assert a == 0


def test_json_schema_and_roundtrip():
    h = bigraded_homology(HOPF)
    obj = h.to_json_obj()
    assert set(obj) == {"total_rank", "ranks"}
    keys = [(e["alexander2"], e["maslov"]) for e in obj["ranks"]]
    assert keys == sorted(keys)
    assert BigradedRanks.from_json_obj(json.loads(h.to_json())) == h
    assert h.to_json() == bigraded_homology(HOPF, threads=2).to_json()
    assert obj["ranks"][0]["alexander_display"] == format_alexander(obj["ranks"][0]["alexander2"])


def test_format_alexander():
    assert format_alexander((1, -1)) == "(1/2, -1/2)"
    assert format_alexander((4,)) == "2"


def test_from_json_rejects_bad_total():
    with pytest.raises(ValueError):
        BigradedRanks.from_json_obj({"total_rank": 3, "ranks": [{"maslov": 0, "alexander2": [0], "rank": 1}]})


def test_filtered_reduction_unknot():
    fr = filtered_reduction(UNKNOT)
    assert fr.tau == 0
    assert sorted(fr.essential) == [(-1, -1), (0, 0)]


def test_tau_trefoil_and_mirror():
    assert filtered_reduction(TREFOIL).tau == -1
    assert filtered_reduction(gd.mirror(TREFOIL)).tau == 1


def test_essential_classes_binomial():
    from math import comb

    for g in (UNKNOT, TREFOIL, FIGURE_EIGHT, gd.stabilize(TREFOIL, 1)):
        ess = filtered_reduction(g).essential_by_maslov()
        assert ess == {-k: comb(g.n - 1, k) for k in range(g.n)}


def test_tau_matches_brute_force():
    for n in (2, 3, 4):
        for g in gd.all_grids(n):
            if g.is_knot:
                assert filtered_reduction(g).tau == tau_by_enumeration(g)
    assert tau_by_enumeration(TREFOIL) == -1
    assert tau_by_enumeration(gd.mirror(TREFOIL)) == 1


def test_births_invariant_under_translation():
    ref = filtered_reduction(TREFOIL).essential
    for dr, dc in [(1, 0), (0, 2), (3, 4)]:
        moved = gd.cyclic_translate(TREFOIL, dr, dc)
        assert filtered_reduction(moved).essential == ref


def test_budget_aborts():
    budget = Budget(1)
    with pytest.raises(ResourceLimitExceeded) as info:
        bigraded_homology(TREFOIL, budget=budget)
    assert info.value.limit == 1
    with pytest.raises(ValueError):
        Budget(0)


def test_budget_tracks_peak():
    budget = Budget(64 * 2**30)
    bigraded_homology(TREFOIL, budget=budget)
    assert budget.peak > 0
