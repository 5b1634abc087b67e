"""GF(2) homology of grid complexes.

Vectors over GF(2) are Python ints used as bitsets (bit k = coordinate k).
Bigraded homology splits the blocked complex by Alexander multi-degree and
Maslov degree; the filtered reduction runs the standard lowest-one column
reduction over the hat complex ordered by Alexander filtration.
"""

from __future__ import annotations

import json
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .complex import (
    Arrows,
    GeneratorSet,
    blocked_arrows,
    boundary_hat,
    enumerate_generators,
    hat_arrows,
)
from .grading import alexander_knot, maslov
from .griddiag import GridDiagram
from .resources import Budget


class InternalError(RuntimeError):
    """A structural guarantee of the theory failed; indicates a bug."""


# --------------------------------------------------------------------------
# sparse GF(2) matrices


@dataclass
class SparseBoolMatrix:
    """Column-major 0/1 matrix; ``cols[j]`` is a bitset of the nonzero rows."""

    nrows: int
    cols: list[int]

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @classmethod
    def from_dense(cls, a) -> "SparseBoolMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        cols = []
        for j in range(a.shape[1]):
            v = 0
            for i in np.flatnonzero(a[:, j]):
                v |= 1 << int(i)
            cols.append(v)
        return cls(a.shape[0], cols)

    @classmethod
    def from_entries(
        cls, nrows: int, ncols: int, rows: Iterable[int], cols: Iterable[int]
    ) -> "SparseBoolMatrix":
        """Build from (row, col) pairs; repeated entries cancel mod 2."""
        data = [0] * ncols
        for r, c in zip(rows, cols):
            data[c] ^= 1 << int(r)
        return cls(nrows, data)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for j, v in enumerate(self.cols):
            while v:
                low = v & -v
                out[low.bit_length() - 1, j] = 1
                v ^= low
        return out

    def nnz(self) -> int:
        return sum(v.bit_count() for v in self.cols)


def gf2_rank(columns: Iterable[int]) -> int:
    """Rank of a set of GF(2) vectors given as int bitsets."""
    pivots: dict[int, int] = {}
    for v in columns:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                break
            v ^= p
    return len(pivots)


def gf2_rank_kernel(m: SparseBoolMatrix) -> tuple[int, int]:
    r = gf2_rank(m.cols)
    return r, m.ncols - r


# --------------------------------------------------------------------------
# bigraded ranks


Key = tuple[int, tuple[int, ...]]  # (maslov, alexander2)


def format_alexander(a2: Sequence[int]) -> str:
    parts = []
    for v in a2:
        f = Fraction(v, 2)
        parts.append(str(f.numerator) if f.denominator == 1 else f"{f.numerator}/2")
    return "(" + ", ".join(parts) + ")" if len(parts) > 1 else parts[0]


@dataclass
class BigradedRanks:
    """Ranks indexed by (Maslov, doubled Alexander vector)."""

    ranks: dict[Key, int] = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {k: v for k, v in self.ranks.items() if v}

    @property
    def total(self) -> int:
        return sum(self.ranks.values())

    def __getitem__(self, key: Key) -> int:
        return self.ranks.get(key, 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, BigradedRanks) and self.ranks == other.ranks

    def items(self):
        return sorted(self.ranks.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def by_alexander(self) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = defaultdict(int)
        for (m, a), r in self.ranks.items():
            out[a] += r
        return dict(sorted(out.items()))

    def knot_table(self) -> dict[tuple[int, int], int]:
        """``{(A, M): rank}`` with integer A, for knot results."""
        out = {}
        for (m, a), r in self.ranks.items():
            if len(a) != 1 or a[0] % 2:
                raise ValueError("not a knot grading")
            out[(a[0] // 2, m)] = r
        return out

    def to_json_obj(self, display: bool = True) -> dict:
        entries = []
        for (m, a), r in self.items():
            e = {"maslov": m, "alexander2": list(a), "rank": r}
            if display:
                e["alexander_display"] = format_alexander(a)
            entries.append(e)
        return {"total_rank": self.total, "ranks": entries}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(**kw), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "BigradedRanks":
        ranks = {
            (e["maslov"], tuple(e["alexander2"])): e["rank"] for e in obj["ranks"]
        }
        out = cls(ranks)
        if out.total != obj["total_rank"]:
            raise ValueError("total_rank disagrees with the entries")
        return out


# --------------------------------------------------------------------------
# bigraded homology of the blocked complex


def _block_index(gens: GeneratorSet):
    """Group generator indices by (alexander2, maslov); local index within group."""
    a2 = gens.alexander2
    m = gens.maslov
    groups: dict[tuple, list[int]] = defaultdict(list)
    for s in range(len(gens)):
        groups[(tuple(int(v) for v in a2[s]), int(m[s]))].append(s)
    local = np.empty(len(gens), dtype=np.int64)
    for members in groups.values():
        local[members] = np.arange(len(members))
    return groups, local


def check_blocked_grading(gens: GeneratorSet, arrows: Arrows) -> None:
    m = gens.maslov
    if np.any(m[arrows.dst] != m[arrows.src] - 1):
        raise InternalError("blocked differential does not drop Maslov grading by 1")
    if np.any(gens.alexander2[arrows.dst] != gens.alexander2[arrows.src]):
        raise InternalError("blocked differential does not preserve Alexander grading")


def _block_rank(src_local, dst_local, ncols) -> int:
    cols = [0] * ncols
    for s, d in zip(src_local, dst_local):
        cols[s] ^= 1 << d
    return gf2_rank(cols)


def homology_of_blocks(
    gens: GeneratorSet,
    arrows: Arrows,
    alexanders: Iterable[tuple[int, ...]] | None = None,
    threads: int = 1,
    budget: Budget | None = None,
) -> BigradedRanks:
    """Bigraded homology restricted to the given Alexander multi-degrees."""
    check_blocked_grading(gens, arrows)
    groups, local = _block_index(gens)
    wanted = set(alexanders) if alexanders is not None else None
    by_src_group: dict[tuple, list[int]] = defaultdict(list)
    src_key = {}
    for key, members in groups.items():
        for s in members:
            src_key[s] = key
    for k, s in enumerate(arrows.src.tolist()):
        by_src_group[src_key[s]].append(k)

    keys = sorted(k for k in groups if wanted is None or k[0] in wanted)

    def rank_of(key):
        ks = by_src_group.get(key, [])
        if not ks:
            return key, 0
        ks = np.asarray(ks)
        return key, _block_rank(
            local[arrows.src[ks]].tolist(), local[arrows.dst[ks]].tolist(), len(groups[key])
        )

    ranks: dict[tuple, int] = {}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for done, (key, r) in enumerate(pool.map(rank_of, keys), 1):
                ranks[key] = r
                if budget is not None:
                    budget.check(f"{done} of {len(keys)} homology blocks reduced")
    else:
        for done, key in enumerate(keys, 1):
            ranks[key] = rank_of(key)[1]
            if budget is not None:
                budget.check(f"{done} of {len(keys)} homology blocks reduced")

    out = {}
    for (a, m) in keys:
        dim = len(groups[(a, m)])
        r_out = ranks[(a, m)]
        r_in = ranks.get((a, m + 1))
        if r_in is None:
            r_in = rank_of((a, m + 1))[1] if (a, m + 1) in groups else 0
        h = dim - r_out - r_in
        if h:
            out[(m, a)] = h
    return BigradedRanks(out)


def bigraded_homology(
    g: GridDiagram,
    window: tuple[int, int] | None = None,
    threads: int = 1,
    budget: Budget | None = None,
) -> BigradedRanks:
    gens = enumerate_generators(g, window)
    if budget is not None:
        budget.check("generators enumerated")
    arrows = blocked_arrows(g, gens)
    if budget is not None:
        budget.check("blocked boundary computed")
    return homology_of_blocks(gens, arrows, threads=threads, budget=budget)


def top_alexander_block(
    g: GridDiagram,
    window: tuple[int, int] | None = None,
    budget: Budget | None = None,
) -> tuple[int, BigradedRanks]:
    """Highest Alexander grading with nonzero blocked homology, scanning top-down.

    Knots only.  Returns the grading and the homology in that block.
    """
    g.require_knot()
    gens = enumerate_generators(g, window)
    arrows = blocked_arrows(g, gens)
    levels = sorted({int(v) for v in gens.alexander2[:, 0]}, reverse=True)
    for a2 in levels:
        h = homology_of_blocks(gens, arrows, alexanders=[(a2,)], budget=budget)
        if h.total:
            return a2 // 2, h
    raise InternalError("blocked homology vanished in every Alexander grading")


# --------------------------------------------------------------------------
# filtered reduction of the hat complex


@dataclass
class FilteredReduction:
    """Persistence data of the Alexander-filtered hat complex.

    ``essential`` lists ``(maslov, birth)`` for every class that never dies;
    ``pairs`` lists ``(maslov, birth, death)`` of the finite bars, births and
    deaths given as Alexander filtration levels.
    """

    essential: list[tuple[int, int]]
    pairs: list[tuple[int, int, int]]
    tau: int

    def essential_by_maslov(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for m, _ in self.essential:
            out[m] += 1
        return dict(sorted(out.items()))


def filtered_reduction(g: GridDiagram, budget: Budget | None = None) -> FilteredReduction:
    g.require_knot()
    gens = enumerate_generators(g)
    arrows = hat_arrows(g, gens)
    if budget is not None:
        budget.check("hat boundary computed")
    alex = gens.alexander2[:, 0] // 2
    mas = gens.maslov
    if np.any(mas[arrows.dst] != mas[arrows.src] - 1):
        raise InternalError("hat differential does not drop Maslov grading by 1")
    if np.any(alex[arrows.dst] - alex[arrows.src] != -arrows.drop):
        raise InternalError("hat differential Alexander drop mismatch")

    # filtration order: Alexander ascending, ties lexicographic (= index order)
    order = np.lexsort((np.arange(len(gens)), alex))
    degree_members: dict[int, list[int]] = defaultdict(list)
    for s in order.tolist():
        degree_members[int(mas[s])].append(s)
    local = np.empty(len(gens), dtype=np.int64)
    for members in degree_members.values():
        local[members] = np.arange(len(members))

    cols: dict[int, list[int]] = {d: [0] * len(v) for d, v in degree_members.items()}
    for s, d in zip(arrows.src.tolist(), arrows.dst.tolist()):
        cols[int(mas[s])][local[s]] ^= 1 << int(local[d])

    essential: list[tuple[int, int]] = []
    pairs: list[tuple[int, int, int]] = []
    cleared: set[int] = set()  # degree-d columns already known to be paired creators
    for deg in sorted(degree_members, reverse=True):
        members = degree_members[deg]
        below = degree_members.get(deg - 1, [])
        pivots: dict[int, int] = {}
        for j, col in enumerate(cols[deg]):
            if j in cleared:
                continue
            while col:
                low = col.bit_length() - 1
                p = pivots.get(low)
                if p is None:
                    pivots[low] = col
                    pairs.append((deg - 1, int(alex[below[low]]), int(alex[members[j]])))
                    break
                col ^= p
            if not col:
                essential.append((deg, int(alex[members[j]])))
        cleared = set(pivots)
        if budget is not None:
            budget.check(f"filtered reduction at Maslov {deg}")
    ess = essential
    ess.sort()
    zero = [b for d, b in ess if d == 0]
    if len(zero) != 1:
        raise InternalError(f"{len(zero)} essential classes in Maslov grading 0, expected 1")
    return FilteredReduction(ess, sorted(pairs), zero[0])


# --------------------------------------------------------------------------
# independent oracle for tau (small grids)


def _echelon(vectors: Iterable[int]) -> dict[int, int]:
    piv: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in piv:
                piv[top] = v
                break
            v ^= piv[top]
    return piv


def _reduce(v: int, piv: dict[int, int]) -> int:
    while v:
        top = v.bit_length() - 1
        if top not in piv:
            return v
        v ^= piv[top]
    return v


def _kernel_basis(cols: list[int]) -> list[int]:
    """Kernel of the map sending basis vector j to ``cols[j]``, as bitsets over j."""
    basis: list[tuple[int, int]] = []  # (image, combination)
    piv: dict[int, tuple[int, int]] = {}
    kernel = []
    for j, v in enumerate(cols):
        comb = 1 << j
        while v:
            top = v.bit_length() - 1
            if top not in piv:
                piv[top] = (v, comb)
                break
            pv, pc = piv[top]
            v ^= pv
            comb ^= pc
        if not v:
            kernel.append(comb)
    return kernel


def tau_by_enumeration(g: GridDiagram, max_kernel_dim: int = 22) -> int:
    """Minimum over all cycle representatives of the Maslov-0 class of the max Alexander grading.

    Built from the single-generator hat boundary and per-generator gradings,
    independent of the vectorised pipeline.  Exponential in the kernel size.
    """
    from itertools import permutations

    g.require_knot()
    gens = list(permutations(range(g.n)))
    mas = {s: maslov(g, s) for s in gens}
    c0 = [s for s in gens if mas[s] == 0]
    cm1 = {s: k for k, s in enumerate(t for t in gens if mas[t] == -1)}
    c1 = [s for s in gens if mas[s] == 1]
    idx0 = {s: k for k, s in enumerate(c0)}
    alex = [alexander_knot(g, s) for s in c0]

    def column(s, target_index):
        v = 0
        for y, _drop in boundary_hat(g, s):
            v ^= 1 << target_index[y]
        return v

    d0 = [column(s, cm1) for s in c0]
    d1 = [column(s, idx0) for s in c1]
    kernel = _kernel_basis(d0)
    if len(kernel) > max_kernel_dim:
        raise ValueError(f"kernel dimension {len(kernel)} too large to enumerate")
    image = _echelon(d1)
    best = None
    for coeffs in product((0, 1), repeat=len(kernel)):
        z = 0
        for c, b in zip(coeffs, kernel):
            if c:
                z ^= b
        if not z or not _reduce(z, image):
            continue
        top = max(alex[k] for k in range(len(c0)) if z >> k & 1)
        best = top if best is None else min(best, top)
    if best is None:
        raise InternalError("no Maslov-0 homology in the hat complex")
    return best
