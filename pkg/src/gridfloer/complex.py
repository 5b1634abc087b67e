"""Generators, rectangles and the three grid differentials.

Differentials counted here (all mod 2, rectangles with no generator point in
their open interior):

* blocked: rectangles free of both O and X markers;
* hat: O-free rectangles, X allowed; the arrow carries the Alexander drop
  (number of X markers inside);
* minus: any rectangle, decorated with the U-monomial of the O markers it
  contains.

Generators are enumerated in lexicographic order of the permutation, so
boundary matrices are reproducible bit for bit.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

from .grading import (
    Generator,
    Rectangle,
    alexander2_all,
    format_perm,
    maslov_all,
    rectangle_from,
)
from .griddiag import GridDiagram


def all_permutations(n: int) -> np.ndarray:
    """Every permutation of ``range(n)`` in lexicographic order, shape ``(n!, n)``."""
    dtype = np.int8 if n < 128 else np.int16
    out = np.empty((math.factorial(n), n), dtype=dtype)
    for k, p in enumerate(permutations(range(n))):
        out[k] = p
    return out


def lex_rank(perms: np.ndarray) -> np.ndarray:
    """Lexicographic index of each row of ``perms`` among all permutations."""
    perms = np.asarray(perms)
    if perms.ndim == 1:
        perms = perms[None, :]
    n = perms.shape[1]
    rank = np.zeros(perms.shape[0], dtype=np.int64)
    for k in range(n - 1):
        smaller_later = (perms[:, k + 1 :] < perms[:, k : k + 1]).sum(axis=1)
        rank += smaller_later * math.factorial(n - 1 - k)
    return rank


@dataclass
class GeneratorSet:
    """Generators of a grid complex, optionally restricted to an Alexander window.

    ``window`` is an inclusive range on the (knot) Alexander grading, or on
    every component's grading for links, in ordinary (not doubled) units.
    """

    grid: GridDiagram
    perms: np.ndarray
    alexander2: np.ndarray
    window: tuple[int, int] | None = None
    _ranks: np.ndarray = field(init=False, repr=False)
    _maslov: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self._ranks = lex_rank(self.perms)

    def __len__(self) -> int:
        return self.perms.shape[0]

    def __iter__(self) -> Iterator[Generator]:
        for row in self.perms:
            yield tuple(int(c) for c in row)

    @property
    def count(self) -> int:
        return len(self)

    @property
    def maslov(self) -> np.ndarray:
        if self._maslov is None:
            self._maslov = maslov_all(self.grid, self.perms)
        return self._maslov

    def index_of(self, perms: np.ndarray) -> np.ndarray:
        """Position of each permutation in this set, -1 where absent."""
        r = lex_rank(perms)
        pos = np.searchsorted(self._ranks, r)
        pos = np.minimum(pos, len(self) - 1)
        hit = self._ranks[pos] == r
        return np.where(hit, pos, -1)


def enumerate_generators(
    g: GridDiagram, window: tuple[int, int] | None = None
) -> GeneratorSet:
    perms = all_permutations(g.n)
    a2 = alexander2_all(g, perms)
    if window is not None:
        lo, hi = window
        keep = np.all((a2 >= 2 * lo) & (a2 <= 2 * hi), axis=1)
        perms, a2 = perms[keep], a2[keep]
    return GeneratorSet(g, perms, a2, window)


# --------------------------------------------------------------------------
# single-generator operations


def rectangles_between(x: Sequence[int], y: Sequence[int]) -> list[Rectangle]:
    diff = [i for i in range(len(x)) if x[i] != y[i]]
    if len(diff) != 2:
        return []
    i, j = diff
    if x[i] != y[j] or x[j] != y[i]:
        return []
    return [rectangle_from(x, i, j), rectangle_from(x, j, i)]


def _swap(sigma: Sequence[int], i: int, j: int) -> Generator:
    s = list(sigma)
    s[i], s[j] = s[j], s[i]
    return tuple(s)


def _outgoing(sigma: Sequence[int]) -> Iterator[tuple[Rectangle, Generator]]:
    n = len(sigma)
    for i in range(n):
        for j in range(n):
            if i != j:
                yield rectangle_from(sigma, i, j), _swap(sigma, i, j)


def _mod2(items) -> list:
    counts = Counter(items)
    return sorted(k for k, v in counts.items() if v % 2)


def boundary_blocked(g: GridDiagram, x: Sequence[int]) -> list[Generator]:
    out = []
    for r, y in _outgoing(x):
        if r.interior_points(x) == 0 and r.white_count(g) == 0 and r.black_count(g) == 0:
            out.append(y)
    return _mod2(out)


def boundary_hat(g: GridDiagram, x: Sequence[int]) -> list[tuple[Generator, int]]:
    g.require_knot()
    out = []
    for r, y in _outgoing(x):
        if r.interior_points(x) == 0 and r.white_count(g) == 0:
            out.append((y, r.black_count(g)))
    return _mod2(out)


@dataclass(frozen=True, order=True)
class MonomialArrow:
    target: Generator
    u_exponents: tuple[int, ...]


def boundary_minus(g: GridDiagram, x: Sequence[int]) -> list[MonomialArrow]:
    out = []
    for r, y in _outgoing(x):
        if r.interior_points(x) == 0:
            exps = [0] * g.n
            for row in r.whites(g):
                exps[row] += 1
            out.append(MonomialArrow(y, tuple(exps)))
    return _mod2(out)


def minus_squared(g: GridDiagram, x: Sequence[int]) -> list[MonomialArrow]:
    """Surviving terms of the symbolic expansion of d-(d-(x)); empty iff d^2 x = 0."""
    terms = []
    for a in boundary_minus(g, x):
        for b in boundary_minus(g, a.target):
            exps = tuple(p + q for p, q in zip(a.u_exponents, b.u_exponents))
            terms.append(MonomialArrow(b.target, exps))
    return _mod2(terms)


# --------------------------------------------------------------------------
# whole-complex arrows (vectorised)


@dataclass
class Arrows:
    """Sparse mod-2 boundary: ``src[k] -> dst[k]`` with optional Alexander drop."""

    src: np.ndarray
    dst: np.ndarray
    drop: np.ndarray | None = None

    def __len__(self) -> int:
        return self.src.shape[0]


def _rectangle_masks(g: GridDiagram, perms: np.ndarray, i: int, j: int):
    """Interior-point, O and X counts of the rectangle from each generator (rows i -> j)."""
    n = g.n
    p = perms.astype(np.int16, copy=False)
    a = p[:, i]
    w = (p[:, j] - a) % n
    h = (j - i) % n
    k = np.zeros(p.shape[0], dtype=np.int16)
    for t in range(1, h):
        off = (p[:, (i + t) % n] - a) % n
        k += (off > 0) & (off < w)
    wo = np.zeros_like(k)
    bx = np.zeros_like(k)
    for t in range(h):
        r = (i + t) % n
        wo += (g.o[r] - a) % n < w
        bx += (g.x[r] - a) % n < w
    return k, wo, bx


def _collect(g, gens, kind):
    perms = gens.perms
    srcs, dsts, drops = [], [], []
    idx = np.arange(len(gens), dtype=np.int64)
    n = g.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            k, wo, bx = _rectangle_masks(g, perms, i, j)
            if kind == "blocked":
                ok = (k == 0) & (wo == 0) & (bx == 0)
            else:
                ok = (k == 0) & (wo == 0)
            if not ok.any():
                continue
            sel = idx[ok]
            tgt = perms[sel].copy()
            tgt[:, [i, j]] = tgt[:, [j, i]]
            srcs.append(sel)
            dsts.append(gens.index_of(tgt))
            if kind == "hat":
                drops.append(bx[ok].astype(np.int64))
    if not srcs:
        empty = np.zeros(0, dtype=np.int64)
        return Arrows(empty, empty.copy(), empty.copy() if kind == "hat" else None)
    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    drop = np.concatenate(drops) if kind == "hat" else None
    if np.any(dst < 0):
        raise RuntimeError("differential left the generator window")
    # mod-2 cancellation of parallel arrows
    key = src * len(gens) + dst
    order = np.argsort(key, kind="stable")
    key = key[order]
    uniq, start, counts = np.unique(key, return_index=True, return_counts=True)
    odd = counts % 2 == 1
    pick = order[start[odd]]
    out = Arrows(src[pick], dst[pick], drop[pick] if drop is not None else None)
    return out


def blocked_arrows(g: GridDiagram, gens: GeneratorSet) -> Arrows:
    return _collect(g, gens, "blocked")


def hat_arrows(g: GridDiagram, gens: GeneratorSet, knot_only: bool = True) -> Arrows:
    """O-free rectangles; ``knot_only=False`` admits links (used by the d^2 checks)."""
    if knot_only:
        g.require_knot()
    if gens.window is not None:
        raise ValueError("the hat complex is not closed under an Alexander window")
    return _collect(g, gens, "hat")


def square_support(arrows: Arrows, size: int) -> int:
    """Number of nonzero entries of the mod-2 composite d o d."""
    if len(arrows) == 0:
        return 0
    order = np.argsort(arrows.src, kind="stable")
    src, dst = arrows.src[order], arrows.dst[order]
    starts = np.searchsorted(src, np.arange(size + 1))
    outdeg = starts[1:] - starts[:-1]
    reps = outdeg[dst]
    first = np.repeat(src, reps)
    # position of each second arrow: starts[dst] + 0..reps-1
    offsets = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
    second = dst[np.repeat(starts[dst], reps) + offsets]
    key = first.astype(np.int64) * size + second
    _, counts = np.unique(key, return_counts=True)
    return int(np.count_nonzero(counts % 2))


def dump_arrows(gens: GeneratorSet, arrows: Arrows) -> str:
    """Debug dump: one ``src dst`` line per arrow, sorted."""
    lines = []
    for s, d in zip(arrows.src, arrows.dst):
        lines.append(f"{format_perm(gens.perms[s])} {format_perm(gens.perms[d])}")
    return "\n".join(sorted(lines))


def dump_minus(g: GridDiagram) -> str:
    """Debug dump of the minus complex: ``src dst [u-exponents]`` per arrow, sorted."""
    lines = []
    for sigma in permutations(range(g.n)):
        for arrow in boundary_minus(g, sigma):
            exps = " ".join(map(str, arrow.u_exponents))
            lines.append(f"{format_perm(sigma)} {format_perm(arrow.target)} [{exps}]")
    return "\n".join(sorted(lines))


def empty_rectangle_census(g: GridDiagram) -> Counter:
    """Marker-free rectangles on the torus, keyed by (width, height).

    Counts every embedded rectangle with lattice corners whose cells hold no
    O or X; generator points are not considered.
    """
    n = g.n
    occupied = np.zeros((n, n), dtype=bool)
    for r in range(n):
        occupied[r, g.o[r]] = occupied[r, g.x[r]] = True
    census: Counter = Counter()
    for r0 in range(n):
        for c0 in range(n):
            for h in range(1, n):
                for w in range(1, n):
                    rows = [(r0 + t) % n for t in range(h)]
                    cols = [(c0 + t) % n for t in range(w)]
                    if not occupied[np.ix_(rows, cols)].any():
                        census[(w, h)] += 1
    return census
