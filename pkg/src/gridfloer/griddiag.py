"""Grid diagrams: parsing, validation, component tracing, winding tables, moves.

Conventions used throughout the package (all indices 0-based internally):

* rows are numbered bottom-to-top, columns left-to-right;
* ``o[i]`` / ``x[i]`` is the column of the white (O) / black (X) dot in row i;
* cell ``(i, j)`` (row, column) is the unit square ``[j, j+1] x [i, i+1]``,
  dots sit at cell centres;
* lattice point ``(u, v)`` is the intersection of vertical circle ``u`` with
  horizontal circle ``v``.

The text format and all user-facing output use 1-based columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np


class GridError(ValueError):
    """Malformed grid input."""


class NotAPermutation(GridError):
    pass


class DotCollision(GridError):
    pass


class SizeMismatch(GridError):
    pass


class IllegalCommutation(ValueError):
    pass


class NotAKnot(ValueError):
    """Raised by knot-only operations when the grid presents a link."""


@dataclass(frozen=True)
class LinkStructure:
    component_of_row: tuple[int, ...]
    rows_per_component: tuple[int, ...]
    successor: tuple[int, ...]

    @property
    def component_count(self) -> int:
        return len(self.rows_per_component)

    def rows(self, comp: int) -> list[int]:
        return [r for r, c in enumerate(self.component_of_row) if c == comp]


@dataclass(frozen=True)
class GridDiagram:
    o: tuple[int, ...]
    x: tuple[int, ...]

    def __post_init__(self):
        o = tuple(int(v) for v in self.o)
        x = tuple(int(v) for v in self.x)
        object.__setattr__(self, "o", o)
        object.__setattr__(self, "x", x)
        n = len(o)
        if len(x) != n:
            raise SizeMismatch(f"O has {n} entries but X has {len(x)}")
        if n < 2:
            raise SizeMismatch("grid number must be at least 2")
        for name, perm in (("O", o), ("X", x)):
            if sorted(perm) != list(range(n)):
                raise NotAPermutation(f"{name} is not a permutation of 1..{n}")
        for i in range(n):
            if o[i] == x[i]:
                raise DotCollision(f"DotCollision row {i + 1}")

    @classmethod
    def from_one_based(cls, o: Sequence[int], x: Sequence[int]) -> "GridDiagram":
        return cls(tuple(v - 1 for v in o), tuple(v - 1 for v in x))

    @property
    def n(self) -> int:
        return len(self.o)

    @cached_property
    def o_inv(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for r, c in enumerate(self.o):
            inv[c] = r
        return tuple(inv)

    @cached_property
    def x_inv(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for r, c in enumerate(self.x):
            inv[c] = r
        return tuple(inv)

    @cached_property
    def links(self) -> LinkStructure:
        return trace_components(self)

    @property
    def is_knot(self) -> bool:
        return self.links.component_count == 1

    def require_knot(self) -> None:
        if not self.is_knot:
            raise NotAKnot(
                f"grid presents a {self.links.component_count}-component link"
            )

    def x0(self) -> tuple[int, ...]:
        """Generator at the lower-left corners of the white-dot cells."""
        return self.o

    def serialize(self) -> str:
        return format_grid(self)

    def ascii(self) -> str:
        lines = []
        for i in reversed(range(self.n)):
            row = ["."] * self.n
            row[self.o[i]] = "O"
            row[self.x[i]] = "X"
            lines.append(" ".join(row))
        return "\n".join(lines)


def parse_grid(text: str) -> GridDiagram:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) != 3:
        raise GridError("expected three lines: n, 'O: ...', 'X: ...'")
    try:
        n = int(lines[0])
    except ValueError:
        raise GridError(f"bad grid size {lines[0]!r}") from None
    if n < 2:
        raise SizeMismatch("grid number must be at least 2")
    perms = {}
    for ln in lines[1:]:
        key, sep, rest = ln.partition(":")
        key = key.strip().upper()
        if not sep or key not in ("O", "X") or key in perms:
            raise GridError(f"bad line {ln!r}")
        try:
            vals = [int(tok) for tok in rest.split()]
        except ValueError:
            raise GridError(f"non-integer entry in {ln!r}") from None
        if len(vals) != n:
            raise SizeMismatch(f"{key} has {len(vals)} entries, expected {n}")
        if sorted(vals) != list(range(1, n + 1)):
            raise NotAPermutation(f"{key} is not a permutation of 1..{n}")
        perms[key] = vals
    return GridDiagram.from_one_based(perms["O"], perms["X"])


def format_grid(g: GridDiagram) -> str:
    o = " ".join(str(c + 1) for c in g.o)
    x = " ".join(str(c + 1) for c in g.x)
    return f"{g.n}\nO: {o}\nX: {x}\n"


def trace_components(g: GridDiagram) -> LinkStructure:
    # row i -> X in column x[i] -> O in that column -> its row
    succ = tuple(g.o_inv[g.x[i]] for i in range(g.n))
    comp = [-1] * g.n
    sizes = []
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        cid = len(sizes)
        r, size = start, 0
        while comp[r] < 0:
            comp[r] = cid
            size += 1
            r = succ[r]
        sizes.append(size)
    return LinkStructure(tuple(comp), tuple(sizes), succ)


def winding_table(g: GridDiagram, component: int | None = None) -> np.ndarray:
    """Minus the winding number of the planar projection around each lattice point.

    Returns an integer array ``a`` of shape ``(n+1, n+1)`` indexed ``a[u, v]``
    over the planar lattice; the toroidal lattice is the ``[:n, :n]`` corner.
    With ``component`` given, only that component's strands are counted.
    """
    n = g.n
    comp = g.links.component_of_row
    a = np.zeros((n + 1, n + 1), dtype=np.int64)
    v = np.arange(n + 1)
    for c in range(n):
        r_x, r_o = g.x_inv[c], g.o_inv[c]
        if component is not None and comp[r_x] != component:
            continue
        lo, hi = min(r_x, r_o), max(r_x, r_o)
        # vertical strand X -> O at x = c + 1/2; a leftward ray from (u, v)
        # meets it iff u > c and lo < v <= hi
        sign = 1 if r_o > r_x else -1
        inside = (v > lo) & (v <= hi)
        a[c + 1 :, inside] += sign
    return a


def cyclic_translate(g: GridDiagram, dr: int, dc: int) -> GridDiagram:
    n = g.n
    o = [0] * n
    x = [0] * n
    for i in range(n):
        o[(i + dr) % n] = (g.o[i] + dc) % n
        x[(i + dr) % n] = (g.x[i] + dc) % n
    return GridDiagram(tuple(o), tuple(x))


def mirror(g: GridDiagram) -> GridDiagram:
    """Reflect the columns left-to-right; presents the mirror link.

    Verticals stay vertical, so they still cross over and the reflection
    reverses every crossing of the projection.
    """
    n = g.n
    return GridDiagram(tuple(n - 1 - c for c in g.o), tuple(n - 1 - c for c in g.x))


def transpose(g: GridDiagram) -> GridDiagram:
    """Reflect in the diagonal: ``O'[j] = O^-1(j)``.

    The diagonal reflection mirrors the projection but also trades which
    strand is vertical, so it presents the same link with orientation
    reversed, not the mirror.
    """
    return GridDiagram(g.o_inv, g.x_inv)


def _interleaved(p: tuple[int, int], q: tuple[int, int]) -> bool:
    """Vertical spans that neither nest nor stay apart; a shared endpoint counts."""
    if set(p) & set(q):
        return True
    a, b = sorted(p)
    c, d = sorted(q)
    return (a < c < b) != (a < d < b)


def commute_columns(g: GridDiagram, c: int) -> GridDiagram:
    """Exchange columns ``c`` and ``c+1`` (cyclically)."""
    n = g.n
    c %= n
    d = (c + 1) % n
    if _interleaved((g.x_inv[c], g.o_inv[c]), (g.x_inv[d], g.o_inv[d])):
        raise IllegalCommutation(f"columns {c + 1} and {d + 1} interleave")
    swap = {c: d, d: c}
    o = tuple(swap.get(v, v) for v in g.o)
    x = tuple(swap.get(v, v) for v in g.x)
    return GridDiagram(o, x)


def legal_commutations(g: GridDiagram) -> list[int]:
    out = []
    for c in range(g.n):
        d = (c + 1) % g.n
        if not _interleaved((g.x_inv[c], g.o_inv[c]), (g.x_inv[d], g.o_inv[d])):
            out.append(c)
    return out


def stabilize(g: GridDiagram, row: int) -> GridDiagram:
    """Stabilize at the X marker of ``row``.

    A new row is inserted above ``row`` and a new column right of the X's
    column ``c``.  The 2x2 block gets X at its SW cell (the original one), X at
    NE and O at NW; the O formerly in column ``c`` moves to the new column.
    """
    n = g.n
    r = row % n
    c = g.x[r]
    r_o = g.o_inv[c]

    def col(j: int) -> int:
        return j if j < c else j + 1

    def new_row(i: int) -> int:
        return i if i <= r else i + 1

    o = [0] * (n + 1)
    x = [0] * (n + 1)
    for i in range(n):
        ni = new_row(i)
        o[ni] = c + 1 if i == r_o else col(g.o[i])
        x[ni] = c if i == r else col(g.x[i])
    o[r + 1] = c
    x[r + 1] = c + 1
    return GridDiagram(tuple(o), tuple(x))


def random_moves(g: GridDiagram, k: int, rng: np.random.Generator, max_n: int = 7):
    """Random sequence of invariance moves; returns the grid and the script."""
    script = []
    for _ in range(k):
        options = ["translate"]
        if legal_commutations(g):
            options.append("commute")
        if g.n < max_n:
            options.append("stabilize")
        op = options[rng.integers(len(options))]
        if op == "translate":
            dr, dc = (int(v) for v in rng.integers(0, g.n, size=2))
            g = cyclic_translate(g, dr, dc)
            script.append(f"translate {dr} {dc}")
        elif op == "commute":
            legal = legal_commutations(g)
            c = legal[rng.integers(len(legal))]
            g = commute_columns(g, c)
            script.append(f"commute {c + 1}")
        else:
            r = int(rng.integers(g.n))
            g = stabilize(g, r)
            script.append(f"stabilize {r + 1}")
    return g, script


def torus_grid(n: int, shift: int) -> GridDiagram:
    """X on the diagonal, O shifted right by ``shift``; T(shift, n-shift) when coprime."""
    return GridDiagram(tuple((i + shift) % n for i in range(n)), tuple(range(n)))


def random_grid(n: int, rng: np.random.Generator) -> GridDiagram:
    o = rng.permutation(n)
    while True:
        x = rng.permutation(n)
        if np.all(x != o):
            return GridDiagram(tuple(o.tolist()), tuple(x.tolist()))


def all_grids(n: int):
    """Every valid n x n grid diagram."""
    from itertools import permutations

    perms = list(permutations(range(n)))
    for o in perms:
        for x in perms:
            if all(a != b for a, b in zip(o, x)):
                yield GridDiagram(o, x)
