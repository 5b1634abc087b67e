"""Knot and link invariants read off the grid complexes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .complex import all_permutations
from .grading import alexander2_all, alexander_data
from .griddiag import GridDiagram, winding_table
from .homology import (
    BigradedRanks,
    bigraded_homology,
    filtered_reduction,
    top_alexander_block,
)
from .resources import Budget


class NotDivisible(ArithmeticError):
    """An exact division guaranteed by the theory failed (a bug)."""


# --------------------------------------------------------------------------
# GF(2)[T, T^-1]


def _pmul(a: int, b: int) -> int:
    """Carry-less product of GF(2)[T] polynomials stored as bit masks."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    while a:
        low = a & -a
        out ^= b << (low.bit_length() - 1)
        a ^= low
    return out


def _pdivmod(a: int, b: int) -> tuple[int, int]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    q = 0
    db = b.bit_length()
    while a and a.bit_length() >= db:
        shift = a.bit_length() - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


@dataclass(frozen=True)
class LaurentF2:
    """Laurent polynomial over GF(2): ``bits`` times ``T**low``.

    Normalised so that bit 0 of ``bits`` is set (or the polynomial is zero
    with ``low == 0``).
    """

    bits: int
    low: int = 0

    def __post_init__(self):
        bits, low = self.bits, self.low
        if not bits:
            low = 0
        else:
            tz = (bits & -bits).bit_length() - 1
            bits >>= tz
            low += tz
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "low", low)

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "LaurentF2":
        exps = list(exps)
        if not exps:
            return cls(0)
        lo = min(exps)
        bits = 0
        for e in exps:
            bits ^= 1 << (e - lo)
        return cls(bits, lo)

    @classmethod
    def monomial(cls, e: int) -> "LaurentF2":
        return cls(1, e)

    def exponents(self) -> list[int]:
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(self.low + low.bit_length() - 1)
            bits ^= low
        return out

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: "LaurentF2") -> "LaurentF2":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.low, other.low)
        return LaurentF2(
            (self.bits << (self.low - lo)) ^ (other.bits << (other.low - lo)), lo
        )

    __sub__ = __add__

    def __mul__(self, other: "LaurentF2") -> "LaurentF2":
        return LaurentF2(_pmul(self.bits, other.bits), self.low + other.low)

    def __pow__(self, k: int) -> "LaurentF2":
        out = LaurentF2(1)
        for _ in range(k):
            out = out * self
        return out

    def divexact(self, other: "LaurentF2") -> "LaurentF2":
        q, r = _pdivmod(self.bits, other.bits)
        if r:
            raise NotDivisible(f"{self} is not divisible by {other}")
        return LaurentF2(q, self.low - other.low)

    def is_palindromic(self) -> bool:
        exps = self.exponents()
        return sorted(exps) == sorted(-e for e in exps)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for e in sorted(self.exponents(), reverse=True):
            terms.append("1" if e == 0 else "T" if e == 1 else f"T^{e}")
        return " + ".join(terms)


ONE_PLUS_TINV = LaurentF2.from_exponents([0, -1])


def permanent_poly_mod2(g: GridDiagram) -> LaurentF2:
    """``sum_x T^A(x)`` over all generators, by enumeration (knots)."""
    g.require_knot()
    a = alexander2_all(g, all_permutations(g.n))[:, 0] // 2
    vals, counts = np.unique(a, return_counts=True)
    return LaurentF2.from_exponents(int(v) for v, c in zip(vals, counts) if c % 2)


def _det_gf2t(mat: list[list[int]]) -> int:
    """Determinant over GF(2)[T] by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in mat]
    n = len(m)
    prev = 1
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _pmul(m[i][j], m[k][k]) ^ _pmul(m[i][k], m[k][j])
                q, r = _pdivmod(num, prev)
                if r:
                    raise NotDivisible("Bareiss step was not exact")
                m[i][j] = q
        prev = m[k][k]
    return m[n - 1][n - 1]


def generator_poly_mod2(g: GridDiagram) -> LaurentF2:
    """``sum_x T^A(x)`` mod 2 as a determinant, since permanent = determinant mod 2."""
    g.require_knot()
    data = alexander_data(g)
    a = data.tables[0]
    const8 = data.eighth_const[0]
    if const8 % 8:
        raise NotDivisible("knot Alexander normalisation is not integral")
    n = g.n
    lo = int(a.min())
    # entry (row i, column j) = T^{a(j, i)}
    mat = [[1 << int(a[j, i] - lo) for j in range(n)] for i in range(n)]
    return LaurentF2(_det_gf2t(mat), n * lo + const8 // 8)


def winding_permanent_mod2(g: GridDiagram) -> LaurentF2:
    """``sum_x T^(sum_i a(x_i))`` over all generators, total winding, any grid."""
    a = winding_table(g)[: g.n, : g.n]
    s = a[all_permutations(g.n), np.arange(g.n)].sum(axis=1)
    vals, counts = np.unique(s, return_counts=True)
    return LaurentF2.from_exponents(int(v) for v, c in zip(vals, counts) if c % 2)


def winding_determinant_mod2(g: GridDiagram) -> LaurentF2:
    """The same sum as :func:`winding_permanent_mod2`, as a determinant."""
    a = winding_table(g)[: g.n, : g.n]
    lo = int(a.min())
    mat = [[1 << int(a[j, i] - lo) for j in range(g.n)] for i in range(g.n)]
    return LaurentF2(_det_gf2t(mat), g.n * lo)


def alexander_poly_mod2(g: GridDiagram) -> LaurentF2:
    s = generator_poly_mod2(g)
    return s.divexact(ONE_PLUS_TINV ** (g.n - 1))


def homology_alexander_poly_mod2(h: BigradedRanks, n: int) -> LaurentF2:
    """Collapse knot homology ranks to ``sum rank T^A`` mod 2, divided by (1+T^-1)^(n-1)."""
    exps = []
    for (m, a), r in h.ranks.items():
        exps.extend([a[0] // 2] * (r % 2))
    return LaurentF2.from_exponents(exps).divexact(ONE_PLUS_TINV ** (n - 1))


# --------------------------------------------------------------------------
# dividing out the V factors


def divide_v(h: BigradedRanks, component: int, times: int) -> BigradedRanks:
    """Exact quotient by ``(1 + q^-1 t_c^-1)^times`` of the Poincare polynomial."""
    ranks = dict(h.ranks)
    for _ in range(times):
        ranks = _divide_once(ranks, component)
    return BigradedRanks(ranks)


def _divide_once(p: dict, comp: int) -> dict:
    def shifted(key):
        m, a = key
        a = list(a)
        a[comp] -= 2
        return (m - 1, tuple(a))

    def unshifted(key):
        m, a = key
        a = list(a)
        a[comp] += 2
        return (m + 1, tuple(a))

    q: dict = {}
    for key in sorted(p, key=lambda k: (-k[0], k[1])):
        val = p[key] - q.get(unshifted(key), 0)
        if val < 0:
            raise NotDivisible(f"negative coefficient at {key}")
        if val:
            q[key] = val
    check: dict = {}
    for key, v in q.items():
        check[key] = check.get(key, 0) + v
        s = shifted(key)
        check[s] = check.get(s, 0) + v
    if {k: v for k, v in check.items() if v} != {k: v for k, v in p.items() if v}:
        raise NotDivisible("Poincare polynomial is not divisible by the V factor")
    return q


def hfl_hat(g: GridDiagram, homology: BigradedRanks | None = None, **kw) -> BigradedRanks:
    h = homology if homology is not None else bigraded_homology(g, **kw)
    for comp, rows in enumerate(g.links.rows_per_component):
        h = divide_v(h, comp, rows - 1)
    return h


def hfk_hat(g: GridDiagram, homology: BigradedRanks | None = None, **kw) -> BigradedRanks:
    g.require_knot()
    return hfl_hat(g, homology, **kw)


def genus_fibered(
    g: GridDiagram,
    window: tuple[int, int] | None = None,
    budget: Budget | None = None,
) -> tuple[int, bool]:
    """Top Alexander grading of the knot homology and whether its rank is one.

    The blocked homology in its top Alexander grading equals the knot Floer
    group there (only the unshifted V-summand reaches it), so the scan stops
    at the first nonzero block from the top.  With ``window`` the scan is
    confined to that range of gradings.
    """
    a, block = top_alexander_block(g, window, budget)
    return a, block.total == 1


def tau(g: GridDiagram, budget: Budget | None = None) -> int:
    return filtered_reduction(g, budget).tau


def invariants_report(g: GridDiagram, threads: int = 1, budget: Budget | None = None) -> dict:
    h = bigraded_homology(g, threads=threads, budget=budget)
    hfk = hfk_hat(g, h)
    table = hfk.knot_table()
    top = max(a for a, _ in table)
    genus = top
    fibered = sum(r for (a, _), r in table.items() if a == top) == 1
    delta = alexander_poly_mod2(g)
    return {
        "genus": genus,
        "fibered": fibered,
        "tau": tau(g, budget),
        "alexander_mod2": [[e, 1] for e in sorted(delta.exponents())],
        "hfk": hfk.to_json_obj(),
    }
