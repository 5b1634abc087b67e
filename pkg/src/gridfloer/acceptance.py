"""Acceptance checks shared by the test suite and ``gridfloer selftest``.

Each check returns a :class:`Check` carrying what was expected, what was
observed and how long it took.  ``quick=True`` shrinks the randomised and
performance checks so the self-test finishes in seconds; the test suite
always runs the full versions.
"""

from __future__ import annotations

import resource
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from . import griddiag as gd
from .complex import (
    blocked_arrows,
    enumerate_generators,
    hat_arrows,
    minus_squared,
    square_support,
)
from .fixtures import (
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
from .grading import alexander2, maslov, parse_perm
from .homology import bigraded_homology, filtered_reduction, tau_by_enumeration
from .invariants import (
    ONE_PLUS_TINV,
    LaurentF2,
    alexander_poly_mod2,
    genus_fibered,
    hfk_hat,
    hfl_hat,
    permanent_poly_mod2,
    generator_poly_mod2,
    winding_determinant_mod2,
    winding_permanent_mod2,
)
from .resources import Budget

GiB = 2**30


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    expected: str
    actual: str
    seconds: float = 0.0
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"[{tag}] {self.number:>2} {self.name}: expected {self.expected}; "
            f"got {self.actual} ({self.seconds:.2f} s)"
        )

    def as_dict(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "expected": self.expected,
            "actual": self.actual,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }


def _knot_fixtures() -> list[tuple[str, gd.GridDiagram]]:
    return [
        ("unknot", UNKNOT),
        ("unknot3", UNKNOT3),
        ("trefoil", TREFOIL),
        ("mirror trefoil", gd.mirror(TREFOIL)),
        ("stabilized trefoil", gd.stabilize(TREFOIL, 0)),
        ("figure eight", FIGURE_EIGHT),
        ("5_2", FIVE_TWO),
        ("T(2,5)", T25),
        ("T(3,4)", T34),
    ]


def _peak_rss_bytes() -> int:
    # ru_maxrss is reported in KiB on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


# --------------------------------------------------------------------------
# individual criteria


def check_trefoil_complex(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    delta = alexander_poly_mod2(TREFOIL)
    gens = enumerate_generators(TREFOIL)
    h = bigraded_homology(TREFOIL)
    by_a = h.by_alexander()
    dist = [by_a.get((2 * k,), 0) for k in range(-5, 2)]
    secs = time.perf_counter() - t0
    ok = (
        str(delta) == "T + 1 + T^-1"
        and gens.count == 120
        and h.total == 48
        and dist == [1, 5, 11, 14, 11, 5, 1]
        and sum(dist) == h.total
        and secs < 1.0
    )
    return Check(
        1,
        "trefoil complex",
        ok,
        "Delta=T + 1 + T^-1, 120 generators, rank 48 distributed [1, 5, 11, 14, 11, 5, 1] over A = -5..1, < 1 s",
        f"Delta={delta}, {gens.count} generators, rank {h.total} distributed {dist}",
        secs,
    )


def check_trefoil_hfk(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    table = hfk_hat(TREFOIL).knot_table()
    gf = genus_fibered(TREFOIL)
    secs = time.perf_counter() - t0
    want = {(-1, 0): 1, (0, 1): 1, (1, 2): 1}
    ok = table == want and gf == (1, True)
    return Check(
        2,
        "trefoil HFK, genus, fibered",
        ok,
        f"{sorted(want.items())}, genus 1, fibered",
        f"{sorted(table.items())}, genus {gf[0]}, fibered={gf[1]}",
        secs,
    )


def check_hopf(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    h = bigraded_homology(HOPF)
    hfl = hfl_hat(HOPF, h)
    want_hfl = {(0, (1, 1)): 1, (-1, (-1, 1)): 1, (-1, (1, -1)): 1, (-2, (-1, -1)): 1}
    gradings = {
        "A(3214)": alexander2(HOPF, parse_perm("3214")),
        "A(2143)": alexander2(HOPF, parse_perm("2143")),
        "M(2143)": maslov(HOPF, parse_perm("2143")),
        "M(2134)": maslov(HOPF, parse_perm("2134")),
        "M(2314)": maslov(HOPF, parse_perm("2314")),
    }
    want_gr = {
        "A(3214)": (1, 1),
        "A(2143)": (-1, -1),
        "M(2143)": -3,
        "M(2134)": -2,
        "M(2314)": -1,
    }
    secs = time.perf_counter() - t0
    ok = h.total == 16 and hfl.ranks == want_hfl and gradings == want_gr
    return Check(
        3,
        "Hopf link",
        ok,
        f"rank 16, HFL {sorted(want_hfl.items())}, gradings {want_gr} (A doubled)",
        f"rank {h.total}, HFL {sorted(hfl.ranks.items())}, gradings {gradings}",
        secs,
    )


def _d_squared_failures(g: gd.GridDiagram) -> int:
    gens = enumerate_generators(g)
    return square_support(blocked_arrows(g, gens), len(gens)) + square_support(
        hat_arrows(g, gens, knot_only=False), len(gens)
    )


def check_d_squared(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    bad: list[str] = []
    exhaustive = 0
    for n in (2, 3, 4):
        for g in gd.all_grids(n):
            exhaustive += 1
            if _d_squared_failures(g):
                bad.append(gd.format_grid(g))
    per_size = 10 if quick else 100
    sampled = 0
    for n in (5, 6):
        for _ in range(per_size):
            g = gd.random_grid(n, rng)
            sampled += 1
            if _d_squared_failures(g):
                bad.append(gd.format_grid(g))
    minus_fixtures = [UNKNOT, UNKNOT3, HOPF, UNLINK2, TREFOIL, gd.mirror(TREFOIL)]
    minus_bad = 0
    for g in minus_fixtures:
        for sigma in enumerate_generators(g):
            if minus_squared(g, sigma):
                minus_bad += 1
    secs = time.perf_counter() - t0
    ok = not bad and minus_bad == 0 and secs < 300
    return Check(
        4,
        "d^2 = 0",
        ok,
        "no nonzero entries of d^2 (blocked, hat, minus), < 300 s",
        f"{len(bad)} failing grids of {exhaustive} exhaustive + {sampled} random; "
        f"{minus_bad} minus failures on {len(minus_fixtures)} fixtures",
        secs,
        bad[:5],
    )


def check_grading_contract(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 1)
    problems: list[str] = []
    count = 20 if quick else 50
    for _ in range(count):
        n = int(rng.integers(2, 8))
        g = gd.random_grid(n, rng)
        gens = enumerate_generators(g)
        m = gens.maslov
        a = gens.alexander2
        b = blocked_arrows(g, gens)
        if np.any(m[b.dst] != m[b.src] - 1) or np.any(a[b.dst] != a[b.src]):
            problems.append(f"blocked arrow grading on {g.serialize()!r}")
        h = hat_arrows(g, gens, knot_only=False)
        if np.any(m[h.dst] != m[h.src] - 1) or np.any(a[h.dst] > a[h.src]):
            problems.append(f"hat arrow grading on {g.serialize()!r}")
        x0 = g.x0()
        if maslov(g, x0) != 1 - n:
            problems.append(f"M(x0) = {maslov(g, x0)} on {g.serialize()!r}")
        idx = int(gens.index_of(np.array(x0))[0])
        if int(m[idx]) != 1 - n:
            problems.append(f"vectorised M(x0) = {int(m[idx])} on {g.serialize()!r}")
    secs = time.perf_counter() - t0
    return Check(
        5,
        "grading contract",
        not problems,
        f"dM = -1 and dA = 0 (blocked) / dA <= 0 (hat); M(x0) = 1-n on {count} random grids",
        f"{len(problems)} violations",
        secs,
        problems[:5],
    )


def check_determinant_oracle(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    grids = 0
    knots = 0
    mismatches = 0
    non_palindromic = 0
    for n in (2, 3, 4, 5):
        for g in gd.all_grids(n):
            grids += 1
            if winding_permanent_mod2(g) != winding_determinant_mod2(g):
                mismatches += 1
            if g.is_knot:
                knots += 1
                if permanent_poly_mod2(g) != generator_poly_mod2(g):
                    mismatches += 1
                if not alexander_poly_mod2(g).is_palindromic():
                    non_palindromic += 1
    tref = str(alexander_poly_mod2(TREFOIL))
    unk = str(alexander_poly_mod2(UNKNOT))
    secs = time.perf_counter() - t0
    ok = mismatches == 0 and non_palindromic == 0 and tref == "T + 1 + T^-1" and unk == "1"
    return Check(
        6,
        "permanent = determinant mod 2",
        ok,
        "agreement on all grids n <= 5, trefoil T + 1 + T^-1, unknot 1, palindromic",
        f"{mismatches} mismatches over {grids} grids ({knots} knots), "
        f"{non_palindromic} non-palindromic, trefoil {tref}, unknot {unk}",
        secs,
    )


def check_euler_characteristic(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    bad = []
    for name, g in _knot_fixtures():
        h = bigraded_homology(g)
        exps = []
        for (_, a), r in h.ranks.items():
            exps.extend([a[0] // 2] * (r % 2))
        poincare = LaurentF2.from_exponents(exps)
        expected = alexander_poly_mod2(g) * ONE_PLUS_TINV ** (g.n - 1)
        if poincare != expected:
            bad.append(f"{name}: {poincare} != {expected}")
    secs = time.perf_counter() - t0
    return Check(
        7,
        "Euler characteristic",
        not bad,
        "sum rank T^A = Delta (1+T^-1)^(n-1) mod 2 on every knot fixture",
        f"{len(bad)} mismatches over {len(_knot_fixtures())} fixtures",
        secs,
        bad,
    )


def check_tau(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    problems: list[str] = []
    named = {
        "unknot": (UNKNOT, 0),
        "trefoil": (TREFOIL, -1),
        "mirror trefoil": (gd.mirror(TREFOIL), 1),
    }
    got = {}
    for name, (g, want) in named.items():
        got[name] = filtered_reduction(g).tau
        if got[name] != want:
            problems.append(f"tau({name}) = {got[name]}, expected {want}")
    for name, g in _knot_fixtures():
        if g.n > 7:
            continue
        ess = filtered_reduction(g).essential_by_maslov()
        want = {-k: comb(g.n - 1, k) for k in range(g.n)}
        if ess != want:
            problems.append(f"{name}: essential classes {ess}, expected {want}")
    brute = 0
    for n in (2, 3, 4):
        for g in gd.all_grids(n):
            if not g.is_knot:
                continue
            brute += 1
            a, b = filtered_reduction(g).tau, tau_by_enumeration(g)
            if a != b:
                problems.append(f"{g.serialize()!r}: filtered {a}, brute force {b}")
    secs = time.perf_counter() - t0
    if secs >= 120:
        problems.append(f"took {secs:.1f} s")
    return Check(
        8,
        "tau",
        not problems,
        "unknot 0, trefoil -1, mirror +1; binomial essential classes; "
        "filtered = brute force on all knot grids n <= 4; < 120 s",
        f"{got}; {brute} knot grids compared; {len(problems)} problems",
        secs,
        problems[:5],
    )


def _move_invariants(g: gd.GridDiagram) -> tuple:
    table = hfk_hat(g).knot_table()
    return (
        tuple(sorted(table.items())),
        genus_fibered(g),
        str(alexander_poly_mod2(g)),
        filtered_reduction(g).tau,
    )


def check_move_invariance(quick: bool = False, seed: int = 0) -> Check:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 2)
    cache: dict = {}

    def inv(g):
        if g not in cache:
            cache[g] = _move_invariants(g)
        return cache[g]

    total = 20 if quick else 200
    problems: list[str] = []
    seeds = [("unknot", UNKNOT), ("trefoil", TREFOIL)]
    for k in range(total):
        name, start = seeds[k % 2]
        length = int(rng.integers(1, 7))
        g, script = gd.random_moves(start, length, rng, max_n=7)
        if inv(g) != inv(start):
            problems.append(f"{name} after {'; '.join(script)}: {inv(g)} != {inv(start)}")
    secs = time.perf_counter() - t0
    return Check(
        9,
        "move invariance",
        not problems,
        f"HFK, genus, fibered, Delta mod 2 and tau unchanged by {total} random move sequences",
        f"{len(problems)} changed; {len(cache)} distinct grids evaluated",
        secs,
        problems[:5],
    )


def check_performance(quick: bool = False, seed: int = 0) -> Check:
    limit = 8 * GiB
    parts: list[str] = []
    ok = True
    t_all = time.perf_counter()

    def timed(label, fn):
        nonlocal ok
        budget = Budget(limit)
        t0 = time.perf_counter()
        result = fn(budget)
        secs = time.perf_counter() - t0
        budget.check(label)
        peak = max(budget.peak, _peak_rss_bytes())
        fine = secs < 600 and peak < limit
        ok = ok and fine
        parts.append(f"{label}: {result} in {secs:.1f} s, peak RSS {peak / GiB:.2f} GiB")
        return result

    if quick:
        def small(budget):
            g = T34
            h = bigraded_homology(g, budget=budget)
            return (hfk_hat(g, h).total, filtered_reduction(g, budget).tau)

        res = timed("7x7 T(3,4) pipeline", small)
        ok = ok and res == (5, -3)
        expected = "< 600 s and < 8 GiB; 7x7 T(3,4): HFK rank 5, tau -3 (quick mode)"
    else:
        def knot8(budget):
            g = gd.torus_grid(8, 3)
            h = bigraded_homology(g, budget=budget)
            return (hfk_hat(g, h).total, filtered_reduction(g, budget).tau)

        def link8(budget):
            g = gd.torus_grid(8, 2)
            h = bigraded_homology(g, budget=budget)
            return (h.total, hfl_hat(g, h).total)

        def window9(budget):
            return genus_fibered(gd.torus_grid(9, 2), window=(2, 3), budget=budget)

        r1 = timed("8x8 T(3,5) homology+HFK+tau", knot8)
        r2 = timed("8x8 shift-2 link homology+HFL", link8)
        r3 = timed("9x9 T(2,7) genus with window 2:3", window9)
        ok = ok and r1 == (7, -4) and r2 == (768, 12) and r3 == (3, True)
        expected = (
            "each run < 600 s and < 8 GiB; T(3,5): HFK rank 7, tau -4; "
            "T(2,6) link: rank 768, HFL rank 12; T(2,7): genus 3, fibered"
        )
    return Check(
        10,
        "performance",
        ok,
        expected,
        "; ".join(parts),
        time.perf_counter() - t_all,
    )


CRITERIA: list[Callable[..., Check]] = [
    check_trefoil_complex,
    check_trefoil_hfk,
    check_hopf,
    check_d_squared,
    check_grading_contract,
    check_determinant_oracle,
    check_euler_characteristic,
    check_tau,
    check_move_invariance,
    check_performance,
]


def run_all(quick: bool = False, seed: int = 0) -> list[Check]:
    return [fn(quick=quick, seed=seed) for fn in CRITERIA]
