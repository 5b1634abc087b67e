"""Command-line front end.

Exit codes: 0 success, 1 computation error (e.g. the grid is not a knot),
2 malformed input, 3 resource ceiling exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import griddiag as gd
from .complex import blocked_arrows, dump_arrows, dump_minus, enumerate_generators, hat_arrows
from .homology import BigradedRanks, InternalError, bigraded_homology, format_alexander
from .invariants import (
    NotDivisible,
    alexander_poly_mod2,
    genus_fibered,
    hfk_hat,
    hfl_hat,
    invariants_report,
    tau,
)
from .resources import Budget, ResourceLimitExceeded

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
MAX_UNFORCED_N = 10


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[Path]
    fmt: str = "human"
    mem_limit: int = 8 * 2**30
    threads: int = 1
    window: tuple[int, int] | None = None
    seed: int = 0
    force: bool = False

    def __post_init__(self):
        if self.mem_limit <= 0:
            raise InputError("--mem-limit must be positive")
        if self.threads < 1:
            raise InputError("--threads must be at least 1")


_SIZE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([kmgt]?)i?b?\s*$", re.I)


def parse_size(text: str) -> int:
    m = _SIZE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad size {text!r}")
    scale = {"": 1, "k": 2**10, "m": 2**20, "g": 2**30, "t": 2**40}[m.group(2).lower()]
    return int(float(m.group(1)) * scale)


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window {text!r}; expected A_lo:A_hi") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("window lower bound exceeds upper bound")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("human", "json"), default="human")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--mem-limit", type=parse_size, default=8 * 2**30)
    common.add_argument("--window", type=parse_window, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--force", action="store_true", help=f"allow n > {MAX_UNFORCED_N}")

    p = argparse.ArgumentParser(prog="gridfloer", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("validate", "parse a grid file and check its invariants"),
        ("info", "grid number, components and generator count"),
        ("homology", "bigraded homology of the blocked complex"),
        ("hfk", "knot Floer homology (hat version)"),
        ("hfl", "link Floer homology (hat version)"),
        ("alexander", "Alexander polynomial mod 2"),
        ("genus", "Seifert genus and fiberedness"),
        ("tau", "concordance invariant tau"),
        ("invariants", "genus, fiberedness, tau, Alexander polynomial and HFK together"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("grids", nargs="+", type=Path)
    sp = sub.add_parser("dump", parents=[common], help="boundary matrix dump for debugging")
    sp.add_argument("grids", nargs="+", type=Path)
    sp.add_argument("--variant", choices=("blocked", "hat", "minus"), default="blocked")
    sp = sub.add_parser("moves", parents=[common], help="apply a move script and print the grid")
    sp.add_argument("grids", nargs=1, type=Path)
    sp.add_argument("script", nargs="?", type=Path)
    sp.add_argument("--random", type=int, default=0, metavar="K", help="apply K random moves")
    sp = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    sp.add_argument("--quick", action="store_true", help="smaller random samples and performance runs")
    sp.set_defaults(grids=[])
    return p


def load_grid(path: Path) -> gd.GridDiagram:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return gd.parse_grid(text)


def _guard(g: gd.GridDiagram, cfg: RunConfig) -> None:
    if g.n > MAX_UNFORCED_N and not cfg.force:
        raise ResourceLimitExceeded(
            0, cfg.mem_limit, f"refused n={g.n} ({math.factorial(g.n)} generators) without --force"
        )


def _ranks_human(h: BigradedRanks, knot: bool) -> str:
    lines = []
    for (m, a), r in h.items():
        lines.append(f"A={format_alexander(a)}  M={m}  rank {r}")
    lines.append(f"total rank {h.total}")
    return "\n".join(lines)


# ------------------------------------------------------------------ commands


def _cmd_validate(g, cfg, budget):
    ls = g.links
    obj = {"valid": True, "n": g.n, "components": ls.component_count}
    return obj, f"valid {g.n}x{g.n} grid, {ls.component_count} component(s)"


def _cmd_info(g, cfg, budget):
    ls = g.links
    count = math.factorial(g.n) if cfg.window is None else len(enumerate_generators(g, cfg.window))
    obj = {
        "n": g.n,
        "components": ls.component_count,
        "rows_per_component": list(ls.rows_per_component),
        "generators": count,
    }
    text = (
        f"n = {g.n}\ncomponents = {ls.component_count} "
        f"(rows per component: {', '.join(map(str, ls.rows_per_component))})\n"
        f"generators = {count}"
    )
    return obj, text


def _cmd_homology(g, cfg, budget):
    h = bigraded_homology(g, cfg.window, threads=cfg.threads, budget=budget)
    return h.to_json_obj(), _ranks_human(h, g.is_knot)


def _cmd_hfk(g, cfg, budget):
    g.require_knot()
    h = hfk_hat(g, bigraded_homology(g, threads=cfg.threads, budget=budget))
    return h.to_json_obj(), _ranks_human(h, True)


def _cmd_hfl(g, cfg, budget):
    h = hfl_hat(g, bigraded_homology(g, threads=cfg.threads, budget=budget))
    return h.to_json_obj(), _ranks_human(h, False)


def _cmd_alexander(g, cfg, budget):
    p = alexander_poly_mod2(g)
    return {"alexander_mod2": [[e, 1] for e in sorted(p.exponents())]}, f"Delta mod 2 = {p}"


def _cmd_genus(g, cfg, budget):
    genus, fibered = genus_fibered(g, cfg.window, budget)
    obj = {"genus": genus, "fibered": fibered}
    text = f"genus = {genus}\nfibered = {'yes' if fibered else 'no'}"
    if cfg.window is not None:
        obj["window"] = list(cfg.window)
        text += f"\n(scan confined to Alexander window {cfg.window[0]}:{cfg.window[1]})"
    return obj, text


def _cmd_tau(g, cfg, budget):
    t = tau(g, budget)
    return {"tau": t}, f"tau = {t}"


def _cmd_invariants(g, cfg, budget):
    obj = invariants_report(g, threads=cfg.threads, budget=budget)
    text = (
        f"genus = {obj['genus']}\nfibered = {'yes' if obj['fibered'] else 'no'}\n"
        f"tau = {obj['tau']}\n"
        f"Delta mod 2 exponents = {[e for e, _ in obj['alexander_mod2']]}\n"
        + _ranks_human(BigradedRanks.from_json_obj(obj["hfk"]), True)
    )
    return obj, text


def _cmd_dump(g, cfg, budget, variant="blocked"):
    if variant == "minus":
        text = dump_minus(g)
    else:
        gens = enumerate_generators(g, cfg.window if variant == "blocked" else None)
        arrows = blocked_arrows(g, gens) if variant == "blocked" else hat_arrows(g, gens)
        text = dump_arrows(gens, arrows)
    return {"arrows": text.splitlines()}, text


COMMANDS = {
    "validate": _cmd_validate,
    "info": _cmd_info,
    "homology": _cmd_homology,
    "hfk": _cmd_hfk,
    "hfl": _cmd_hfl,
    "alexander": _cmd_alexander,
    "genus": _cmd_genus,
    "tau": _cmd_tau,
    "invariants": _cmd_invariants,
}


def apply_move_script(g: gd.GridDiagram, script: str) -> gd.GridDiagram:
    """Apply moves line by line.

    Lines: ``translate DR DC``, ``commute C``, ``stabilize R``, ``mirror``,
    ``transpose``; columns and rows 1-based; ``#`` starts a comment.
    """
    for lineno, raw in enumerate(script.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise InputError(f"move script line {lineno}: bad argument") from None
        arity = {"translate": 2, "commute": 1, "stabilize": 1, "mirror": 0, "transpose": 0}
        if op not in arity or len(nums) != arity[op]:
            raise InputError(f"move script line {lineno}: cannot parse {line!r}")
        if op == "translate":
            g = gd.cyclic_translate(g, *nums)
        elif op == "commute":
            g = gd.commute_columns(g, nums[0] - 1)
        elif op == "stabilize":
            g = gd.stabilize(g, nums[0] - 1)
        elif op == "mirror":
            g = gd.mirror(g)
        else:
            g = gd.transpose(g)
    return g


def _emit(cfg: RunConfig, path: Path | None, obj, text, out) -> None:
    multi = len(cfg.inputs) > 1
    if cfg.fmt == "json":
        if multi and path is not None:
            obj = {"input": str(path), **obj}
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        if multi and path is not None:
            out.write(f"== {path}\n")
        out.write(text.rstrip("\n") + "\n")


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            command=ns.command,
            inputs=list(ns.grids),
            fmt=ns.fmt,
            mem_limit=ns.mem_limit,
            threads=ns.threads,
            window=ns.window,
            seed=ns.seed,
            force=ns.force,
        )
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    budget = Budget(cfg.mem_limit)

    if cfg.command == "selftest":
        from .acceptance import run_all

        results = run_all(quick=ns.quick, seed=cfg.seed)
        if cfg.fmt == "json":
            out.write(json.dumps([r.as_dict() for r in results], sort_keys=True) + "\n")
        else:
            for r in results:
                out.write(r.line() + "\n")
        return EXIT_OK if all(r.passed for r in results) else EXIT_COMPUTE

    status = EXIT_OK
    for path in cfg.inputs:
        try:
            g = load_grid(path)
            if cfg.command == "moves":
                if ns.script is not None:
                    try:
                        script = ns.script.read_text(encoding="utf-8")
                    except OSError as exc:
                        raise InputError(f"{ns.script}: {exc.strerror}") from None
                    g = apply_move_script(g, script)
                if ns.random:
                    g, _ = gd.random_moves(g, ns.random, np.random.default_rng(cfg.seed))
                _emit(cfg, path, {"grid": gd.format_grid(g)}, gd.format_grid(g), out)
                continue
            _guard(g, cfg)
            if cfg.command == "dump":
                obj, text = _cmd_dump(g, cfg, budget, ns.variant)
            else:
                obj, text = COMMANDS[cfg.command](g, cfg, budget)
            _emit(cfg, path, obj, text, out)
        except (gd.GridError, InputError) as exc:
            err.write(f"error: {path}: {exc}\n")
            status = max(status, EXIT_INPUT)
        except ResourceLimitExceeded as exc:
            err.write(f"error: {path}: {exc}\n")
            return EXIT_RESOURCE
        except (gd.NotAKnot, gd.IllegalCommutation, NotDivisible, InternalError, ValueError) as exc:
            err.write(f"error: {path}: {type(exc).__name__}: {exc}\n")
            status = max(status, EXIT_COMPUTE)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
