"""Command-line entry point: ``realqe <subcommand> [options]``.

Exit status: 0 success or TRUE, 1 FALSE, 2 budget exhausted, 3 bad input.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from realqe import __version__
from realqe import formula as fm
from realqe import geometry as geo
from realqe import qe, reductions, signtable
from realqe.polynomials import (DEFAULT_MONOMIAL_BUDGET, ExpansionBudgetExceeded,
                                expansion_budget, parse_polynomial)

EXIT_OK, EXIT_FALSE, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

COMMANDS = ("decide", "eliminate", "table", "components", "reduce", "encode",
            "order-type", "arrangement", "cross-ratio")


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    input: str | None = None
    budget_nodes: int = qe.DEFAULT_NODE_BUDGET
    budget_monomials: int = DEFAULT_MONOMIAL_BUDGET
    k: int | None = None
    l: int | None = None
    C: float = 1.0
    C1: float = 1.0
    seed: int = 0
    format: str = "human"
    threads: int = 1
    peephole: bool = True
    full: bool = False
    from_order_type: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.budget_nodes <= 0 or self.budget_monomials <= 0:
            raise ValueError("budgets must be positive")
        if self.format not in ("human", "machine"):
            raise ValueError("format must be 'human' or 'machine'")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", help="input file (default: stdin)")
    common.add_argument("--config", help="file of 'key = value' lines; flags override it")
    common.add_argument("--budget-nodes", type=int, help="branch-tree node cap")
    common.add_argument("--budget-monomials", type=int, help="monomial cap for expansion")
    common.add_argument("--format", choices=("human", "machine"))
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)

    p = argparse.ArgumentParser(prog="realqe", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"realqe {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("decide", parents=[common], help="decide a sentence; prints TRUE or FALSE")
    sub.add_parser("eliminate", parents=[common], help="quantifier-free equivalent of a formula")
    t = sub.add_parser("table", parents=[common],
                       help="sign table of univariate polynomials, one per line")
    t.add_argument("--full", action="store_true", help="show the whole closure")
    sub.add_parser("components", parents=[common],
                   help="connected components of a univariate quantifier-free formula")
    r = sub.add_parser("reduce", parents=[common], help="reduce an existential formula")
    r.add_argument("target", choices=("feasible", "strict"))
    r.add_argument("--no-peephole", dest="peephole", action="store_false", default=None)
    r.add_argument("--k", type=int)
    r.add_argument("--l", type=int)
    r.add_argument("--C", type=float)
    r.add_argument("--C1", type=float)
    e = sub.add_parser("encode", parents=[common], help="encode a graph as a sentence")
    e.add_argument("target", choices=("seg",))
    e.add_argument("--graph", dest="graph", help="graph file ('n m' then edges)")
    sub.add_parser("order-type", parents=[common], help="order type of a point sequence")
    a = sub.add_parser("arrangement", parents=[common],
                       help="description of the arrangement of lines y = a*x - b given as 'a b'")
    a.add_argument("--from-order-type", action="store_true",
                   help="input is an order type; its last point is taken to be far below")
    sub.add_parser("cross-ratio", parents=[common], help="cross-ratio of four collinear points")
    return p


_INT_KEYS = {"budget_nodes", "budget_monomials", "k", "l", "seed", "threads"}
_FLOAT_KEYS = {"C", "C1"}
_BOOL_KEYS = {"peephole", "full", "from_order_type"}


def read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _BOOL_KEYS:
                out[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in ("format", "input"):
                out[key] = value
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = _parser().parse_args(argv)
    values: dict = {}
    env = os.environ.get("REALQE_BUDGET_NODES")
    if env:
        values["budget_nodes"] = int(env)
    if getattr(ns, "config", None):
        values.update(read_config_file(ns.config))
    for key in ("input", "budget_nodes", "budget_monomials", "format", "seed", "threads",
                "k", "l", "C", "C1", "peephole", "full", "from_order_type"):
        v = getattr(ns, key, None)
        if v is not None and v is not False:
            values[key] = v
    if getattr(ns, "peephole", None) is False:
        values["peephole"] = False
    if getattr(ns, "graph", None):
        values["input"] = ns.graph
    cfg = RunConfig(command=ns.command, target=getattr(ns, "target", None), **values)
    cfg.validate()
    return cfg


def _read(cfg: RunConfig, stdin) -> str:
    if cfg.input:
        with open(cfg.input, encoding="utf-8") as fh:
            return fh.read()
    return stdin.read()


def _formula_text(f: fm.Formula) -> str:
    return fm.to_text(f)


def run(cfg: RunConfig, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    text = _read(cfg, stdin)
    with expansion_budget(cfg.budget_monomials):
        return _dispatch(cfg, text, stdout)


def _dispatch(cfg: RunConfig, text: str, out) -> int:
    machine = cfg.format == "machine"
    cmd = cfg.command
    if cmd == "decide":
        f = fm.parse(text)
        truth = qe.decide_sentence(f, cfg.budget_nodes, cfg.threads)
        print("TRUE" if truth else "FALSE", file=out)
        return EXIT_OK if truth else EXIT_FALSE
    if cmd == "eliminate":
        f = fm.parse(text)
        print(_formula_text(qe.eliminate_all(f, cfg.budget_nodes, cfg.threads)), file=out)
        return EXIT_OK
    if cmd == "table":
        polys = [parse_polynomial(line) for line in text.splitlines() if line.strip()]
        if not polys:
            raise ValueError("no polynomials given")
        if cfg.full:
            _, table = signtable.build_sign_table(polys)
        else:
            table = signtable.restricted_table(polys)
        if machine:
            print(table.to_machine(), file=out)
        else:
            print(table.to_human(), file=out)
        return EXIT_OK
    if cmd == "components":
        f = fm.parse(text)
        print(signtable.count_components(f), file=out)
        return EXIT_OK
    if cmd == "reduce":
        f = fm.parse(text)
        if cfg.target == "feasible":
            inst = reductions.to_feasible(f, peephole=cfg.peephole)
            print(_formula_text(inst.to_formula()), file=out)
            return EXIT_OK
        inst = reductions.feasible_instance(f, peephole=cfg.peephole)
        strict = reductions.to_strictineq(inst, cfg.k, cfg.l, cfg.C, cfg.C1)
        print(_formula_text(strict.to_formula()), file=out)
        return EXIT_OK
    if cmd == "encode":
        g = reductions.parse_graph(text)
        print(_formula_text(reductions.encode_seg(g)), file=out)
        return EXIT_OK
    if cmd == "order-type":
        ot = geo.order_type(geo.parse_points(text))
        print(geo.format_order_type(ot), file=out)
        if not machine:
            print(f"# simple: {'yes' if ot.simple else 'no'}", file=out)
        return EXIT_OK
    if cmd == "arrangement":
        if cfg.from_order_type:
            d = geo.order_type_to_arrangement(geo.parse_order_type(text))
        else:
            lines = [geo.dualize(p) for p in geo.parse_points(text)]
            d = geo.arrangement_description(lines)
        print(d.to_text(), file=out)
        if not machine:
            problems = geo.check_description_consistency(d)
            print(f"# consistent: {'yes' if not problems else 'no'}", file=out)
        return EXIT_OK
    if cmd == "cross-ratio":
        pts = geo.parse_points(text)
        if len(pts) != 4:
            raise ValueError("cross-ratio needs exactly four points")
        print(geo.cross_ratio(*pts), file=out)
        return EXIT_OK
    raise ValueError(f"unknown command {cmd}")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = build_config(argv)
    except (ValueError, OSError) as exc:
        print(f"realqe: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return run(cfg)
    except (qe.BranchBudgetExceeded, ExpansionBudgetExceeded) as exc:
        print(f"realqe: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except fm.ParseError as exc:
        print(f"realqe: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError, KeyError) as exc:
        print(f"realqe: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
