"""Command-line front end.

Exit codes: 0 success, 64 usage error, 65 domain error (disconnected graph,
invalid covariance, ...), 66 unreadable or malformed input file.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import _accel
from .control import ControllableSet, optimize, optimize_penalized
from .errors import DomainError, GridLossError
from .graph import (
    EdgePerturbation,
    build_laplacian,
    effective_resistance,
    perturb_edge,
    total_effective_resistance,
)
from .io import FileFormatError, csv_text, dumps, load_covariance, load_graph, load_penalty, load_profile
from .loss import ControlVector, expected_loss
from .montecarlo import estimate_expected_loss
from .placement import average_loss_k, scaling_curve

EX_OK = 0
EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    graph_path: str
    covariance_path: str | None
    mu_path: str | None
    fmt: str
    seed: int
    threads: int | None


def _node_list(text: str, base: int, n: int) -> list[int]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("--nodes needs at least one node index")
    try:
        nodes = [int(p) - base for p in parts]
    except ValueError:
        raise UsageError(f"--nodes expects comma-separated integers, got {text!r}") from None
    bad = [v + base for v in nodes if not 0 <= v < n]
    if bad:
        raise UsageError(f"--nodes indices out of range: {bad}")
    if len(set(nodes)) != len(nodes):
        raise UsageError("--nodes contains duplicates")
    return nodes


def _k_list(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"--k expects 'a..b' or a comma list, got {text!r}") from None


def _emit(out, fmt: str, payload: dict, header=None, rows=None) -> None:
    if fmt == "csv":
        if header is None:
            header = ["key", "value"]
            rows = [[k, v] for k, v in payload.items() if not isinstance(v, (list, dict))]
        out.write(csv_text(header, rows))
    else:
        out.write(dumps(payload))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gridloss", description="Expected transport losses under affine load sharing.")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $GRIDLOSS_THREADS)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, cov=True):
        sp.add_argument("--graph", required=True)
        if cov:
            sp.add_argument("--cov", required=True)
            sp.add_argument("--mu", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("pseudoinverse", help="Laplacian pseudoinverse of a graph")
    common(sp, cov=False)

    sp = sub.add_parser("resistance", help="effective resistance of a pair, or the total")
    common(sp, cov=False)
    sp.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"))

    sp = sub.add_parser("expected-loss", help="expected loss of a load-sharing vector")
    common(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--nodes", help="equal sharing over these nodes")
    g.add_argument("--alpha", help="comma-separated full load-sharing vector")

    sp = sub.add_parser("optimize", help="optimal load-sharing vector")
    common(sp)
    sp.add_argument("--nodes", help="controllable nodes (default: all)")
    sp.add_argument("--penalty", help="penalty JSON file")
    sp.add_argument("--xi", type=float, default=None)

    sp = sub.add_parser("average-k", help="placement-averaged loss H_k")
    common(sp)
    sp.add_argument("--k", required=True, help="'a..b' or comma list")

    sp = sub.add_parser("scaling-curve", help="ratios H_k / H_1")
    common(sp)
    sp.add_argument("--k-max", type=int, default=None)

    sp = sub.add_parser("simulate", help="Monte Carlo estimate of the expected loss")
    common(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--nodes")
    g.add_argument("--alpha")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("perturb-edge", help="add weight to an edge via a rank-one update")
    common(sp, cov=False)
    sp.add_argument("--edge", nargs=2, type=int, required=True, metavar=("I", "J"))
    sp.add_argument("--beta", type=float, required=True)
    return p


def _control(args, base: int, n: int) -> ControlVector:
    if getattr(args, "alpha", None):
        try:
            a = np.array([float(x) for x in args.alpha.split(",")])
        except ValueError:
            raise UsageError("--alpha expects comma-separated numbers") from None
        if a.size != n:
            raise UsageError(f"--alpha has {a.size} entries, graph has {n} nodes")
        return ControlVector.from_array(a)
    if getattr(args, "nodes", None) is not None:
        return ControlVector.equal_share(n, _node_list(args.nodes, base, n))
    return ControlVector.uniform(n)


def _config(args) -> RunConfig:
    return RunConfig(
        graph_path=args.graph,
        covariance_path=getattr(args, "cov", None),
        mu_path=getattr(args, "mu", None),
        fmt=args.format,
        seed=getattr(args, "seed", 0),
        threads=args.threads,
    )


def _dispatch(args, out) -> None:
    cfg = _config(args)
    g, base = load_graph(cfg.graph_path)
    lp = build_laplacian(g)
    n = g.n
    cov = load_covariance(cfg.covariance_path, n) if cfg.covariance_path else None
    mu = load_profile(cfg.mu_path, n) if cfg.mu_path else None
    fmt = cfg.fmt
    cmd = args.command

    if cmd == "pseudoinverse":
        payload = {
            "n": n,
            "trace": float(np.trace(lp.Lplus)),
            "total_effective_resistance": total_effective_resistance(lp),
            "lplus": lp.Lplus.tolist(),
        }
        if fmt == "csv":
            _emit(out, fmt, payload, [f"c{j}" for j in range(n)], lp.Lplus.tolist())
        else:
            _emit(out, fmt, payload)

    elif cmd == "resistance":
        if args.pair:
            i, j = (v - base for v in args.pair)
            if not (0 <= i < n and 0 <= j < n):
                raise UsageError(f"--pair indices out of range for n={n}")
            payload = {"i": args.pair[0], "j": args.pair[1], "resistance": effective_resistance(lp, i, j)}
        else:
            payload = {"total_effective_resistance": total_effective_resistance(lp)}
        _emit(out, fmt, payload)

    elif cmd == "expected-loss":
        alpha = _control(args, base, n)
        _emit(out, fmt, expected_loss(lp, cov, mu, alpha).to_dict())

    elif cmd == "optimize":
        B = ControllableSet.full(n)
        if args.nodes is not None:
            B = ControllableSet(tuple(_node_list(args.nodes, base, n)), n)
        if args.penalty:
            res = optimize_penalized(lp, cov, load_penalty(args.penalty, n, args.xi), B)
        else:
            if args.xi is not None:
                raise UsageError("--xi requires --penalty")
            res = optimize(lp, cov, B)
        payload = res.to_dict()
        payload["support"] = [v + base for v in payload["support"]]
        if fmt == "csv":
            _emit(out, fmt, payload, ["node", "alpha"],
                  [[v + base, a] for v, a in enumerate(payload["alpha"])])
        else:
            _emit(out, fmt, payload)

    elif cmd == "average-k":
        ks = _k_list(args.k)
        if not ks or any(not 1 <= k <= n for k in ks):
            raise UsageError(f"--k values must lie in [1, {n}]")
        avgs = [average_loss_k(lp, cov, k) for k in ks]
        if fmt == "csv":
            _emit(out, fmt, {}, ["k", "closed_form", "enumerated"],
                  [[a.k, a.closed_form, a.enumerated] for a in avgs])
        else:
            C1, C2 = avgs[0].C1, avgs[0].C2
            _emit(out, fmt, {
                "C1": C1,
                "C2": C2,
                "rows": [{"k": a.k, "closed_form": a.closed_form, "enumerated": a.enumerated} for a in avgs],
            })

    elif cmd == "scaling-curve":
        k_max = n if args.k_max is None else args.k_max
        if not 1 <= k_max <= n:
            raise UsageError(f"--k-max must lie in [1, {n}]")
        curve = scaling_curve(lp, cov, k_max)
        if fmt == "csv":
            _emit(out, fmt, {}, ["k", "ratio"], [list(r) for r in curve.ratios])
        else:
            _emit(out, fmt, curve.to_dict())

    elif cmd == "simulate":
        if args.samples < 2:
            raise UsageError("--samples must be at least 2")
        alpha = _control(args, base, n)
        est = estimate_expected_loss(lp, cov, mu, alpha, cfg.seed, args.samples, cfg.threads)
        payload = est.to_dict()
        payload["analytic"] = expected_loss(lp, cov, mu, alpha).to_dict()
        _emit(out, fmt, payload)

    elif cmd == "perturb-edge":
        i, j = (v - base for v in args.edge)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise UsageError("--edge needs two distinct in-range nodes")
        if not args.beta > 0:
            raise UsageError("--beta must be positive")
        new = perturb_edge(lp, EdgePerturbation(i, j, args.beta))
        payload = {
            "edge": list(args.edge),
            "beta": args.beta,
            "trace_before": float(np.trace(lp.Lplus)),
            "trace_after": float(np.trace(new.Lplus)),
            "total_effective_resistance_before": total_effective_resistance(lp),
            "total_effective_resistance_after": total_effective_resistance(new),
            "lplus": new.Lplus.tolist(),
        }
        _emit(out, fmt, payload)


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        threads = args.threads if args.threads is not None else _accel.threads_from_env()
        args.threads = threads
        _accel.set_threads(threads)
        _dispatch(args, out)
    except UsageError as exc:
        err.write(f"gridloss: usage error: {exc}\n")
        return EX_USAGE
    except FileFormatError as exc:
        err.write(f"gridloss: {exc}\n")
        return EX_NOINPUT
    except DomainError as exc:
        err.write(f"gridloss: {type(exc).__name__}: {exc}\n")
        return EX_DATAERR
    except GridLossError as exc:
        err.write(f"gridloss: {type(exc).__name__}: {exc}\n")
        return EX_DATAERR
    return EX_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
