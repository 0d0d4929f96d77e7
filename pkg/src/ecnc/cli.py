"""Command-line front end.

Every output starts with one ``#`` metadata line carrying the package
version, the master seed and a digest of the parameters.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import optimize_degree, rate_report
from .codes import construct_disjoint, construct_ec, construct_h2t, construct_rac
from .compare import CodeFactory, compare_codes
from .errors import GenerationError, ParameterError, ParseError
from .graphs import RegularGraph, random_regular_graph
from .netsim import (LineNetworkConfig, estimate_rank_distribution, optimize_budget, run_trials,
                     write_metrics_csv)
from .rank_model import RankDistribution, read_rank_distributions, sample_rank_distribution

log = logging.getLogger("ecnc")


def header(args, seed) -> str:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "summary", "log", "workers", "verbose")}
    digest = hashlib.sha256(json.dumps(params, sort_keys=True, default=str).encode()).hexdigest()[:12]
    return f"# ecnc {__version__} seed={seed} config={digest}"


@contextmanager
def output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def need_seed(args):
    if args.seed is None:
        raise ParameterError(f"'{args.command}' draws random numbers; pass --seed")
    return np.random.default_rng(args.seed)


def load_rank_dists(source: str) -> list[RankDistribution]:
    p = Path(source)
    if p.exists():
        return read_rank_distributions(p.read_text())
    return [RankDistribution.from_line(source.replace(",", " "))]


def network_config(args) -> LineNetworkConfig:
    cfg = LineNetworkConfig.from_file(args.config) if getattr(args, "config", None) else LineNetworkConfig()
    overrides = {"length": args.len, "eps": args.eps, "mbar": args.mbar, "scheduler": args.scheduler,
                 "q": args.q, "m": args.m, "seed": args.seed}
    return cfg.replace(**{k: v for k, v in overrides.items() if v is not None})


def code_param(args) -> int:
    if args.code == "ec":
        if args.d is None:
            raise ParameterError("EC codes need --d")
        return args.d
    if args.code == "h2t":
        return args.overlap
    if args.code == "rac":
        return args.annex
    return 0


def check_code_params(kind, n, m, param):
    if n is None or n < 1:
        raise ParameterError("--n must be a positive chunk count")
    if kind == "ec":
        if not 3 <= param <= m:
            raise ParameterError(f"EC degree must satisfy 3 <= d <= m, got d={param}, m={m}")
        if (n * param) % 2 or param >= n:
            raise ParameterError(f"no {param}-regular graph on {n} nodes")
    elif kind in ("h2t", "rac") and not 0 <= param < m:
        raise ParameterError(f"{kind} parameter must be in 0..{m - 1}, got {param}")


# commands


def cmd_analyze(args):
    q, m = args.q, args.m
    groups = []            # (label, ratio, [dists])
    if args.rank_dist:
        groups.append(("given", None, load_rank_dists(args.rank_dist)))
    elif args.sweep:
        rng = need_seed(args)
        for ratio in args.sweep:
            groups.append((f"tbar/m={ratio}", ratio,
                           [sample_rank_distribution(ratio * m, m, rng) for _ in range(args.samples)]))
    elif args.len is not None:
        rng = need_seed(args)
        cfg = network_config(args)
        dist, _ = estimate_rank_distribution(cfg, args.trials, rng)
        groups.append((f"line len={cfg.length} eps={cfg.eps} mbar={cfg.mbar}", None, [dist]))
    else:
        raise ParameterError("analyze needs --rank-dist, --sweep or a network (--len)")
    degrees = [args.d] if args.d is not None else None

    cols = ["group", "dist", "m", "d", "q", "alpha_star", "tau", "lam", "rate", "upper_bound", "best"]
    summary = []
    with output(args.out) as fh:
        fh.write(header(args, args.seed) + "\n")
        w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for label, ratio, dists in groups:
            best_rates = []
            for i, t in enumerate(dists):
                ds = degrees or range(3, t.m + 1)
                best_d, best = optimize_degree(t, q, ds)
                best_rates.append(best.rate)
                for d in ds:
                    rep = best if d == best_d else rate_report(t, d, q)
                    w.writerow({**rep.as_row(), "group": label, "dist": i, "best": int(d == best_d)})
            summary.append({"group": label, "samples": len(dists), "min": min(best_rates),
                            "avg": float(np.mean(best_rates)), "max": max(best_rates),
                            "upper_bound": ratio if ratio is not None else dists[0].mean() / dists[0].m})
    if args.sweep or args.summary:
        with (open(args.summary, "w", newline="") if args.summary else _stderr()) as fh:
            w = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(summary)
    return summary


@contextmanager
def _stderr():
    yield sys.stderr


def build_code(args, rng):
    m = args.m
    if args.code == "ec":
        if args.graph:
            g = RegularGraph.from_text(Path(args.graph).read_text())
        else:
            check_code_params("ec", args.n, m, code_param(args))
            g = random_regular_graph(args.n, args.d, rng)
        return construct_ec(g, m)
    if args.code == "disjoint":
        k = args.k if args.k is not None else (args.n or 0) * m
        return construct_disjoint(k, m)
    check_code_params(args.code, args.n, m, code_param(args))
    if args.code == "h2t":
        return construct_h2t(args.n, m, args.overlap)
    return construct_rac(args.n, m - args.annex, args.annex, rng)


def cmd_construct(args):
    random_kind = args.code == "rac" or (args.code == "ec" and not args.graph)
    rng = need_seed(args) if random_kind else np.random.default_rng(0)
    code = build_code(args, rng)
    with output(args.out) as fh:
        fh.write(code.to_text(header(args, args.seed)))
    return code


def cmd_simulate(args):
    cfg = network_config(args)
    param = code_param(args)
    check_code_params(args.code, args.n, cfg.m, param)
    need_seed(args)
    rows = run_trials(CodeFactory(args.code, args.n, cfg.m, param), cfg, args.trials, args.seed,
                      args.workers, args.payload)
    with output(args.out) as fh:
        write_metrics_csv(rows, fh, header(args, args.seed))
    return rows


def cmd_compare(args):
    cfg = network_config(args)
    kinds = args.codes
    for kind in kinds:
        if kind not in ("ec", "disjoint", "h2t", "rac"):
            raise ParameterError(f"unknown code kind {kind!r}")
    if args.n is None or args.n < 2:
        raise ParameterError("--n must be at least 2")
    rng = need_seed(args)
    if args.mbar is None:
        scan = optimize_budget(cfg, np.arange(cfg.m, 2 * cfg.m + 0.25, 0.5), args.budget_trials, rng)
        log.info("budget scan: mbar=%.1f tbar/mbar=%.4f", scan.mbar, scan.bound)
        cfg = cfg.replace(mbar=scan.mbar)
        dist = scan.dist
    else:
        dist, _ = estimate_rank_distribution(cfg, args.budget_trials, rng)
    res = compare_codes(cfg, args.n, args.trials, args.seed, dist, kinds, args.grid_trials,
                        workers=args.workers)
    with output(args.out) as fh:
        fh.write(header(args, args.seed) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "param", "trial", "decodable"])
        for kind, r in res.items():
            for row in sorted(r["rows"], key=lambda x: (x["decoded_packets"], x["trial"])):
                w.writerow([kind, r["param"], row["trial"], row["decoded_packets"]])
    return res


def cmd_sample_ranks(args):
    rng = need_seed(args)
    if (args.tbar is None) == (args.ratio is None):
        raise ParameterError("pass exactly one of --tbar or --ratio")
    tbar = args.tbar if args.tbar is not None else args.ratio * args.m
    dists = [sample_rank_distribution(tbar, args.m, rng) for _ in range(args.count)]
    with output(args.out) as fh:
        fh.write(header(args, args.seed) + "\n")
        for t in dists:
            fh.write(t.to_line() + "\n")
    return dists


# parser


def _csv_floats(s):
    return [float(x) for x in s.split(",") if x]


def _csv_words(s):
    return [x.strip() for x in s.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecnc", description="Expander chunked codes workbench")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, network=False):
        sp.add_argument("--m", type=int, default=16, help="chunk size")
        sp.add_argument("--q", type=int, default=256, help="field size (power of two)")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--out", help="output path (default stdout)")
        if network:
            sp.add_argument("--len", type=int, help="number of links")
            sp.add_argument("--eps", type=float, help="per-link loss probability")
            sp.add_argument("--mbar", type=float, help="mean packets sent per chunk per node")
            sp.add_argument("--scheduler", choices=["fixed", "randomized"])
            sp.add_argument("--config", help="JSON file with line-network settings")
            sp.add_argument("--workers", type=int, default=1)

    def code_flags(sp):
        sp.add_argument("--code", choices=["ec", "disjoint", "h2t", "rac"], default="ec")
        sp.add_argument("--n", type=int, help="number of chunks")
        sp.add_argument("--d", type=int, help="EC generator degree")
        sp.add_argument("--overlap", type=int, default=0, help="H2T overlap")
        sp.add_argument("--annex", type=int, default=0, help="RAC annex size")

    a = sub.add_parser("analyze", help="rate bounds for rank distributions")
    common(a, network=True)
    a.add_argument("--rank-dist", help="file of distributions, or one inline 'm p0 .. pm'")
    a.add_argument("--sweep", type=_csv_floats, help="comma list of tbar/m ratios to sample")
    a.add_argument("--samples", type=int, default=10)
    a.add_argument("--d", type=int, help="only this degree (default: scan 3..m)")
    a.add_argument("--trials", type=int, default=10000, help="chunk transfers for estimation")
    a.add_argument("--summary", help="where to write the min/avg/max summary")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("construct", help="build a chunked code")
    common(c)
    code_flags(c)
    c.add_argument("--graph", help="generator graph file for EC codes")
    c.add_argument("--k", type=int, help="input packets (disjoint codes)")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("simulate", help="end-to-end line-network runs")
    common(s, network=True)
    code_flags(s)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--payload", type=int, default=0, help="payload symbols per packet (0: rank only)")
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("compare", help="EC against H2T/RAC on a line network")
    common(k, network=True)
    k.add_argument("--codes", type=_csv_words, default=["ec", "h2t", "rac"])
    k.add_argument("--n", type=int, default=500)
    k.add_argument("--trials", type=int, default=100)
    k.add_argument("--grid-trials", type=int, default=50)
    k.add_argument("--budget-trials", type=int, default=2000)
    k.add_argument("--log", help="write grid-search log here")
    k.set_defaults(func=cmd_compare)

    r = sub.add_parser("sample-ranks", help="random rank distributions with a given mean")
    common(r)
    r.add_argument("--tbar", type=float)
    r.add_argument("--ratio", type=float, help="tbar / m")
    r.add_argument("--count", type=int, default=10)
    r.set_defaults(func=cmd_sample_ranks)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = [logging.StreamHandler(sys.stderr)]
    if getattr(args, "log", None):
        handlers.append(logging.FileHandler(args.log, mode="w"))
    logging.basicConfig(level=logging.INFO if args.verbose or getattr(args, "log", None) else logging.WARNING,
                        format="%(name)s: %(message)s", handlers=handlers, force=True)
    try:
        args.func(args)
    except (ParameterError, ParseError, GenerationError, OSError) as exc:
        print(f"ecnc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
