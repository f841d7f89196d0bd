"""Command-line interface: generate / analyze / simulate / verify."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import birthdeath, geometric, harness, hitting, levelset, montecarlo, spectral
from .chain import load_chain, make_subset, save_chain
from .config import DEFAULT, with_enum_cap
from .generators import FAMILIES, FamilySpec, from_spec


def _parse_params(text: str | None) -> dict:
    """Parse 'k=v,k2=[1,2]' comma lists; commas inside brackets bind tighter."""
    out: dict = {}
    if not text:
        return out
    pieces, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            pieces.append("".join(cur))
            cur = []
            continue
        depth += ch in "[{("
        depth -= ch in "]})"
        cur.append(ch)
    if cur:
        pieces.append("".join(cur))
    for piece in pieces:
        k, _, v = piece.partition("=")
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _mask_from_hex(c, text: str):
    bm = int(text, 16)
    return make_subset(c, [i for i in range(c.n) if bm >> i & 1])


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_generate(args, config) -> int:
    spec = FamilySpec(family=args.family, params=_parse_params(args.params),
                      seed=args.seed)
    chain = from_spec(spec)
    save_chain(chain, args.out)
    print(f"wrote {args.out}: n={chain.n}, reversible={chain.reversible}")
    return 0


def cmd_analyze(args, config) -> int:
    c = load_chain(args.chain, config=config)
    if args.profile:
        prof = {
            "lambda": spectral.spectral_profile,
            "lambdahat": spectral.spectral_profile_hat,
            "phi": spectral.isoperimetric_profile,
        }[args.profile](c, config=config)
        if args.grid and args.grid != "auto":
            deltas = [float(x) for x in args.grid.split(",")]
        else:
            deltas = prof.breakpoints.tolist()
        lines = ["delta,value,witness"]
        for d in deltas:
            lines.append(f"{_fmt(d)},{_fmt(prof.value_at(d))},"
                         f"{prof.witness_at(d):#x}")
        _write(args.out, "\n".join(lines) + "\n")
        return 0
    q = args.quantity
    if q == "thpi":
        res = hitting.t_H_pi(c, config=config)
        doc = {"quantity": "thpi", "value": res.value, "exact": res.exact,
               "witness": hex(res.argmax.bitmask)}
    elif q == "kappa":
        prof = hitting.kappa_profile(c, config=config)
        delta = args.delta if args.delta is not None else 0.5
        doc = {"quantity": "kappa", "delta": delta,
               "value": prof.value_at(delta),
               "witness": hex(prof.witness_at(delta))}
    elif q == "exit":
        B = _mask_from_hex(c, args.set)
        doc = {"quantity": "exit", "set": args.set,
               "value": hitting.stationary_exit(c, B)}
    elif q == "relgeom":
        delta = args.delta if args.delta is not None else 1.0 / np.e
        doc = {"quantity": "relgeom", "delta": delta,
               "value": geometric.rel_geom(c, delta, config=config)}
    elif q == "levelset":
        B = _mask_from_hex(c, args.set)
        scan = levelset.find_L(c, B, config=config)
        doc = {"quantity": "levelset", "set": args.set, "L": scan.L,
               "U_at_L": scan.U_at_L, "m1": scan.m1, "m2": scan.m2,
               "atom_exact": scan.atom_exact,
               "level_set": hex(scan.level_set.bitmask),
               "levels": scan.levels.tolist(),
               "intervals": [
                   {"lo": iv.lo, "hi": iv.hi, "K": iv.K, "root": iv.root,
                    "accepted": iv.accepted} for iv in scan.intervals]}
    elif q == "bd":
        stats = birthdeath.bd_statistics(c)
        doc = {"quantity": "bd", "x_delta": stats.x_delta,
               "y_delta": stats.y_delta, "t_star": stats.t_star,
               "prefix_max": stats.prefix_max,
               "prefix_argmax": stats.prefix_argmax,
               "suffix_max": stats.suffix_max,
               "suffix_argmax": stats.suffix_argmax}
    elif q == "trel":
        doc = {"quantity": "trel", "value": spectral.relaxation_time(c)}
    else:
        print(f"unknown quantity {q!r}", file=sys.stderr)
        return 2
    _write(args.out, json.dumps(doc, indent=1) + "\n")
    return 0


def cmd_simulate(args, config) -> int:
    c = load_chain(args.chain, config=config)
    if args.op == "hitting":
        A = _mask_from_hex(c, args.set)
        start = np.full(c.n, 1.0 / c.n)
        if args.start is not None:
            start = np.zeros(c.n)
            start[args.start] = 1.0
        est = montecarlo.simulate_hitting(c, start, A, args.trials, args.seed,
                                          config=config)
        doc = {"op": "hitting", "mean": est.mean, "stderr": est.stderr,
               "trials": est.trials, "seed": est.seed, "capped": est.capped}
    elif args.op == "geomstep":
        freq = montecarlo.simulate_geometric_step(
            c, args.t, args.start or 0, args.trials, args.seed)
        doc = {"op": "geomstep", "t": args.t, "start": args.start or 0,
               "frequencies": freq.tolist(), "trials": args.trials,
               "seed": args.seed}
    elif args.op == "qsdecay":
        B = _mask_from_hex(c, args.set)
        dec = montecarlo.simulate_qs_decay(c, B, args.trials, args.seed,
                                           kmax=args.kmax)
        doc = {"op": "qsdecay", "rate": dec.rate,
               "survival": dec.survival.tolist(), "trials": dec.trials,
               "seed": dec.seed}
    else:
        print(f"unknown op {args.op!r}", file=sys.stderr)
        return 2
    _write(args.out, json.dumps(doc, indent=1) + "\n")
    return 0


def cmd_verify(args, config) -> int:
    options = _parse_params(args.options)
    report = harness.run_suite(args.suite, options=options, config=config,
                               threads=args.threads)
    text = harness.report_emit(report, fmt=args.format)
    _write(args.out, text)
    failed = report.n_failed
    print(f"suite {args.suite}: {len(report.records)} records, "
          f"{failed} failed", file=sys.stderr)
    return 1 if failed else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="spechit",
        description="Spectral and hitting-time analysis of finite Markov chains")
    ap.add_argument("--enum-cap", type=int, default=None,
                    help="override the exhaustive-enumeration cap")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a family chain to JSON")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--params", default="", help="comma list k=v")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    a = sub.add_parser("analyze", help="compute a quantity or profile")
    a.add_argument("--chain", required=True)
    a.add_argument("--profile", choices=["lambda", "lambdahat", "phi"])
    a.add_argument("--grid", default="auto", help="'auto' or comma list")
    a.add_argument("--quantity",
                   choices=["thpi", "kappa", "exit", "relgeom", "levelset",
                            "bd", "trel"])
    a.add_argument("--set", help="hex bitmask of the subset")
    a.add_argument("--delta", type=float, default=None)
    a.add_argument("--out", default="-")
    a.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("simulate", help="Monte-Carlo oracles")
    s.add_argument("--chain", required=True)
    s.add_argument("--op", required=True,
                   choices=["hitting", "geomstep", "qsdecay"])
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--set", help="hex bitmask of the subset")
    s.add_argument("--start", type=int, default=None)
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--kmax", type=int, default=40)
    s.add_argument("--out", default="-")
    s.set_defaults(fn=cmd_simulate)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=sorted(harness.SUITES))
    v.add_argument("--options", default="", help="comma list k=v")
    v.add_argument("--format", default="json", choices=["json", "csv"])
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out", default="-")
    v.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    config = DEFAULT if args.enum_cap is None else with_enum_cap(args.enum_cap)
    return args.fn(args, config)


if __name__ == "__main__":
    raise SystemExit(main())
