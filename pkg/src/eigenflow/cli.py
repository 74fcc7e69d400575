"""Command-line front door for the eigencurve pipeline.

Subcommands mirror the analysis workflow: trace -> analyze -> infer, with
touch / extend for the interactive refinement loop, export for plot data,
and serve for the HTTP API the viewer talks to.

Exit codes: 0 success, 2 contradictory touch row, 1 any other error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import session as ses
from .decomposition import TouchError
from .tracker import ZNNConfig

__all__ = ["main", "build_parser"]


def _session_path(arg: str) -> str:
    if os.path.dirname(arg):
        return arg
    return os.path.join(ses.session_dir(), arg)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eigenflow",
        description="Trace eigencurves of 1-parameter matrix flows, detect "
                    "crossings, and infer block-diagonal structure.")
    sub = p.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="trace eigencurves and start a session")
    tr.add_argument("--flow", required=True, help="gallery flow name")
    tr.add_argument("--seed", type=int, default=None,
                    help="obscure the flow with this similarity seed")
    tr.add_argument("--n", type=int, default=None,
                    help="dimension for parameterized flows")
    tr.add_argument("--t0", type=float, required=True)
    tr.add_argument("--tf", type=float, required=True)
    tr.add_argument("--tau", type=float, default=1e-3, help="sampling gap")
    tr.add_argument("--eta", type=float, default=50.0, help="ZNN decay constant")
    tr.add_argument("--formula", type=int, nargs=2, default=(3, 5),
                    metavar=("J", "S"), help="look-ahead formula signature")
    tr.add_argument("--method", choices=("znn", "oracle"), default="znn")
    tr.add_argument("--session", required=True, help="session file to write")

    an = sub.add_parser("analyze", help="detect crossings and near approaches")
    an.add_argument("--session", required=True)

    inf = sub.add_parser("infer", help="infer the block label vector ve")
    inf.add_argument("--session", required=True)

    to = sub.add_parser("touch", help="apply almost-touch pairs and re-infer")
    to.add_argument("--session", required=True)
    to.add_argument("--pairs", help="file of touch rows 'a b' per line")
    to.add_argument("--pair", type=int, nargs=2, action="append",
                    metavar=("A", "B"), help="one touch pair (repeatable)")

    ex = sub.add_parser("extend", help="enlarge the time interval and re-run")
    ex.add_argument("--session", required=True)
    ex.add_argument("--t0", type=float, required=True)
    ex.add_argument("--tf", type=float, required=True)

    xp = sub.add_parser("export", help="write trace CSVs and plot-data JSON")
    xp.add_argument("--session", required=True)
    xp.add_argument("--outdir", required=True)

    sv = sub.add_parser("serve", help="serve the HTTP API for a session")
    sv.add_argument("--session", required=True)
    sv.add_argument("--port", type=int, default=8571)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--ui-dir", default=None,
                    help="static directory for the viewer (optional)")
    return p


def _read_pairs(args) -> list:
    pairs = []
    if args.pairs:
        with open(args.pairs, encoding="utf-8") as f:
            for line in f:
                line = line.replace(",", " ").strip()
                if not line or line.startswith("#"):
                    continue
                a, b = line.split()[:2]
                pairs.append([int(a), int(b)])
    for pr in args.pair or []:
        pairs.append([int(pr[0]), int(pr[1])])
    return pairs


def _print_summary(s: ses.Session) -> None:
    t0, tf = s.interval
    print(f"flow {s.flow_ref['name']} seed={s.flow_ref.get('seed')} "
          f"interval [{t0:g}, {tf:g}] method={s.method}")
    if s.traces:
        deg = [tr.curve_index for tr in s.traces if tr.degenerate]
        nres = sum(len(tr.restarts) for tr in s.traces)
        print(f"traces: {len(s.traces)} curves x {len(s.traces[0])} samples, "
              f"{nres} restarts" + (f", degenerate: {deg}" if deg else ""))
        for tr in s.traces:
            for note in tr.notes:
                if "collapsed" in note or "restarts exceed" in note:
                    print(f"  curve {tr.curve_index}: WARNING {note}")
    if s.crossings is not None:
        print(f"crossings: {len(s.crossings)} events, "
              f"{len(s.crossings.pairs())} pairs")
    if s.rc:
        crossing_pairs = s.crossings.pairs() if s.crossings is not None else set()
        close = [v for v in s.rc.values()
                 if v.bucket is not None and v.bucket <= 1e-2
                 and (v.i, v.j) not in crossing_pairs]
        for v in sorted(close, key=lambda v: v.d_min)[:6]:
            print(f"  near approach ({v.i},{v.j}): d_min={v.d_min:.4g} "
                  f"at t={v.t_min:.4f} [bucket {v.bucket:g}]")
    if s.ve is not None:
        print(f"ve = ({', '.join(str(int(v)) for v in s.ve)})")
        sizes = list(s.blocks.sizes)
        print(f"blocks: {s.blocks.count} groups, sizes {sizes}")
        if s.crossings is not None and len(s.crossings) == 0:
            print("note: no crossings were observed; distinct labels are an "
                  "upper bound only and may indicate diagonalability in error")
    for note in s.notices:
        print(f"note: {note}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except TouchError as e:
        print(f"touch error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "trace":
        cfg = ZNNConfig(tau=args.tau, eta=args.eta,
                        formula=(args.formula[0], args.formula[1]))
        s = ses.new_session(args.flow, args.seed, args.t0, args.tf,
                            cfg=cfg, method=args.method, n=args.n)
        ses.run_trace(s)
        ses.save(s, _session_path(args.session))
        _print_summary(s)
        return 0

    path = _session_path(args.session)
    if args.command == "analyze":
        s = ses.load(path)
        ses.run_analyze(s)
        ses.save(s, path)
        _print_summary(s)
        return 0

    if args.command == "infer":
        s = ses.load(path)
        ses.run_infer(s)
        ses.save(s, path)
        _print_summary(s)
        return 0

    if args.command == "touch":
        s = ses.load(path)
        pairs = _read_pairs(args)
        ses.set_touch(s, pairs)        # raises TouchError -> exit 2
        ses.save(s, path)
        _print_summary(s)
        return 0

    if args.command == "extend":
        s = ses.load(path)
        out = ses.extend_interval(s, args.t0, args.tf)
        ses.save(out, path)
        _print_summary(out)
        return 0

    if args.command == "export":
        s = ses.load(path)
        paths = ses.export_traces_csv(s, args.outdir)
        pd = ses.plot_data(s)
        pj = os.path.join(args.outdir, "plot_data.json")
        with open(pj, "w", encoding="utf-8") as f:
            json.dump(pd, f)
        print(f"wrote {len(paths)} curve CSVs and {pj}")
        return 0

    if args.command == "serve":
        from .service import serve
        serve(path, host=args.host, port=args.port, ui_dir=args.ui_dir)
        return 0

    raise ValueError(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
