"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 unrecoverable, 4 invariant mismatch.
"""

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from . import planner, store
from .layout import STRATEGIES, PlanError, build_plan
from .mds import CodeParams, ErasureError

EXIT_USAGE, EXIT_IO, EXIT_UNRECOVERABLE, EXIT_MISMATCH = 1, 2, 3, 4

CSV_COLUMNS = ["code", "instances", "fault_tolerance", "gamma", "gamma_decimal",
               "avg_repair_complexity", "encoding_complexity"]
BENCH_COLUMNS = ["r", "t", "gamma_new", "gamma_new_decimal", "sqrt_bound", "envelope_high"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def fmt_rate(q) -> str:
    return f"{q.numerator}/{q.denominator} ({float(q):.4f})"


def _resolve(k, r, t, strategy):
    try:
        params = CodeParams(k, r)
        grouping = planner.default_grouping(k, r, t)
        plan = build_plan(params, grouping, strategy)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return params, grouping, plan


def cmd_plan(args, out):
    params, grouping, _ = _resolve(args.k, args.r, args.t, args.strategy)
    k, r = params.k, params.r
    print(f"k={k} r={r}", file=out)
    if r == 1:
        print("plain MDS: r=1 leaves no parity row for piggybacks", file=out)
        print("gamma_systematic=1/1 (1.0000)", file=out)
        return 0
    base = planner.average_bandwidth(k, r, grouping)
    even = planner.average_bandwidth(k, r, grouping, "even")
    print(f"t={grouping.t} sizes={','.join(map(str, grouping.sizes))}", file=out)
    for l, g in enumerate(grouping.groups, 1):
        print(f"group {l} nodes {g.start}-{g.stop - 1}: baseline {base.per_node[g.start - 1]} cells, "
              f"even {even.per_node[g.start - 1]} cells", file=out)
    print(f"gamma_systematic={fmt_rate(base.gamma_systematic)}", file=out)
    print(f"gamma_all={fmt_rate(base.gamma_all)}", file=out)
    print(f"gamma_systematic_even={fmt_rate(even.gamma_systematic)}", file=out)
    print(f"sqrt_bound={math.sqrt(2 * r - 1) / r:.4f}", file=out)
    if k <= planner.BRUTE_FORCE_MAX_K and r <= planner.BRUTE_FORCE_MAX_R:
        best, total = planner.brute_force_optimum(k, r)
        print(f"brute_force sizes={','.join(map(str, best.sizes))} total={total} "
              f"gamma={fmt_rate(planner.average_bandwidth(k, r, best).gamma_systematic)}", file=out)
    return 0


def cmd_encode(args, out):
    params, grouping, _ = _resolve(args.k, args.r, args.t, args.strategy)
    if args.out is None:
        raise UsageError("encode needs --out DIR")
    if args.block_size < 1:
        raise UsageError("--block-size must be >= 1")
    data = Path(args.file).read_bytes()
    m = store.ingest(data, args.out, params, grouping, args.strategy, args.block_size)
    print(f"{Path(args.out, store.MANIFEST)}: {m.stripes} stripes, k={m.k} r={m.r} "
          f"sizes={','.join(map(str, m.sizes))} strategy={m.strategy}", file=out)
    return 0


def cmd_repair(args, out):
    manifest = store.Manifest.load(args.dir)
    params, _, plan = manifest.codec_parts()
    report = store.repair_node_dir(args.dir, args.node, manifest)
    predicted = planner.plan_traffic(params.k, params.r, plan, args.node)
    measured = report.downloaded_cells
    per_stripe = measured // manifest.stripes if manifest.stripes else predicted
    print(f"node {args.node}: measured={per_stripe} predicted={predicted} per stripe", file=out)
    print(f"aggregate={measured} cells over {manifest.stripes} stripes "
          f"(mds={report.mds_phase} piggyback={report.piggyback_phase})", file=out)
    if measured != predicted * manifest.stripes:
        print("traffic does not match prediction", file=sys.stderr)
        return EXIT_MISMATCH
    return 0


def cmd_verify(args, out):
    status = store.verify(args.dir)
    for n, ok in status.items():
        print(f"node {n}: {'ok' if ok else 'FAIL'}", file=out)
    good = all(status.values())
    print("pass" if good else "fail", file=out)
    return 0 if good else EXIT_MISMATCH


def cmd_reassemble(args, out):
    if args.out is None:
        raise UsageError("reassemble needs --out FILE")
    data = store.reassemble(args.dir)
    Path(args.out).write_bytes(data)
    print(f"wrote {len(data)} bytes to {args.out}", file=out)
    return 0


def comparison_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        cplx = row.avg_repair_complexity
        w.writerow([
            row.code,
            "" if row.instances is None else row.instances,
            row.fault_tolerance,
            f"{row.gamma.numerator}/{row.gamma.denominator}",
            f"{float(row.gamma):.6f}",
            "" if cplx is None else (cplx if getattr(cplx, "denominator", 1) == 1 else f"{cplx.numerator}/{cplx.denominator}"),
            "" if row.encoding_complexity is None else row.encoding_complexity,
        ])
    return buf.getvalue()


def cmd_compare(args, out):
    try:
        rows, notices = planner.compare_codes(args.k, args.r, args.q, planner.default_grouping(args.k, args.r, args.t))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for n in notices:
        print(f"notice: {n}", file=sys.stderr)
    print(f"{'code':<5} {'inst':>4} {'ft':>3} {'gamma':>18}", file=out)
    for row in rows:
        inst = "-" if row.instances is None else row.instances
        print(f"{row.code:<5} {inst:>4} {row.fault_tolerance:>3} {fmt_rate(row.gamma):>18}", file=out)
    if args.out:
        Path(args.out).write_text(comparison_csv(rows))
    return 0


def bench_rows(r_min, r_max):
    for r in range(max(2, r_min), r_max + 1):
        t = planner.optimal_t(r)
        root = math.sqrt(2 * r - 1)
        lo, hi = max(1, math.floor(root)), min(r - 1, math.ceil(root))
        gamma = planner.rate_of_t(r, t)
        high = max(planner.rate_of_t(r, lo), planner.rate_of_t(r, hi))
        yield [r, t, f"{gamma.numerator}/{gamma.denominator}", f"{float(gamma):.6f}",
               f"{root / r:.6f}", f"{float(high):.6f}"]


def cmd_bench(args, out):
    if args.r_min > args.r_max:
        raise UsageError("--r-min must not exceed --r-max")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    w.writerows(bench_rows(args.r_min, args.r_max))
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return 0


def build_parser():
    p = _Parser(prog="piggyback", description="Piggybacked MDS storage codes")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def code_flags(sp, need_kr=True):
        sp.add_argument("-k", type=int, required=need_kr, help="systematic nodes")
        sp.add_argument("-r", type=int, required=need_kr, help="parity nodes")
        sp.add_argument("-t", type=int, default=None, help="groups (default: optimal for r)")
        sp.add_argument("--strategy", choices=STRATEGIES, default="even")

    sp = sub.add_parser("plan", help="choose t and report repair bandwidth")
    code_flags(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("encode", help="split a file into node shards")
    sp.add_argument("file")
    code_flags(sp)
    sp.add_argument("--block-size", type=int, default=store.DEFAULT_BLOCK_SIZE)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("repair", help="rebuild one node and report traffic")
    sp.add_argument("dir")
    sp.add_argument("node", type=int)
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("verify", help="check shard checksums")
    sp.add_argument("dir")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("reassemble", help="rebuild the original file")
    sp.add_argument("dir")
    sp.add_argument("--out", required=True, help="output file")
    sp.set_defaults(func=cmd_reassemble)

    sp = sub.add_parser("compare", help="compare MDS, RSR, MSR and the new code")
    code_flags(sp)
    sp.add_argument("-q", type=int, default=256, help="field size")
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("bench", help="sweep r and compare the rate with sqrt(2r-1)/r")
    sp.add_argument("--r-min", type=int, default=2)
    sp.add_argument("--r-max", type=int, default=50)
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, PlanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (store.Unrecoverable, ErasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNRECOVERABLE
    except store.StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
