"""Command-line front end: simulation sweeps, complexity reports, and
factor-graph inspection.

Every simulate run writes a manifest next to the results (config echo,
seed, version, timestamp, output paths); re-running the manifest's
flags reproduces the CSV byte-for-byte.  Exit codes: 0 success, 2
usage, 3 malformed code spec, 4 unknown decoder, 5 unwritable output,
6 sweep did not complete.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from .channel import (DECODER_KINDS, DecoderSpec, run_bler, write_csv,
                      write_report)
from .code import build_code
from .complexity import (analytic_reference_bars, boxplus_cost, cn_cost,
                         ml_cost, stopping_cost, vn_cost)
from .ffg import build_ffg, reduce_ffg

__all__ = ["main", "RunManifest", "EXIT_BAD_CODE", "EXIT_BAD_DECODER",
           "EXIT_UNWRITABLE", "EXIT_INCOMPLETE"]

EXIT_BAD_CODE = 3
EXIT_BAD_DECODER = 4
EXIT_UNWRITABLE = 5
EXIT_INCOMPLETE = 6


class CodeSpecError(ValueError):
    pass


@dataclass
class RunManifest:
    """Reproduction record; every results file points back to one."""

    command: str
    version: str
    timestamp: str
    master_seed: int
    config: dict
    outputs: list = field(default_factory=list)

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("autbp")
    except Exception:
        return "unknown"


def parse_code_spec(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise CodeSpecError(f"code spec must be 'r,m', got {text!r}")
    try:
        r, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise CodeSpecError(f"code spec must be integers 'r,m': {text!r}") \
            from exc
    try:
        return build_code(r, m)
    except ValueError as exc:
        raise CodeSpecError(str(exc)) from exc


def snr_grid(start: float, stop: float, step: float):
    """Inclusive grid; step 0 is allowed only when start == stop."""
    if stop < start:
        raise ValueError("snr-stop below snr-start")
    if step == 0:
        if start != stop:
            raise ValueError("snr-step 0 requires snr-start == snr-stop")
        return [start]
    if step < 0:
        raise ValueError("snr-step must be >= 0")
    pts = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        pts.append(round(v, 10))
        k += 1
    return pts


def _default_threads():
    env = os.environ.get("RM_AUTBP_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return None


def cmd_simulate(args) -> int:
    try:
        code = parse_code_spec(args.code)
    except CodeSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CODE
    if args.decoder not in DECODER_KINDS:
        print(f"error: unknown decoder {args.decoder!r} "
              f"(choose from {', '.join(DECODER_KINDS)})", file=sys.stderr)
        return EXIT_BAD_DECODER
    try:
        grid = snr_grid(args.snr_start, args.snr_stop, args.snr_step)
        spec = DecoderSpec(
            kind=args.decoder, ensemble=args.ensemble,
            perm_group=args.perm_group, max_iters=args.max_iters,
            stopping=(args.stopping == "on"), arithmetic=args.arithmetic)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_csv = args.out
    base, _ = os.path.splitext(out_csv)
    out_json = base + ".json"
    out_manifest = base + ".manifest.json"
    out_png = base + ".png"
    try:
        with open(out_csv, "w"):
            pass
    except OSError as exc:
        print(f"error: cannot write {out_csv}: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE

    outputs = [out_csv, out_json]
    if not args.no_plot:
        outputs.append(out_png)
    manifest = RunManifest(
        command="simulate", version=_version(),
        timestamp=datetime.now(timezone.utc).isoformat(),
        master_seed=args.seed,
        config={k: v for k, v in vars(args).items() if k != "func"},
        outputs=outputs)
    manifest.write(out_manifest)

    log = None if args.quiet else sys.stderr
    try:
        stats = run_bler(
            code, spec, grid, min_errors=args.min_errors,
            max_frames=args.max_frames, master_seed=args.seed,
            all_zero=args.all_zero, es_mode=args.es_n0,
            batch_frames=args.batch_frames, threads=args.threads, log=log)
    except Exception as exc:
        print(f"error: sweep did not complete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    write_csv(stats, out_csv)
    write_report(stats, out_json, out_manifest)
    if not args.no_plot:
        from .plotting import plot_bler

        label = (f"{args.decoder} RM({code.r},{code.m})"
                 + (f" M={spec.ensemble}" if args.decoder in
                    ("aut-bp", "mbbp") else ""))
        plot_bler(stats, out_png, label=label)
    if not args.quiet:
        for s in stats:
            print(f"snr={s.snr_db:g} bler={s.bler:.4e} "
                  f"frames={s.frames} errors={s.block_errors}")
    return 0


def cmd_complexity(args) -> int:
    printed = False
    if args.table1 and args.cn_degree is not None:
        print(cn_cost(args.cn_degree))
        printed = True
    if args.table1 and args.vn_degree is not None:
        print(vn_cost(args.vn_degree, weighted_edges=args.weighted_edges))
        printed = True
    if args.ml:
        print(ml_cost(args.ensemble, args.n))
        printed = True
    if args.stopping:
        print(stopping_cost(args.m, args.n))
        printed = True
    if args.table1 and not printed:
        print(f"box-plus: {boxplus_cost()}")
        for d in range(2, 9):
            w = vn_cost(d, weighted_edges=True)
            print(f"CN(D={d}): {cn_cost(d)}   VN(D={d}): {vn_cost(d)} "
                  f"(weighted edges: {w})")
        printed = True
    if args.report:
        bars = analytic_reference_bars()
        base, _ = os.path.splitext(args.report)
        try:
            with open(args.report, "w") as fh:
                fh.write("decoder,weighted_ops\n")
                for k in sorted(bars):
                    fh.write(f"{k},{bars[k]!r}\n")
        except OSError as exc:
            print(f"error: cannot write {args.report}: {exc}",
                  file=sys.stderr)
            return EXIT_UNWRITABLE
        from .plotting import plot_complexity_bars

        plot_complexity_bars(bars, base + ".png",
                             title="weighted workload per frame, RM(3,7)")
        printed = True
    if not printed:
        print("nothing to report: pass --table1/--ml/--stopping/--report",
              file=sys.stderr)
        return 2
    return 0


def cmd_graph(args) -> int:
    try:
        code = parse_code_spec(args.code)
    except CodeSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CODE
    full = build_ffg(code)
    red = reduce_ffg(full, code)
    pes = code.m * code.N // 2
    print(f"PEs: {pes}, full ops: {full.n_boxplus}, "
          f"reduced ops: {red.n_boxplus}")
    print(f"full: {full.n_boxplus} box-plus + {full.n_additions} additions")
    print(f"reduced: {red.n_boxplus} box-plus + {red.n_additions} additions")
    cc = red.class_counts
    print("reduced message classes: "
          + ", ".join(f"{k}={cc[k]}" for k in sorted(cc)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="autbp",
        description="Reed-Muller ensemble BP decoding: simulation sweeps, "
                    "complexity reports, graph inspection.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a BLER sweep")
    s.add_argument("--code", required=True, help="code spec r,m")
    s.add_argument("--decoder", required=True,
                   help="aut-bp | ffg-bp | tanner-bp | mbbp")
    s.add_argument("--ensemble", type=int, default=8,
                   help="ensemble size M (aut-bp, mbbp)")
    s.add_argument("--perm-group", choices=("ga", "pi", "id"), default="ga")
    s.add_argument("--max-iters", type=int, default=200)
    s.add_argument("--stopping", choices=("on", "off"), default="on")
    s.add_argument("--snr-start", type=float, required=True)
    s.add_argument("--snr-stop", type=float, default=None)
    s.add_argument("--snr-step", type=float, default=0.1)
    s.add_argument("--min-errors", type=int, default=100)
    s.add_argument("--max-frames", type=int, default=10_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--arithmetic", choices=("exact", "table"),
                   default="table")
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--threads", type=int, default=_default_threads())
    s.add_argument("--batch-frames", type=int, default=1024)
    s.add_argument("--all-zero", action="store_true",
                   help="transmit the all-zero codeword")
    s.add_argument("--es-n0", action="store_true",
                   help="interpret SNR as Es/N0 instead of Eb/N0")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("complexity", help="operation-count reports")
    c.add_argument("--table1", action="store_true",
                   help="print cost-model formula values")
    c.add_argument("--cn-degree", type=int, default=None)
    c.add_argument("--vn-degree", type=int, default=None)
    c.add_argument("--weighted-edges", action="store_true")
    c.add_argument("--ml", action="store_true")
    c.add_argument("--stopping", action="store_true")
    c.add_argument("--ensemble", type=int, default=8)
    c.add_argument("--m", type=int, default=7)
    c.add_argument("--n", type=int, default=128)
    c.add_argument("--report", default=None,
                   help="write analytic workload bars CSV (+PNG)")
    c.set_defaults(func=cmd_complexity)

    g = sub.add_parser("graph", help="factor-graph summary")
    g.add_argument("--code", required=True, help="code spec r,m")
    g.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "snr_stop", None) is None and \
            hasattr(args, "snr_start"):
        args.snr_stop = args.snr_start
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
