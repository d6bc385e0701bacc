"""Command-line entry point.

Exit status: 0 success, 1 usage, 2 parse/validation, 3 dimension mismatch,
4 non-differentiable point, 5 divergence.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from dataclasses import asdict

import numpy as np

from . import __version__
from .analysis import DEFAULT_N_PAIRS, consistency_report
from .bench import run_bench, slopes_in_m
from .dp_align import Solver, distance_matrix, solve
from .errors import DegenerateBaseline, DimensionError, DivergenceDetected, NonDifferentiablePoint, ValidationError
from .fileio import SCHEMA_VERSION, atomic_write, read_embeddings, write_document, write_embeddings
from .gradients import consistency_grad
from .heatmap import render_pgm, render_svg
from .seqcore import FrameMetric, validate_pair
from .synth import UpdateSide, generate_planted, optimize_embeddings

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DIM, EXIT_NONDIFF, EXIT_DIVERGE = range(6)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _positive_float(s):
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {s}")
    return v


def _seed(s):
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _metric(s):
    try:
        return FrameMetric.parse(s)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_pair(audio_path, text_path):
    return validate_pair(read_embeddings(audio_path), read_embeddings(text_path))


def _header(command, metric, audio, text):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "metric": metric.value,
        "n": audio.len,
        "m": text.len,
        "dim": audio.dim,
    }


def cmd_align(args):
    audio, text = _load_pair(args.audio, args.text)
    t0 = time.perf_counter()
    res = solve(audio, text, args.metric, Solver(args.solver))
    elapsed = (time.perf_counter() - t0) * 1e3
    doc = _header("align", args.metric, audio, text)
    doc.update(solver=res.solver.value, loss=res.loss, path=list(res.path.indices), elapsed_ms=elapsed)
    write_document(args.output, doc)
    return EXIT_OK


def cmd_grad(args):
    audio, text = _load_pair(args.audio, args.text)
    t0 = time.perf_counter()
    g = consistency_grad(audio, text, args.metric)
    elapsed = (time.perf_counter() - t0) * 1e3
    doc = _header("grad", args.metric, audio, text)
    doc.update(
        solver=Solver.OPTIMIZED.value,
        loss=g.loss,
        path=list(g.path.indices),
        elapsed_ms=elapsed,
        d_audio=g.d_audio.tolist(),
        d_text=g.d_text.tolist(),
    )
    write_document(args.output, doc)
    return EXIT_OK


def _format_table(rows):
    lines = [f"{'layer':<12} {'frame-wise':>11} {'best':>9}"]
    for r in rows:
        if "error" in r:
            lines.append(f"{r['label']:<12} error: {r['error']}")
        else:
            lines.append(f"{r['label']:<12} {r['z_framewise']:>11.2f} {r['z_best']:>9.2f}")
    return "\n".join(lines)


def cmd_report(args):
    pairs = [(label, *_load_pair(a, t)) for label, a, t in args.pair]
    rows = []
    for label, audio, text in pairs:
        try:
            rep = consistency_report(label, audio, text, args.metric, args.n_pairs, args.seed)
        except DegenerateBaseline as exc:
            rows.append({"label": label, "error": f"DegenerateBaseline: {exc}"})
            continue
        rows.append(
            {
                "label": label,
                "z_framewise": rep.z_framewise,
                "z_best": rep.z_best,
                "loss_framewise": rep.loss_framewise,
                "loss_best": rep.loss_best,
                "baseline_mean": rep.baseline.mean,
                "baseline_std": rep.baseline.std,
                "verdict": rep.verdict,
            }
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "report",
        "metric": args.metric.value,
        "n_pairs": args.n_pairs,
        "seed": args.seed,
        "rows": rows,
    }
    write_document(args.output, doc)
    if args.output not in (None, "-"):
        print(_format_table(rows))
    return EXIT_OK


def cmd_heatmap(args):
    audio, text = _load_pair(args.audio, args.text)
    fmt = args.format or ("svg" if str(args.output).lower().endswith(".svg") else "pgm")
    D = distance_matrix(audio, text, args.metric)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if fmt == "pgm":
            body = render_pgm(D)
        else:
            body = render_svg(D, solve(audio, text, args.metric).path)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    atomic_write(args.output, body)
    return EXIT_OK


def cmd_synth(args):
    inst = generate_planted(args.n, args.m, args.d, args.noise, args.seed)
    prefix = args.prefix
    write_embeddings(f"{prefix}.audio.bin", inst.audio)
    write_embeddings(f"{prefix}.text.bin", inst.text)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "synth",
        "n": args.n,
        "m": args.m,
        "dim": args.d,
        "noise_sigma": args.noise,
        "seed": args.seed,
        "path": list(inst.planted.indices),
    }
    write_document(f"{prefix}.path.json", doc)
    return EXIT_OK


def _nan_to_none(xs):
    return [None if not math.isfinite(x) else x for x in xs]


def cmd_demo(args):
    rng = np.random.default_rng(args.seed)
    audio = rng.standard_normal((args.n, args.d))
    text = rng.standard_normal((args.m, args.d))
    try:
        trace = optimize_embeddings(
            audio, text, FrameMetric.SQUARED_L2, args.steps, args.lr, UpdateSide(args.side), args.seed
        )
    except DivergenceDetected as exc:
        print(f"error: divergence at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_DIVERGE
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "demo",
        "metric": FrameMetric.SQUARED_L2.value,
        "n": args.n,
        "m": args.m,
        "dim": args.d,
        "steps": args.steps,
        "learning_rate": args.lr,
        "side": trace.side.value,
        "seed": args.seed,
        "initial_loss": trace.losses[0],
        "final_loss": trace.losses[-1],
        "losses": trace.losses,
        "z_best": _nan_to_none(trace.z_best),
    }
    write_document(args.output, doc)
    return EXIT_OK


def cmd_bench(args):
    rows = run_bench(args.n, args.m, args.d, args.reps, args.seed)
    slopes = slopes_in_m(rows)
    print(f"{'n':>6} {'m':>6} {'d':>5} {'naive_ms':>10} {'optimized_ms':>13} agree")
    for r in rows:
        print(f"{r.n:>6} {r.m:>6} {r.d:>5} {r.naive_ms:>10.3f} {r.optimized_ms:>13.3f} {r.agree}")
    for n, s in slopes.items():
        print(f"n={n}: slope in m  naive={s['naive']:.3f}  optimized={s['optimized']:.3f}")
    if args.output:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "bench",
            "reps": args.reps,
            "rows": [asdict(r) for r in rows],
            "slopes": {str(n): s for n, s in slopes.items()},
        }
        write_document(args.output, doc)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="bestalign", description="Best monotone alignment between embedding sequences.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=False):
        sp.add_argument("--metric", type=_metric, default=FrameMetric.SQUARED_L2, help="sql2 (default), l2 or l1")
        if seed:
            sp.add_argument("--seed", type=_seed, default=42)

    sp = sub.add_parser("align", help="best alignment and loss")
    sp.add_argument("audio")
    sp.add_argument("text")
    sp.add_argument("--solver", choices=[s.value for s in Solver], default=Solver.OPTIMIZED.value)
    sp.add_argument("-o", "--output", default="-")
    common(sp)
    sp.set_defaults(func=cmd_align)

    sp = sub.add_parser("grad", help="pass-through gradients")
    sp.add_argument("audio")
    sp.add_argument("text")
    sp.add_argument("-o", "--output", default="-")
    common(sp)
    sp.set_defaults(func=cmd_grad)

    sp = sub.add_parser("report", help="z-score table, one row per labelled pair")
    sp.add_argument("--pair", nargs=3, action="append", required=True, metavar=("LABEL", "AUDIO", "TEXT"))
    sp.add_argument("--n-pairs", type=_positive_int, default=DEFAULT_N_PAIRS)
    sp.add_argument("-o", "--output", default="-")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("heatmap", help="distance-matrix image")
    sp.add_argument("audio")
    sp.add_argument("text")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--format", choices=["pgm", "svg"])
    common(sp)
    sp.set_defaults(func=cmd_heatmap)

    sp = sub.add_parser("synth", help="planted-alignment instance")
    sp.add_argument("prefix", help="writes PREFIX.audio.bin, PREFIX.text.bin, PREFIX.path.json")
    sp.add_argument("--n", type=_positive_int, default=40)
    sp.add_argument("--m", type=_positive_int, default=12)
    sp.add_argument("--d", type=_positive_int, default=8)
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--seed", type=_seed, default=42)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("demo", help="gradient descent on the best-alignment loss")
    sp.add_argument("--steps", type=_positive_int, default=200)
    sp.add_argument("--lr", type=_positive_float, default=0.05)
    sp.add_argument("--side", choices=[s.value for s in UpdateSide], default=UpdateSide.AUDIO.value)
    sp.add_argument("--n", type=_positive_int, default=16)
    sp.add_argument("--m", type=_positive_int, default=8)
    sp.add_argument("--d", type=_positive_int, default=8)
    sp.add_argument("--seed", type=_seed, default=42)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("bench", help="time both solvers over an (n, m) grid")
    sp.add_argument("--n", type=_positive_int, nargs="+", default=[256])
    sp.add_argument("--m", type=_positive_int, nargs="+", default=[64, 128, 256, 512])
    sp.add_argument("--d", type=_positive_int, default=64)
    sp.add_argument("--reps", type=_positive_int, default=5)
    sp.add_argument("--seed", type=_seed, default=42)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except DimensionError as exc:
        print(f"error: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except NonDifferentiablePoint as exc:
        print(f"error: NonDifferentiablePoint: {exc}", file=sys.stderr)
        return EXIT_NONDIFF
    except DivergenceDetected as exc:
        print(f"error: divergence at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_DIVERGE
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
