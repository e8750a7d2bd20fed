"""Command line interface.

Exit codes: 0 success, 1 I/O or file format errors, 2 invalid flags.
"""

from __future__ import annotations

import json
import math
import sys
import time
from argparse import ArgumentParser, ArgumentTypeError

import numpy as np

from . import __version__
from .filters import gaussian_filter, median_filter
from .io import ArrayFileMeta, NpyFormatError, read_npy, read_raw, write_npy
from .metrics import contrast_report
from .pipeline import mclahe, mclahe_framewise, resolve_threads
from .synth import DEFAULT_SHAPE, synth_volume


class UsageError(Exception):
    """Invalid flag values; reported with exit code 2."""


def int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def thread_count(text: str) -> int:
    if text == "max":
        return 0
    try:
        n = int(text)
    except ValueError:
        raise ArgumentTypeError(f"expected an integer or 'max', got {text!r}") from None
    if n < 0:
        raise ArgumentTypeError("thread count must be non-negative")
    return n


def _add_input(parser, flag="--in", dest="input", required=True):
    parser.add_argument(flag, dest=dest, required=required, metavar="PATH",
                        help="input NPY file (or raw binary with --raw-shape)")


def _add_raw(parser):
    parser.add_argument("--raw-shape", type=int_list, help="treat inputs as raw binary of this shape")
    parser.add_argument("--raw-dtype", default="f4", help="dtype code of raw inputs (default f4)")


def load_input(path: str, args) -> np.ndarray:
    if getattr(args, "raw_shape", None):
        try:
            meta = ArrayFileMeta(args.raw_dtype, False, tuple(args.raw_shape))
        except NpyFormatError as exc:
            raise UsageError(f"--raw-dtype/--raw-shape: {exc}") from None
        return read_raw(path, meta)
    data, _ = read_npy(path)
    return data


def check_rank(flag: str, values, ndim: int) -> None:
    if len(values) != ndim:
        raise UsageError(f"{flag} has {len(values)} entries, input has rank {ndim}")


def format_report(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, sort_keys=True)
    lines = []
    for key, value in report.items():
        if isinstance(value, float):
            value = "inf" if math.isinf(value) else repr(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines)


def emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_enhance(args) -> int:
    t0 = time.perf_counter()
    data = load_input(args.input, args)
    timings = {"io": time.perf_counter() - t0}
    if args.framewise_axis is not None:
        axis = args.framewise_axis
        if not -data.ndim <= axis < data.ndim:
            raise UsageError(f"--framewise-axis {axis} out of range for rank {data.ndim}")
        check_rank("kernel-size", args.kernel_size, data.ndim - 1)
    else:
        check_rank("kernel-size", args.kernel_size, data.ndim)
    if not 0 < args.clip_limit <= 1:
        raise UsageError(f"--clip-limit must lie in (0, 1], got {args.clip_limit}")
    if args.n_bins < 2:
        raise UsageError(f"--n-bins must be >= 2, got {args.n_bins}")
    frame_shape = [s for a, s in enumerate(data.shape)
                   if args.framewise_axis is None or a != args.framewise_axis % data.ndim]
    for b, s in zip(args.kernel_size, frame_shape):
        if not 1 <= b <= s:
            raise UsageError(f"kernel-size entry {b} must lie in [1, {s}]")

    common = dict(clip_limit=args.clip_limit, n_bins=args.n_bins,
                  adaptive_hist_range=args.adaptive_range, threads=args.threads, timings=timings)
    if args.framewise_axis is None:
        out = mclahe(data, args.kernel_size, **common)
    else:
        out = mclahe_framewise(data, args.framewise_axis, args.kernel_size,
                               renormalize_frames=args.renormalize_frames, **common)
    t1 = time.perf_counter()
    write_npy(args.out, out, args.out_dtype)
    if args.metrics_out or args.figure:
        from .pipeline import normalize_to_unit
        reference = normalize_to_unit(data)
        if args.metrics_out:
            report = contrast_report(out, reference, n_bins=args.n_bins).as_dict()
            emit(format_report(report, args.json), args.metrics_out)
        if args.figure:
            from .plotting import plot_comparison
            plot_comparison({"input": reference, "enhanced": out}, args.figure, n_bins=args.n_bins)
    timings["io"] += time.perf_counter() - t1
    total = time.perf_counter() - t0
    mode = "adaptive" if args.adaptive_range else "global"
    phases = " ".join(f"{k}={v:.3f}s" for k, v in timings.items())
    framewise = "" if args.framewise_axis is None else f" framewise_axis={args.framewise_axis}"
    print(f"enhanced shape={tuple(data.shape)} kernel={tuple(args.kernel_size)} mode={mode}"
          f"{framewise} threads={resolve_threads(args.threads)} wall={total:.3f}s ({phases})")
    return 0


def cmd_filter(args) -> int:
    if (args.gaussian_sigma is None) == (args.median_size is None):
        raise UsageError("give exactly one of --gaussian-sigma or --median-size")
    data = load_input(args.input, args)
    if args.gaussian_sigma is not None:
        check_rank("gaussian-sigma", args.gaussian_sigma, data.ndim)
        if any(s < 0 for s in args.gaussian_sigma):
            raise UsageError("--gaussian-sigma values must be non-negative")
        out = gaussian_filter(data, args.gaussian_sigma, truncate=args.truncate)
    else:
        check_rank("median-size", args.median_size, data.ndim)
        if any(w < 1 for w in args.median_size):
            raise UsageError("--median-size values must be >= 1")
        out = median_filter(data, args.median_size)
    write_npy(args.out, out, args.out_dtype)
    return 0


def cmd_metrics(args) -> int:
    a = load_input(args.a, args)
    b = load_input(args.b, args) if args.b else None
    if b is not None and a.shape != b.shape:
        raise UsageError(f"--a has shape {a.shape}, --b has shape {b.shape}")
    if args.bins < 2:
        raise UsageError("--bins must be >= 2")
    report = contrast_report(a, b, n_bins=args.bins, peak=args.peak).as_dict()
    emit(format_report(report, args.json), args.out)
    if args.figure:
        from .plotting import plot_comparison
        images = {"a": a} if b is None else {"a": a, "b": b}
        plot_comparison(images, args.figure, n_bins=args.bins)
    return 0


def cmd_synth(args) -> int:
    if any(s < 1 for s in args.shape):
        raise UsageError(f"--shape entries must be positive, got {args.shape}")
    if args.faint_scale <= 0:
        raise UsageError("--faint-scale must be positive")
    volume, mask = synth_volume(args.shape, seed=args.seed, faint_scale=args.faint_scale, noise=args.noise)
    write_npy(args.out, volume, args.out_dtype)
    if args.mask_out:
        write_npy(args.mask_out, mask, "u1")
    return 0


def cmd_info(args) -> int:
    if args.raw_shape:
        data = load_input(args.input, args)
        dtype = args.raw_dtype
    else:
        data, meta = read_npy(args.input)
        dtype = meta.dtype_code
    report = {
        "shape": ",".join(str(s) for s in data.shape),
        "dtype": dtype,
        "min": float(data.min()),
        "max": float(data.max()),
        "mean": float(data.mean()),
    }
    print(format_report(report, args.json))
    return 0


def build_parser() -> ArgumentParser:
    parser = ArgumentParser("mclahe", description="Multidimensional CLAHE for N-d arrays.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="contrast-enhance an array")
    _add_input(p)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--kernel-size", type=int_list, required=True, metavar="K0,K1,..")
    p.add_argument("--clip-limit", type=float, default=0.01)
    p.add_argument("--n-bins", type=int, default=256)
    p.add_argument("--adaptive-range", action="store_true", help="per-kernel histogram range")
    p.add_argument("--framewise-axis", type=int, help="process slices along this axis separately")
    p.add_argument("--renormalize-frames", action="store_true",
                   help="normalize every frame on its own in framewise mode")
    p.add_argument("--threads", type=thread_count, default=0, help="worker count or 'max' (default)")
    p.add_argument("--out-dtype", default="f8", choices=("f4", "f8"))
    p.add_argument("--metrics-out", metavar="PATH", help="write metrics of output vs normalized input")
    p.add_argument("--figure", metavar="PATH", help="save a comparison figure")
    p.add_argument("--json", action="store_true", help="JSON metrics report")
    _add_raw(p)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("filter", help="denoise with a Gaussian or median filter")
    _add_input(p)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--gaussian-sigma", type=float_list, metavar="S0,S1,..")
    p.add_argument("--truncate", type=float, default=4.0)
    p.add_argument("--median-size", type=int_list, metavar="W0,W1,..")
    p.add_argument("--out-dtype", default="f8", choices=("f4", "f8"))
    _add_raw(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("metrics", help="contrast metrics of one array or a pair")
    _add_input(p, "--a", "a")
    _add_input(p, "--b", "b", required=False)
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--peak", type=float, default=1.0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--figure", metavar="PATH", help="save slices and histograms")
    _add_raw(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="generate a synthetic blob volume")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--shape", type=int_list, default=list(DEFAULT_SHAPE))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--faint-scale", type=float, default=100.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--mask-out", metavar="PATH", help="write the faint-region mask (u1)")
    p.add_argument("--out-dtype", default="f8", choices=("f4", "f8"))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("info", help="print shape, dtype and value range")
    _add_input(p)
    p.add_argument("--json", action="store_true")
    _add_raw(p)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, NpyFormatError) as exc:
        print(f"mclahe {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        print(f"mclahe {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
