"""
``dwt``: forward/inverse transforms, verification, operation counts and
benchmarks from the command line.

Exit status is 0 on success, 1 when a verification or benchmark guard fails,
and 2 for usage and I/O errors.
"""

import argparse
import logging
import sys

import numpy as np

from wavelift import bench, imageio, verify
from wavelift.engine import Engine, ExtensionMode, QuadField, from_mallat, make_plan, max_threads, to_mallat
from wavelift.schemes import SCHEME_NAMES, build, build_all, count_ops, dump, invert
from wavelift.wavelets import UnknownWaveletError, WaveletConfigError, resolve

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, got {!r}".format(text))
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _wavelet(args):
    try:
        return resolve(args.wavelet)
    except (UnknownWaveletError, WaveletConfigError, OSError) as exc:
        raise UsageError("--wavelet {}: {}".format(args.wavelet, exc))


def _extensions(value):
    if value == "all":
        return list(ExtensionMode)
    return [ExtensionMode.parse(value)]


def _add_common(p, scheme=True):
    p.add_argument("--wavelet", default="cdf53", help="builtin name or @config-file (default cdf53)")
    if scheme:
        p.add_argument("--scheme", default="ns-adapted", choices=SCHEME_NAMES)
    p.add_argument("--threads", type=int, default=max_threads())
    p.add_argument("--extension", default=ExtensionMode.SYMMETRIC.value,
                   choices=[m.value for m in ExtensionMode] + (["all"] if not scheme else []))


def _add_io(p):
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--size", help="WxH, required for f32le input")
    p.add_argument("--format", choices=imageio.FORMATS, help="input format (default: from file name)")
    p.add_argument("--output-format", choices=imageio.FORMATS, help="default: f32le")
    p.add_argument("--layout", choices=("quad", "mallat"), default="quad",
                   help="coefficient layout of the transformed image")


def _load_input(args):
    fmt = args.format or imageio.guess_format(args.input)
    size = None
    if fmt == "f32le":
        if not args.size:
            raise UsageError("--size WxH is required for f32le input")
        try:
            size = imageio.parse_size(args.size)
        except ValueError as exc:
            raise UsageError(str(exc))
    try:
        img = imageio.load(args.input, fmt, size)
    except (OSError, imageio.ImageFormatError) as exc:
        raise UsageError("cannot read {}: {}".format(args.input, exc))
    if img.width % 2 or img.height % 2:
        raise UsageError("image dimensions must be even, got {}x{}".format(img.width, img.height))
    return img


def _store_output(args, pixels):
    try:
        imageio.store(imageio.RawImage.from_array(pixels), args.output, args.output_format or "f32le")
    except (OSError, imageio.ImageFormatError) as exc:
        raise UsageError("cannot write {}: {}".format(args.output, exc))


def _plan(args, scheme, height_quads):
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    return make_plan(scheme, height_quads, args.threads)


def cmd_forward(args):
    w = _wavelet(args)
    img = _load_input(args)
    tile = QuadField.from_pixels(img.pixels, args.extension)
    plan = _plan(args, build(args.scheme, w), tile.height_quads)
    with Engine(args.threads) as eng:
        out = eng.run(tile, plan)
    pixels = imageio.mallat_image(to_mallat(out)).pixels if args.layout == "mallat" else out.data
    _store_output(args, pixels)
    return EXIT_OK


def cmd_inverse(args):
    w = _wavelet(args)
    img = _load_input(args)
    if args.layout == "mallat":
        tile = from_mallat(imageio.split_mallat(img), args.extension)
    else:
        tile = QuadField.from_pixels(img.pixels, args.extension)
    plan = _plan(args, invert(build(args.scheme, w)), tile.height_quads)
    with Engine(args.threads) as eng:
        out = eng.run(tile, plan)
    _store_output(args, out.data)
    return EXIT_OK


def cmd_verify(args):
    w = _wavelet(args)
    try:
        size = imageio.parse_size(args.size)
    except ValueError as exc:
        raise UsageError(str(exc))
    if size[0] % 2 or size[1] % 2:
        raise UsageError("--size must be even")
    results = verify.run_checks(w, size, max(args.threads, 1), args.seed, _extensions(args.extension))
    print("wavelet {} ({} lifting pairs), tile {}x{}".format(w.name, w.K, *size))
    print(verify.format_table(results))
    failed = [r for r in results if not r.ok]
    if failed:
        print("FAILED: {} ({})".format(failed[0].name, failed[0].detail), file=sys.stderr)
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def cmd_ops(args):
    w = _wavelet(args)
    schemes = build_all(w)
    print("wavelet {}".format(w.name))
    print("{:<12} {:>6} {:>10} {:>12}".format("scheme", "steps", "MACs/quad", "copies/quad"))
    for name, s in schemes.items():
        c = count_ops(s)
        print("{:<12} {:>6} {:>10} {:>12}".format(name, c.steps, c.macs_per_quad, c.copies_per_quad))
    if args.dump:
        names = SCHEME_NAMES if args.dump == "all" else [args.dump]
        for name in names:
            print()
            print("{} ({}):".format(name, w.name))
            print(dump(schemes[name]))
    return EXIT_OK


def cmd_bench(args):
    kw = dict(
        experiment=args.experiment,
        wavelet=args.wavelet,
        runs=args.runs,
        warmup_runs=args.warmup,
        extension=args.extension,
    )
    if args.schemes:
        kw["schemes"] = args.schemes.split(",")
    if args.thread_list:
        kw["thread_list"] = args.thread_list
    if args.threads:
        kw["threads"] = args.threads
    if args.tile_size:
        kw["tile_size"] = args.tile_size
    sizes = args.edges if args.experiment == "image" else args.sizes
    if sizes:
        kw["size_list"] = sizes
    try:
        _wavelet(args)
        cfg = bench.BenchConfig(**kw)
    except (bench.BenchConfigError, ValueError) as exc:
        raise UsageError(str(exc))
    try:
        report = bench.run(cfg)
    except bench.BenchAbort as exc:
        print("benchmark aborted: {}".format(exc), file=sys.stderr)
        return EXIT_FAIL
    print(report.summary())
    path = args.csv or "bench-{}.csv".format(args.experiment)
    try:
        report.write_csv(path)
    except OSError as exc:
        raise UsageError("cannot write {}: {}".format(path, exc))
    print("wrote {}".format(path))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dwt", description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="forward 2-D transform of one tile")
    _add_common(p)
    _add_io(p)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("inverse", help="inverse 2-D transform of one tile")
    _add_common(p)
    _add_io(p)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("verify", help="run the property checks")
    _add_common(p, scheme=False)
    p.add_argument("--size", default="64x64", help="test tile WxH (default 64x64)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ops", help="steps and arithmetic per scheme")
    p.add_argument("--wavelet", default="cdf53")
    p.add_argument("--dump", nargs="?", const="all", choices=list(SCHEME_NAMES) + ["all"],
                   help="print the symbolic step matrices")
    p.set_defaults(func=cmd_ops)

    p = sub.add_parser("bench", help="timing sweeps")
    p.add_argument("--experiment", required=True, choices=bench.EXPERIMENTS)
    p.add_argument("--wavelet", default="cdf53")
    p.add_argument("--schemes", help="comma-separated subset of " + ",".join(SCHEME_NAMES))
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--thread-list", type=_int_list, help="threads experiment: thread counts")
    p.add_argument("--threads", type=int, help="tilesize/image experiments: worker count")
    p.add_argument("--sizes", type=_int_list, help="tile edge(s) in pixels")
    p.add_argument("--edges", type=_int_list, help="image experiment: image edges in pixels")
    p.add_argument("--tile-size", type=int, help="image experiment: tile edge (default 1024)")
    p.add_argument("--extension", default=ExtensionMode.SYMMETRIC.value, choices=[m.value for m in ExtensionMode])
    p.add_argument("--csv", help="output CSV path (default bench-<experiment>.csv)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print("dwt {}: error: {}".format(args.command, exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
