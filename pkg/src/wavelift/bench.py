"""
Benchmark harness: thread sweep, tile-size sweep and large-image sweep.

Every configuration is timed as ``warmup_runs`` untimed forward transforms
followed by ``runs`` timed ones; the report keeps the median, minimum and
maximum in nanoseconds per pixel.  Only the forward transform sits inside
the timed region: inputs are generated beforehand and the engine's worker
pool is created once per row.

Before anything is timed, each scheme is checked against the filter-bank
oracle on a 64x64 crop; a mismatch raises :class:`BenchAbort`.
"""

import csv
from dataclasses import dataclass, field
import json
import logging
import os
import platform
import statistics
import time

import numpy as np

from wavelift import oracle
from wavelift.engine import Engine, ExtensionMode, QuadField, make_plan, max_threads, to_mallat
from wavelift.schemes import SCHEME_NAMES, build
from wavelift.wavelets import resolve

__all__ = [
    "BenchConfig",
    "BenchRow",
    "BenchReport",
    "BenchAbort",
    "BenchConfigError",
    "CSV_HEADER",
    "run_threads_sweep",
    "run_tilesize_sweep",
    "run_image_sweep",
    "run",
    "machine_info",
    "forward_image",
    "check_correctness",
]

logger = logging.getLogger(__name__)

CSV_HEADER = [
    "experiment", "scheme", "wavelet", "threads", "width", "height", "runs",
    "median_ns_per_pel", "min_ns_per_pel", "max_ns_per_pel",
]
EXPERIMENTS = ("threads", "tilesize", "image")
ORACLE_TOL = 1e-3


class BenchConfigError(ValueError):
    pass


class BenchAbort(RuntimeError):
    pass


@dataclass
class BenchConfig:
    experiment: str
    schemes: list = field(default_factory=lambda: list(SCHEME_NAMES))
    wavelet: str = "cdf53"
    runs: int = 100
    warmup_runs: int = 3
    thread_list: list = None
    size_list: list = None
    threads: int = None
    tile_size: int = 1024
    extension: ExtensionMode = ExtensionMode.SYMMETRIC
    seed: int = 0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise BenchConfigError("experiment must be one of {}".format(", ".join(EXPERIMENTS)))
        if self.runs < 3:
            raise BenchConfigError("runs must be at least 3")
        if self.warmup_runs < 0:
            raise BenchConfigError("warmup_runs must be non-negative")
        for s in self.schemes:
            if s not in SCHEME_NAMES:
                raise BenchConfigError("unknown scheme {!r}".format(s))
        self.extension = ExtensionMode.parse(self.extension)
        if self.threads is None:
            self.threads = max_threads()
        if self.thread_list is None:
            self.thread_list = list(range(1, max_threads() + 1))
        if self.size_list is None:
            self.size_list = {
                "threads": [1024],
                "tilesize": [1 << k for k in range(7, 13)],
                "image": [1024, 2048, 4096, 8192],
            }[self.experiment]
        if any(t < 1 for t in self.thread_list) or self.threads < 1:
            raise BenchConfigError("thread counts must be positive")
        for s in list(self.size_list) + [self.tile_size]:
            if s < 2 or s % 2:
                raise BenchConfigError("sizes must be even and at least 2, got {}".format(s))


@dataclass
class BenchRow:
    experiment: str
    scheme: str
    wavelet: str
    threads: int
    width: int
    height: int
    runs: int
    median_ns_per_pel: float
    min_ns_per_pel: float
    max_ns_per_pel: float
    skipped: bool = False

    def csv_values(self):
        stats = (self.median_ns_per_pel, self.min_ns_per_pel, self.max_ns_per_pel)
        shown = ["skipped"] * 3 if self.skipped else ["{:.4f}".format(v) for v in stats]
        return [self.experiment, self.scheme, self.wavelet, self.threads, self.width, self.height,
                self.runs] + shown


@dataclass
class BenchReport:
    experiment: str
    rows: list = field(default_factory=list)
    machine: dict = field(default_factory=dict)

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            out = csv.writer(f)
            out.writerow(CSV_HEADER)
            for row in self.rows:
                out.writerow(row.csv_values())
        with open(str(path) + ".meta.json", "w") as f:
            json.dump(self.machine, f, indent=2)

    def lookup(self, scheme, threads, width, height):
        for r in self.rows:
            if (r.scheme, r.threads, r.width, r.height) == (scheme, threads, width, height):
                return r
        return None

    def speedups(self, baseline="sep-lifting"):
        """``{(scheme, threads, width, height): baseline median / scheme median}``."""
        out = {}
        for r in self.rows:
            if r.scheme == baseline or r.skipped:
                continue
            base = self.lookup(baseline, r.threads, r.width, r.height)
            if base is not None and not base.skipped and r.median_ns_per_pel > 0:
                out[(r.scheme, r.threads, r.width, r.height)] = base.median_ns_per_pel / r.median_ns_per_pel
        return out

    def summary(self):
        lines = ["experiment: {}".format(self.experiment)]
        lines.append("machine: " + ", ".join("{}={}".format(k, v) for k, v in self.machine.items()))
        lines.append("{:<12} {:>7} {:>11} {:>12} {:>10} {:>10}".format(
            "scheme", "threads", "size", "median ns/pel", "min", "max"))
        for r in self.rows:
            size = "{}x{}".format(r.width, r.height)
            if r.skipped:
                lines.append("{:<12} {:>7} {:>11} {:>12}".format(r.scheme, r.threads, size, "skipped"))
            else:
                lines.append("{:<12} {:>7} {:>11} {:>12.3f} {:>10.3f} {:>10.3f}".format(
                    r.scheme, r.threads, size, r.median_ns_per_pel, r.min_ns_per_pel, r.max_ns_per_pel))
        sp = self.speedups()
        if sp:
            lines.append("speedup vs sep-lifting (baseline median / scheme median):")
            for (scheme, threads, w, h), ratio in sorted(sp.items()):
                lines.append("  {:<12} threads={:<3} {}x{}: {:.3f}".format(scheme, threads, w, h, ratio))
        return "\n".join(lines)


def machine_info():
    info = {
        "cpu_count": os.cpu_count(),
        "usable_cpus": max_threads(),
        "processor": platform.processor() or platform.machine(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    try:
        with open("/proc/cpuinfo") as f:
            for line in f:
                if line.startswith("model name"):
                    info["model"] = line.split(":", 1)[1].strip()
                elif line.startswith("cpu MHz"):
                    info["nominal_mhz"] = float(line.split(":", 1)[1])
                    break
    except OSError:
        pass
    return info


def _available_bytes():
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return None


def _fits(width, height, tile_pixels=None):
    # input + output image, plus two planar buffers, output field and padding per tile
    need = 4 * (2 * width * height + 4 * (tile_pixels or width * height))
    avail = _available_bytes()
    return avail is None or need < 0.8 * avail


_oracle_cache = {}


def check_correctness(wavelet, schemes, extension=ExtensionMode.SYMMETRIC, size=64, tol=ORACLE_TOL):
    """Engine vs oracle on a ``size`` x ``size`` crop; raises :class:`BenchAbort`."""
    extension = ExtensionMode.parse(extension)
    w = resolve(wavelet) if isinstance(wavelet, str) else wavelet
    key = (w.name, w.pairs, w.scale_low, extension, size)
    if key not in _oracle_cache:
        crop = np.random.default_rng(12345).random((size, size)).astype(np.float32)
        conv = oracle.direct_transform(crop, oracle.filters_from_lifting(w), extension)
        # with zero padding each lifting step pads its own input
        lifting = conv if extension is ExtensionMode.SYMMETRIC else oracle.lifting_transform_2d(crop, w, extension)
        _oracle_cache[key] = (crop, conv, lifting)
    crop, conv, lifting = _oracle_cache[key]
    for name in schemes:
        ref = conv if name == "sep-conv" else lifting
        plan = make_plan(build(name, w), size // 2, 1)
        with Engine(1) as eng:
            out = to_mallat(eng.run(QuadField.from_pixels(crop, extension), plan))
        err = max(float(np.abs(a - b).max()) for a, b in zip(out, ref))
        if not err < tol:
            raise BenchAbort("{} disagrees with the oracle by {:.3g} (> {}); not timing it".format(name, err, tol))


def _time_runs(fn, runs, warmup, pixels):
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(runs):
        t0 = time.perf_counter_ns()
        fn()
        samples.append((time.perf_counter_ns() - t0) / pixels)
    return statistics.median(samples), min(samples), max(samples)


def _random_image(cfg, width, height):
    return np.random.default_rng(cfg.seed).random((height, width), dtype=np.float32)


def _time_tile(cfg, scheme_name, w, threads, size):
    tile = QuadField.from_pixels(_random_image(cfg, size, size), cfg.extension)
    plan = make_plan(build(scheme_name, w), tile.height_quads, threads)
    with Engine(threads) as eng:
        return _time_runs(lambda: eng.run(tile, plan), cfg.runs, cfg.warmup_runs, size * size)


def _row(cfg, scheme, threads, width, height, stats=None):
    if stats is None:
        nan = float("nan")
        return BenchRow(cfg.experiment, scheme, cfg.wavelet, threads, width, height, cfg.runs,
                        nan, nan, nan, skipped=True)
    return BenchRow(cfg.experiment, scheme, cfg.wavelet, threads, width, height, cfg.runs, *stats)


def _prepare(cfg):
    w = resolve(cfg.wavelet)
    check_correctness(w, cfg.schemes, cfg.extension)
    return w, BenchReport(cfg.experiment, machine=machine_info())


def run_threads_sweep(cfg):
    w, report = _prepare(cfg)
    size = cfg.size_list[0]
    for name in cfg.schemes:
        for threads in cfg.thread_list:
            logger.info("threads sweep: %s, %d threads, %dx%d", name, threads, size, size)
            stats = _time_tile(cfg, name, w, threads, size) if _fits(size, size) else None
            report.rows.append(_row(cfg, name, threads, size, size, stats))
    return report


def run_tilesize_sweep(cfg):
    w, report = _prepare(cfg)
    for name in cfg.schemes:
        for size in cfg.size_list:
            logger.info("tile sweep: %s, %dx%d, %d threads", name, size, size, cfg.threads)
            stats = _time_tile(cfg, name, w, cfg.threads, size) if _fits(size, size) else None
            report.rows.append(_row(cfg, name, cfg.threads, size, size, stats))
    return report


def forward_image(image, out, tile_size, engine, plans, extension):
    """Forward transform of ``image`` as independent ``tile_size`` tiles into ``out``."""
    h, w = image.shape
    for y in range(0, h, tile_size):
        for x in range(0, w, tile_size):
            block = image[y:y + tile_size, x:x + tile_size]
            tile = QuadField.from_pixels(block, extension)
            res = engine.run(tile, plans[block.shape])
            out[y:y + tile_size, x:x + tile_size] = res.data


def run_image_sweep(cfg):
    w, report = _prepare(cfg)
    for edge in cfg.size_list:
        tile = min(cfg.tile_size, edge)
        if not _fits(edge, edge, tile * tile):
            for name in cfg.schemes:
                report.rows.append(_row(cfg, name, cfg.threads, edge, edge))
            continue
        image = _random_image(cfg, edge, edge)
        out = np.empty_like(image)
        shapes = {image[y:y + tile, x:x + tile].shape
                  for y in range(0, edge, tile) for x in range(0, edge, tile)}
        for name in cfg.schemes:
            logger.info("image sweep: %s, %dx%d in %d tiles", name, edge, edge, tile)
            scheme = build(name, w)
            plans = {s: make_plan(scheme, s[0] // 2, cfg.threads) for s in shapes}
            with Engine(cfg.threads) as eng:
                stats = _time_runs(
                    lambda: forward_image(image, out, tile, eng, plans, cfg.extension),
                    cfg.runs, cfg.warmup_runs, edge * edge,
                )
            report.rows.append(_row(cfg, name, cfg.threads, edge, edge, stats))
        del image, out
    return report


def run(cfg):
    return {
        "threads": run_threads_sweep,
        "tilesize": run_tilesize_sweep,
        "image": run_image_sweep,
    }[cfg.experiment](cfg)
