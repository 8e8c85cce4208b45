"""
Numeric executor for :mod:`wavelift.schemes`.

A tile is held as a :class:`QuadField`: the pixel array itself, where the
2x2 block at quad ``(m, n)`` holds ``LL`` (even row, even column), ``HL``
(even row, odd column), ``LH`` (odd row, even column) and ``HH``.

The executor splits the quad rows into contiguous bands, one per worker.
Each worker runs the whole step list over its band and waits on a shared
barrier after every step.  Steps are double-buffered: a step reads the
snapshot left by the previous step and writes a fresh buffer, so a worker
never reads a value another worker writes during the same step.

Arithmetic for a quad does not depend on the band it falls in, so results
are bit-identical for every thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import os
import threading

import numpy as np

from wavelift.schemes import COMPONENTS, Scheme, Step, invert

__all__ = [
    "ExtensionMode",
    "QuadField",
    "ExecPlan",
    "Engine",
    "AccessTrace",
    "PlanError",
    "partition",
    "make_plan",
    "forward",
    "inverse",
    "apply_step",
    "to_mallat",
    "from_mallat",
    "max_threads",
]

# (row parity, column parity) of each component inside its 2x2 block
_PARITY = {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}


class PlanError(ValueError):
    pass


class ExtensionMode(Enum):
    SYMMETRIC = "whole-sample-symmetric"
    ZERO = "zero-pad"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"symmetric": cls.SYMMETRIC, "wss": cls.SYMMETRIC, "zero": cls.ZERO}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ValueError(
                "unknown extension {!r}; use whole-sample-symmetric or zero-pad".format(value)
            ) from None


def max_threads():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass
class QuadField:
    width_quads: int
    height_quads: int
    data: np.ndarray
    extension: ExtensionMode = ExtensionMode.SYMMETRIC

    def __post_init__(self):
        self.extension = ExtensionMode.parse(self.extension)
        if self.width_quads < 1 or self.height_quads < 1:
            raise PlanError("tile must hold at least one quad")
        shape = (2 * self.height_quads, 2 * self.width_quads)
        if self.data.shape != shape:
            raise PlanError("data shape {} does not match {}".format(self.data.shape, shape))
        if self.data.dtype != np.float32 or not self.data.flags.c_contiguous:
            self.data = np.ascontiguousarray(self.data, dtype=np.float32)

    @classmethod
    def from_pixels(cls, pixels, extension=ExtensionMode.SYMMETRIC):
        pixels = np.asarray(pixels)
        if pixels.ndim != 2:
            raise PlanError("expected a 2-D pixel array")
        h, w = pixels.shape
        if h % 2 or w % 2:
            raise PlanError("tile dimensions must be even, got {}x{}".format(w, h))
        data = np.array(pixels, dtype=np.float32, order="C")
        return cls(w // 2, h // 2, data, extension)

    @classmethod
    def zeros(cls, width_quads, height_quads, extension=ExtensionMode.SYMMETRIC):
        return cls(width_quads, height_quads,
                   np.zeros((2 * height_quads, 2 * width_quads), np.float32), extension)

    @property
    def shape(self):
        """Pixel shape ``(rows, cols)``."""
        return self.data.shape

    def component(self, c):
        """Strided view of one component, shape ``(height_quads, width_quads)``."""
        py, px = _PARITY[c]
        return self.data[py::2, px::2]

    def quad(self, m, n):
        return tuple(float(self.data[2 * n + py, 2 * m + px]) for py, px in (_PARITY[c] for c in range(4)))

    def planes(self):
        return np.stack([self.component(c) for c in range(4)])

    def copy(self):
        return QuadField(self.width_quads, self.height_quads, self.data.copy(), self.extension)


def to_mallat(tile):
    """Deinterleave into ``(LL, HL, LH, HH)`` planes."""
    return tuple(np.ascontiguousarray(tile.component(c)) for c in range(4))


def from_mallat(planes, extension=ExtensionMode.SYMMETRIC):
    ll = np.asarray(planes[0])
    h, w = ll.shape
    tile = QuadField.zeros(w, h, extension)
    for c, plane in enumerate(planes):
        plane = np.asarray(plane)
        if plane.shape != (h, w):
            raise PlanError("subband planes must share one shape")
        py, px = _PARITY[c]
        tile.data[py::2, px::2] = plane
    return tile


def partition(height_quads, threads):
    """Balanced contiguous row bands, larger bands first."""
    if height_quads < 1 or threads < 1:
        raise PlanError("partition needs positive inputs")
    count = min(threads, height_quads)
    base, extra = divmod(height_quads, count)
    bands, start = [], 0
    for i in range(count):
        size = base + (1 if i < extra else 0)
        bands.append((start, start + size))
        start += size
    return bands


# -- lowering -----------------------------------------------------------------


@dataclass(frozen=True)
class _Term:
    src: int
    a: int
    b: int
    coef: np.float32


@dataclass(frozen=True)
class _Row:
    copy: bool  # starts from the component's own value (diagonal constant 1)
    terms: tuple

    @property
    def passthrough(self):
        return self.copy and not self.terms


@dataclass(frozen=True)
class _Part:
    rows: tuple
    # per source component: (horizontal margin, vertical margin)
    margins: tuple

    @property
    def reads_neighbours(self):
        return any(ma or mb for ma, mb in self.margins)


def _lower_matrix(m):
    rows = []
    margins = [[0, 0] for _ in range(4)]
    for i in range(4):
        copy = False
        terms = []
        for j in range(4):
            for (a, b), c in m[i, j].items():
                if i == j and (a, b) == (0, 0) and c == 1:
                    copy = True
                    continue
                terms.append(_Term(j, a, b, np.float32(c)))
                margins[j][0] = max(margins[j][0], abs(a))
                margins[j][1] = max(margins[j][1], abs(b))
        rows.append(_Row(copy, tuple(terms)))
    return _Part(tuple(rows), tuple(tuple(x) for x in margins))


def _lower(scheme):
    return tuple(tuple(_lower_matrix(p) for p in step.parts) for step in scheme.steps)


@dataclass
class ExecPlan:
    scheme: Scheme
    threads: int
    partition: list
    kernels: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.threads < 1:
            raise PlanError("threads must be positive")
        if len(self.partition) > self.threads:
            raise PlanError("more bands than threads")
        if self.kernels is None:
            self.kernels = _lower(self.scheme)

    @property
    def height_quads(self):
        return self.partition[-1][1] if self.partition else 0

    def check(self, tile):
        pos = 0
        for r0, r1 in self.partition:
            if r0 != pos or r1 <= r0:
                raise PlanError("bands must be contiguous, disjoint and non-empty")
            pos = r1
        if pos != tile.height_quads:
            raise PlanError("plan covers {} quad rows, tile has {}".format(pos, tile.height_quads))


def make_plan(scheme, height_quads, threads=None):
    threads = threads or max_threads()
    return ExecPlan(scheme, threads, partition(height_quads, threads))


# -- boundary extension -------------------------------------------------------


def _mirror(lo, hi, n_quads, parity):
    """Quad indices for ``lo..hi-1`` under whole-sample symmetric extension."""
    n = 2 * n_quads
    period = 2 * (n - 1)
    p = 2 * np.arange(lo, hi) + parity
    p = np.mod(p, period)
    p = np.where(p >= n, period - p, p)
    return p // 2


def _extended(plane, c, r0, r1, ma, mb, mode):
    """Rows ``r0-mb .. r1+mb`` and columns ``-ma .. W+ma`` of one component plane."""
    h, w = plane.shape
    if not ma and not mb:
        return plane[r0:r1]
    py, px = _PARITY[c]
    lo, hi = r0 - mb, r1 + mb
    if mode is ExtensionMode.SYMMETRIC:
        ri = _mirror(lo, hi, h, py)
        ci = _mirror(-ma, w + ma, w, px)
        if lo >= 0 and hi <= h:
            return plane[lo:hi][:, ci]
        return plane[np.ix_(ri, ci)]
    out = np.zeros((hi - lo, w + 2 * ma), plane.dtype)
    s0, s1 = max(lo, 0), min(hi, h)
    if s1 > s0:
        out[s0 - lo:s1 - lo, ma:ma + w] = plane[s0:s1]
    return out


# -- access tracing -----------------------------------------------------------


class AccessTrace:
    """Records which rows of which buffer each worker touches per step.

    ``violations()`` lists reads of rows that a different worker writes in the
    same step; ``neighbour_reads`` counts neighbour-quad reads made by parts
    after the first of a composite step.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.reads = []  # (step, worker, buffer, r0, r1)
        self.writes = []
        self.neighbour_reads = 0
        self.barriers = 0

    def read(self, step, worker, buf, r0, r1):
        with self._lock:
            self.reads.append((step, worker, buf, r0, r1))

    def write(self, step, worker, buf, r0, r1):
        with self._lock:
            self.writes.append((step, worker, buf, r0, r1))

    def neighbour(self, n=1):
        with self._lock:
            self.neighbour_reads += n

    def barrier(self):
        with self._lock:
            self.barriers += 1

    def violations(self):
        found = []
        by_step = {}
        for rec in self.writes:
            by_step.setdefault((rec[0], rec[2]), []).append(rec)
        for step, worker, buf, r0, r1 in self.reads:
            for _, w_worker, _, w0, w1 in by_step.get((step, buf), ()):
                if w_worker != worker and r0 < w1 and w0 < r1:
                    found.append((step, worker, w_worker, buf, max(r0, w0), min(r1, w1)))
        return found


# -- step execution -----------------------------------------------------------


def _accumulate(out, row, sources, tmp):
    if not row.copy and not row.terms:
        out[...] = 0
        return
    first = True
    for t in row.terms:
        view = sources(t)
        if first and not row.copy:
            np.multiply(view, t.coef, out=out)
        else:
            np.multiply(view, t.coef, out=tmp)
            np.add(out, tmp, out=out)
        first = False


def _run_step(src, dst, parts, r0, r1, mode, tmp, trace=None, step_no=0, worker=0):
    """Compute rows ``r0:r1`` of ``dst`` from snapshot ``src``."""
    h, w = src.shape[1:]
    head = parts[0]
    padded = {}
    for j, (ma, mb) in enumerate(head.margins):
        if any(t.src == j for row in head.rows for t in row.terms):
            padded[j] = (_extended(src[j], j, r0, r1, ma, mb, mode), ma, mb)
            if trace is not None:
                trace.read(step_no, worker, id(src), max(r0 - mb, 0), min(r1 + mb, h))
                if mb and mode is ExtensionMode.SYMMETRIC and (r0 - mb < 0 or r1 + mb > h):
                    # mirrored rows come from inside the tile
                    trace.read(step_no, worker, id(src), 0, min(h, 2 * mb + 1))
                    trace.read(step_no, worker, id(src), max(0, h - 2 * mb - 1), h)

    def snapshot_source(t):
        arr, ma, mb = padded[t.src]
        return arr[mb + t.b:mb + t.b + (r1 - r0), ma + t.a:ma + t.a + w]

    for i, row in enumerate(head.rows):
        out = dst[i, r0:r1]
        if row.copy:
            out[...] = src[i, r0:r1]
            if trace is not None:
                trace.read(step_no, worker, id(src), r0, r1)
        _accumulate(out, row, snapshot_source, tmp)
    if trace is not None:
        trace.write(step_no, worker, id(dst), r0, r1)

    for part in parts[1:]:
        if trace is not None:
            if part.reads_neighbours:
                trace.neighbour()
            trace.read(step_no, worker, id(dst), r0, r1)
        cur = dst[:, r0:r1].copy()

        def inflight_source(t, cur=cur):
            return cur[t.src]

        for i, row in enumerate(part.rows):
            if row.passthrough:
                continue
            out = dst[i, r0:r1]
            if row.copy:
                out[...] = cur[i]
            _accumulate(out, row, inflight_source, tmp)


def apply_step(tile, step, band):
    """Apply one :class:`Step` to quad rows ``band = (r0, r1)`` of ``tile``.

    Returns the new ``(4, r1 - r0, width_quads)`` component values; ``tile``
    is left untouched.
    """
    r0, r1 = band
    if not 0 <= r0 < r1 <= tile.height_quads:
        raise PlanError("band {} outside tile".format(band))
    kernels = tuple(_lower_matrix(p) for p in step.parts)
    src = tile.planes()
    dst = np.empty_like(src)
    tmp = np.empty((r1 - r0, tile.width_quads), np.float32)
    _run_step(src, dst, kernels, r0, r1, tile.extension, tmp)
    return dst[:, r0:r1].copy()


# -- executor -----------------------------------------------------------------


class Engine:
    """Worker pool running :class:`ExecPlan` objects band-parallel.

    One caller at a time per engine; create several engines to transform
    tiles concurrently.
    """

    def __init__(self, threads=None):
        self.threads = threads or max_threads()
        self._pool = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="dwt")

    def close(self):
        self._pool.shutdown(wait=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def run(self, tile, plan, trace=None):
        plan.check(tile)
        bands = plan.partition
        if len(bands) > self.threads:
            raise PlanError("plan needs {} workers, engine has {}".format(len(bands), self.threads))
        h, w = tile.height_quads, tile.width_quads
        bufs = [np.empty((4, h, w), np.float32), np.empty((4, h, w), np.float32)]
        out = QuadField.zeros(w, h, tile.extension)
        barrier = threading.Barrier(len(bands))

        def sync():
            barrier.wait()
            if trace is not None:
                trace.barrier()

        def worker(k, r0, r1):
            try:
                tmp = np.empty((r1 - r0, w), np.float32)
                src, dst = bufs
                for c in range(4):
                    py, px = _PARITY[c]
                    src[c, r0:r1] = tile.data[2 * r0 + py:2 * r1:2, px::2]
                sync()
                for n, parts in enumerate(plan.kernels):
                    _run_step(src, dst, parts, r0, r1, tile.extension, tmp, trace, n, k)
                    sync()
                    src, dst = dst, src
                for c in range(4):
                    py, px = _PARITY[c]
                    out.data[2 * r0 + py:2 * r1:2, px::2] = src[c, r0:r1]
            except BaseException:
                barrier.abort()
                raise

        if len(bands) == 1:
            worker(0, *bands[0])
            return out
        futures = [self._pool.submit(worker, k, r0, r1) for k, (r0, r1) in enumerate(bands)]
        errors = []
        for f in futures:
            exc = f.exception()
            if exc is not None and not isinstance(exc, threading.BrokenBarrierError):
                errors.append(exc)
        if errors:
            raise errors[0]
        for f in futures:
            f.result()
        return out


def forward(tile, plan, trace=None):
    with Engine(plan.threads) as eng:
        return eng.run(tile, plan, trace)


def inverse(tile, plan, trace=None):
    inv = ExecPlan(invert(plan.scheme), plan.threads, plan.partition)
    with Engine(plan.threads) as eng:
        return eng.run(tile, inv, trace)
