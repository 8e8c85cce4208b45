import csv
import json

import numpy as np
import pytest

from wavelift import bench
from wavelift.bench import BenchAbort, BenchConfig, BenchConfigError
from wavelift.engine import ExtensionMode
from wavelift.schemes import SCHEME_NAMES
from wavelift.wavelets import LiftingPair, WaveletSpec, builtin


@pytest.mark.parametrize("kw", [
    dict(experiment="speed"),
    dict(experiment="threads", runs=2),
    dict(experiment="threads", warmup_runs=-1),
    dict(experiment="threads", schemes=["fast"]),
    dict(experiment="threads", thread_list=[0]),
    dict(experiment="tilesize", size_list=[31]),
    dict(experiment="image", tile_size=0),
])
def test_config_validation(kw):
    with pytest.raises(BenchConfigError):
        BenchConfig(**kw)


def test_config_defaults():
    assert BenchConfig("tilesize").size_list == [128, 256, 512, 1024, 2048, 4096]
    assert BenchConfig("image").size_list == [1024, 2048, 4096, 8192]
    cfg = BenchConfig("threads", extension="zero-pad")
    assert cfg.extension is ExtensionMode.ZERO
    assert cfg.thread_list[0] == 1 and cfg.runs == 100 and cfg.warmup_runs == 3


def test_time_runs_reports_median():
    calls = []
    ticks = iter([0, 10, 100, 130, 200, 220])
    orig = bench.time.perf_counter_ns
    bench.time.perf_counter_ns = lambda: next(ticks)
    try:
        med, lo, hi = bench._time_runs(lambda: calls.append(1), 3, 2, 10)
    finally:
        bench.time.perf_counter_ns = orig
    assert len(calls) == 5
    assert (med, lo, hi) == (2.0, 1.0, 3.0)


def test_threads_sweep(tmp_path):
    cfg = BenchConfig("threads", runs=3, warmup_runs=1, thread_list=[1, 2], size_list=[32])
    report = bench.run(cfg)
    assert len(report.rows) == 2 * len(SCHEME_NAMES)
    for r in report.rows:
        assert not r.skipped
        assert 0 < r.min_ns_per_pel <= r.median_ns_per_pel <= r.max_ns_per_pel
    path = tmp_path / "t.csv"
    report.write_csv(path)
    with open(path) as f:
        rows = list(csv.reader(f))
    assert rows[0] == bench.CSV_HEADER
    assert rows[1][:7] == ["threads", "sep-lifting", "cdf53", "1", "32", "32", "3"]
    meta = json.loads((tmp_path / "t.csv.meta.json").read_text())
    assert "usable_cpus" in meta
    sp = report.speedups()
    assert set(sp) == {(s, t, 32, 32) for s in SCHEME_NAMES[1:] for t in (1, 2)}
    assert "speedup" in report.summary()


def test_tilesize_and_image_sweeps():
    cfg = BenchConfig("tilesize", schemes=["ns-adapted"], runs=3, warmup_runs=0, threads=2,
                      size_list=[8, 16], wavelet="cdf97")
    rows = bench.run(cfg).rows
    assert [(r.width, r.threads, r.wavelet) for r in rows] == [(8, 2, "cdf97"), (16, 2, "cdf97")]
    cfg = BenchConfig("image", schemes=["sep-lifting"], runs=3, warmup_runs=0, threads=2,
                      size_list=[40], tile_size=16)
    (row,) = bench.run(cfg).rows
    assert (row.width, row.height) == (40, 40) and not row.skipped


def test_forward_image_uses_independent_tiles():
    from wavelift.engine import Engine, QuadField, forward, make_plan
    from wavelift.schemes import build

    s = build("ns-adapted", builtin("cdf53"))
    img = np.random.default_rng(2).random((24, 20), dtype=np.float32)
    out = np.empty_like(img)
    shapes = {(16, 16), (16, 4), (8, 16), (8, 4)}
    plans = {sh: make_plan(s, sh[0] // 2, 2) for sh in shapes}
    with Engine(2) as eng:
        bench.forward_image(img, out, 16, eng, plans, ExtensionMode.SYMMETRIC)
    tile = QuadField.from_pixels(img[16:, 16:])
    assert np.array_equal(out[16:, 16:], forward(tile, make_plan(s, 4, 1)).data)


def test_skipped_rows(monkeypatch):
    monkeypatch.setattr(bench, "_fits", lambda *a: False)
    cfg = BenchConfig("image", schemes=["sep-conv"], runs=3, size_list=[16], tile_size=8)
    (row,) = bench.run(cfg).rows
    assert row.skipped
    assert row.csv_values()[-3:] == ["skipped"] * 3


def test_zero_pad_passes_guard():
    bench.check_correctness("cdf97", SCHEME_NAMES, "zero-pad")


def test_abort_on_wrong_engine(monkeypatch):
    real = bench.build

    def broken(name, w):
        # swap in a different wavelet so the engine output no longer matches the oracle
        return real(name, WaveletSpec("other", [LiftingPair(w.pairs[0].predict, -w.pairs[0].update)]))

    monkeypatch.setattr(bench, "build", broken)
    bench._oracle_cache.clear()
    with pytest.raises(BenchAbort, match="oracle"):
        bench.run(BenchConfig("threads", runs=3, thread_list=[1], size_list=[16]))
