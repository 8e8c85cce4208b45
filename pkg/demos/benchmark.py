"""
A small timing sweep
====================

Median ns per pixel over a few runs for each scheme.  Numbers depend on the
machine; the interesting part is the ratio to separable lifting.
"""

import sys

from wavelift import bench

runs = int(sys.argv[1]) if len(sys.argv) > 1 else 5

cfg = bench.BenchConfig("tilesize", runs=runs, warmup_runs=1, size_list=[256, 512])
report = bench.run(cfg)
print(report.summary())

# ratios above 1 mean faster than separable lifting
for key, ratio in sorted(report.speedups().items()):
    print(key, round(ratio, 3))
