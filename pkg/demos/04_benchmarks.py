"""
Timing the detectors
====================

Reproduce the shape of the CFAR speedup table and the per-step pipeline
table on this machine.  Absolute numbers depend on the host.  The speedup
grows with the number of training cells; with this small map and few
repetitions, rows flagged noisy can swap places.
"""

from uwbcfar import generate_scene
from uwbcfar.bench import BenchSpec, bench_cfar, bench_pipeline, to_text

# a smaller map and fewer repetitions keep this quick
spec = BenchSpec(map_rows=512, map_cols=300, repetitions=5, warmup=1)
report = bench_cfar(spec, seed=1)
print(to_text(report, "cfar"))

for row in report.cfar_rows:
    print("g=%d b=%d  N=%4d  speedup %.1f:1" % (row.guard, row.background, row.n_train, row.ratio))

frame, _ = generate_scene()
print(to_text(bench_pipeline(frame, repetitions=3, warmup=1), "pipeline"))
