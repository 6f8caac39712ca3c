"""
Rectangle sums from a summed-area table
=======================================

A summed-area table turns any axis-aligned rectangle sum into four lookups.
"""

import numpy as np

from uwbcfar import build_sat, region_sum

rng = np.random.default_rng(7)
x = rng.random((6, 8))

sat = build_sat(x)
print("table shape:", sat.table.shape, " total:", sat.total, " direct:", x.sum())

# inclusive bounds, rows 1..3 and cols 2..6
fast = region_sum(sat, 1, 3, 2, 6)
slow = x[1:4, 2:7].sum()
print("rectangle sum  table: %.15f  direct: %.15f" % (fast, slow))

# every rectangle costs the same, however large it is
for size in (1, 3, 5):
    print("%dx%d at (0,0):" % (size, size), region_sum(sat, 0, size - 1, 0, size - 1))

# out-of-range requests are refused, not wrapped
try:
    region_sum(sat, 0, 6, 0, 0)
except IndexError as err:
    print("refused:", err)
