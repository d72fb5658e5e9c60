"""
The oscillatory problem: eps rows against lambda columns
========================================================

In the rescaled time r = eps^(2p) t the solution oscillates on a scale
eps^(2p).  The step lambda must resolve that scale.  Cells with
lambda <= eps^2 show clean second-order convergence.  Cells to the left
of the diagonal are under-resolved and carry large errors.

A 3x3 corner of the table on a coarser grid keeps the script quick.
"""

import numpy as np

from fracklein.harness import oscillatory_table_spec, run_oscillatory_table

spec = oscillatory_table_spec(2.0, rows=3, cols=3, N=64)
(table,) = run_oscillatory_table(spec)

for row in table.layout_rows():
    print("  ".join(f"{c:>10}" for c in row))

# orders on and right of the diagonal
i, j = np.triu_indices(3, 1)
print("upper-triangle orders:", np.round(table.order[i, j], 2))
