"""Optimal pilot energies versus channel block length.

Longer coherence blocks harvest more per block, so more pilot energy is
affordable; both phases' optimal budgets grow with the block length, and
the refinement pilots (phase 2) dwarf the per-band probing pilots
(phase 1), which must stretch across hundreds of bands.
"""

from dataclasses import replace

from wetopt import SystemParams, optimizer

base = SystemParams(m=10, n=866, n2=16, ps=0.06, eta=0.8, t=1e-3, beta=1e-6, n0=1e-19)

print(__doc__)
for m in (10, 20):
    print(f"\n{m} antennas:")
    print("  block (ms) | probed bands | e1 per band | e2 rank-1 | net power")
    for t_ms in (0.1, 0.5, 1.0, 5.0, 20.0, 100.0):
        p = replace(base, m=m, t=t_ms * 1e-3)
        sol = optimizer.optimize_training(p)
        print(
            f"  {t_ms:9.1f} | {sol.plan.n1:12d} | {sol.plan.e1 * 1e12:8.3f} pJ "
            f"| {sol.plan.e2[0] * 1e12:6.2f} pJ | {sol.qnet_star / p.t * 1e6:7.3f} uW"
        )
