"""Ordered channel gains: what picking the best of many bands is worth.

The core quantity of the whole library: among n1 independent
Rayleigh-faded sub-bands seen by an m-antenna array, the expected squared
channel norm of the rank-n band, in units of the single-band mean.  Three
independent evaluation routes (exact finite sums, adaptive quadrature of
the survival function, plain Monte Carlo) must and do agree.
"""

import numpy as np

from wetopt import gain_closed_form, gain_monte_carlo, gain_quadrature, gains_up_to

print(__doc__)

print("Route agreement at (rank=1, n1=8, m=2):")
closed = gain_closed_form(1, 8, 2)
quad = gain_quadrature(1, 8, 2)
mc, se = gain_monte_carlo(1, 8, 2, trials=400_000, seed=1)
print(f"  closed form : {closed:.9f}")
print(f"  quadrature  : {quad:.9f}   (rel diff {abs(quad - closed) / closed:.1e})")
print(f"  monte carlo : {mc:.6f} +- {se:.6f}   (z = {(mc - closed) / se:+.2f})")

print("\nDiversity grows only logarithmically with the number of bands")
print("(record gain over the mean, single antenna):")
for n1 in (2, 8, 32, 128, 512):
    print(f"  n1={n1:4d}: gain/mean = {gain_quadrature(1, n1, 1):.3f}")

print("\n...but linearly with the antenna count (n1 = 10, top three ranks):")
print("    m | rank1/m  rank2/m  rank3/m")
for m in (1, 2, 4, 8, 16, 32):
    g = gains_up_to(3, 10, m)
    print(f"  {m:3d} |  {g[0] / m:.3f}    {g[1] / m:.3f}    {g[2] / m:.3f}")

print("\nSanity: ranks of one population sum to the unordered total n1*m:")
g = gains_up_to(6, 6, 3)
print(f"  sum over 6 ranks at (n1=6, m=3): {np.sum(g):.12f} (expect 18)")
