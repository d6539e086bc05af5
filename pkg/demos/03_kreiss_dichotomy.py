#!/usr/bin/env python3
"""Resolvent functionals and the order dichotomy on a Jordan block.

At the 2x2 Jordan block with eigenvalue 1 the resolvent blows up like
(lambda-1)^{-2}, so the order-0 weighted functional doubles with every grid
refinement step while the order-1 functional settles.  The rotated Cesaro
means show the matching dichotomy: n^0-normalized means grow like n/2,
n^{-1}-normalized means plateau at 1/2.
"""

from ergolab import (
    AnnulusGrid, jordan_block, kreiss_functional, mean_growth_functional,
    partial_sum_functional,
)

t = jordan_block(2, 1.0)

print("=== weighted resolvent sup per radius ring (r = 0) ===")
rep = kreiss_functional(t, 0, AnnulusGrid.dyadic(10, 64))
for (radius, value), (_, nxt) in zip(rep.radius_profile, rep.radius_profile[1:]):
    print(f"  radius {radius:.6f}: {value:10.2f}   (next/this = {nxt / value:.3f})")
print(f"  -> divergence signature: the ratio locks onto 2")

print()
print("=== the same functional at order r = 1 ===")
for kmax in (6, 8, 10):
    rep = kreiss_functional(t, 1, AnnulusGrid.dyadic(kmax, 64))
    print(f"  kmax={kmax:>2}: value {rep.value:.6f}")
print("  -> stable under refinement: order 1 is the right weight")

print()
print("=== rotated mean growth ===")
rep0 = mean_growth_functional(t, 1, 0, 128, 8)
rep1 = mean_growth_functional(t, 1, 1, 512, 8)
print(f"  r=0: sup over n<=128 is {rep0.value:.1f}  (grows like n/2)")
print(f"  r=1: raw sup {rep1.value:.3f} at n={rep1.argmax['n']}, "
      f"trailing-half plateau {rep1.tail_value:.3f}")

print()
print("=== partial sums of the resolvent expansion ===")
ps = partial_sum_functional(t, 1, 64, AnnulusGrid.dyadic(8, 32))
print(f"  order-1 weighted partial sums: sup {ps.value:.3f} "
      f"at n={ps.argmax['n']}, radius {ps.argmax['radius']:.4f}")
