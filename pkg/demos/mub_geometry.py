"""Look at the d+1 bases directly: overlaps, and how X^x Z^y style shifts move labels."""

import numpy as np

from mubqss.qudit import apply_xy, inner_product, mub_basis, mub_vector, verify_mub_family

d = 5
B0, B1 = mub_basis(d, 0), mub_basis(d, 1)
print("|<v_l^(0)|v_m^(1)>|^2 for d=5 (should all be 1/5):")
print(np.round(np.abs(B0.conj() @ B1.T) ** 2, 6))

v = mub_vector(d, (2, 1))
w = apply_xy(v, 3, 4)
target = mub_vector(d, ((2 + 4) % d, (1 + 3) % d))
print(f"U_(3,4) |v_1^(2)> = |v_4^(1)> ?  overlap {abs(inner_product(target, w)):.12f}")

for d in (3, 5, 7, 11, 13):
    bad, summary = verify_mub_family(d, 1e-10)
    worst = max(v for k, v in summary.items() if k.startswith("max_"))
    print(f"d={d:2d}: {summary['bases']} bases, worst deviation {worst:.1e}, {len(bad)} violations")
