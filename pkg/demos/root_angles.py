"""Root numbers of even characters and how their angles spread out.

Run: python3 demos/root_angles.py
"""
import numpy as np

from rootmoments import central_family, angle_equidistribution
from rootmoments.arith import get_context
from rootmoments.characters import Character, gauss_sum_and_angle

# quadratic characters have real Gauss sums, so theta = 0
for q, a in [(5, 2), (13, 6)]:
    g = gauss_sum_and_angle(Character(get_context(q), a))
    print(f"q={q:>3} a={a}: tau={g.tau:.6f}  eps={g.eps:.6f}  theta={g.theta:.3g}")

print()
print("    q   phi+      KS   |mean eps|   bin counts (10 bins)")
for q in (101, 1009, 10007):
    fam = central_family(q)
    e = angle_equidistribution(fam, bins=10)
    print(f"{q:>5} {len(fam):>6} {e.ks_statistic:7.4f} {abs(e.mean_vector):10.4f}   {e.counts.tolist()}")

# the KS distance falls roughly like phi+^(-1/2), which is what random angles would do
fam = central_family(10007)
print("\nsqrt(phi+) * KS at q=10007:", round(np.sqrt(len(fam)) * angle_equidistribution(fam).ks_statistic, 3))
