"""Hyper-Kloosterman sums: one FFT per order, checked against brute force.

Run: python3 demos/kloosterman_tables.py
"""
import math
import time

import numpy as np
from sympy import nextprime

from rootmoments.arith import get_context
from rootmoments.kloosterman import classical_kloosterman, correlation_diagnostics, kl_all, kl_point

ctx = get_context(101)
for k in range(1, 6):
    t = kl_all(k, ctx)
    line = f"k={k}: max|Kl_k| = {t.max_abs():.4f} (bound {k})"
    if k <= 4:  # brute force costs 100^(k-1) terms per point
        spot = max(abs(t(x) - kl_point(k, x, 101)) for x in (1, 2, 50, 100))
        line += f", brute-force diff {spot:.1e}"
    print(line)

print("\nS(1,1;5) =", round(classical_kloosterman(1, 1, 5).real, 6), " 2+2cos(4pi/5) =", round(2 + 2 * math.cos(4 * math.pi / 5), 6))

q = nextprime(10**5)
ctx_big = get_context(q)
t0 = time.perf_counter()
t4 = kl_all(4, ctx_big)
print(f"\nKl_4 mod {q}: all {q - 1} values in {time.perf_counter() - t0:.2f} s, max {t4.max_abs():.3f}")

# the value distribution of Kl_2 follows Sato-Tate: mean of |Kl_2|^2 is 1
vals = kl_all(2, ctx_big).values.real
print("mean Kl_2^2 =", round(float(np.mean(vals**2)), 4))

print("\n    q   W/(k^2 H q)   V2/log^2 q")
for q in (101, 401, 1009):
    r = correlation_diagnostics(get_context(q), 3, 1, int(math.isqrt(q)), q**0.55, q**0.45)
    print(f"{q:>5} {r.w_ratio:12.4f} {r.v2_ratio:12.4f}")
