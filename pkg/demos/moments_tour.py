"""Twisted first and second moments of central values, with and without a mollifier.

Run: python3 demos/moments_tour.py
"""
from rootmoments import build_mollifier, central_family, first_moment, mollified_first, mollified_second, second_moment
from rootmoments.arith import get_context
from rootmoments.kloosterman import kl_tables
from rootmoments.moments import afe_decomposition

# eps(chi)^-1 L(chi) = L(conj chi) on even characters, so the k=0 and k=-1 columns coincide at m=1
print("first moment A(1, k) / phi+")
print("    q      k=0      k=-1     k=1      k=3")
for q in (101, 401, 1009, 4001):
    fam = central_family(q)
    row = [first_moment(fam, 1, k).computed / len(fam) for k in (0, -1, 1, 3)]
    print(f"{q:>5} " + " ".join(f"{z.real:8.4f}" for z in row))

fam = central_family(1009)
b0 = second_moment(fam, 1, 1, 0)
print(f"\nsecond moment at q=1009: B(1,1,0) = {b0.computed.real:.2f}, main term {b0.predicted_main.real:.2f}")
for k in (1, 2, 3):
    print(f"  |B(1,1,{k})| = {abs(second_moment(fam, 1, 1, k).computed):.2f}")

# splitting B(1,1,2) into Kloosterman pieces and putting it back together
fam101 = central_family(101)
d = afe_decomposition(fam101, 1, 1, 2, tables=kl_tables(get_context(101), [1, 2, 3]))
print(f"\nq=101, k=2: B1..B4 = {[round(abs(z), 3) for z in (d.B1, d.B2, d.B3, d.B4)]}")
print(f"  recombined {d.recombined.real:.10f}  direct {d.direct.real:.10f}")

print("\nmollified moments, alpha = 0.2")
print("    q   M    C(0)/phi+   D(0)/phi+   (1+1/alpha_eff)")
for q in (1009, 4001, 10007):
    fam = central_family(q)
    ms = build_mollifier(q, 0.2)
    c0 = mollified_first(fam, ms, 0)
    d0 = mollified_second(fam, ms, 0)
    a_eff = d0.params["alpha_eff"]
    print(f"{q:>5} {ms.M:>3} {c0.computed.real / len(fam):11.4f} {d0.computed.real / len(fam):11.4f} {1 + 1 / a_eff:12.2f}")
