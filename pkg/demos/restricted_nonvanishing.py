"""Non-vanishing with the root angle pinned to an arc.

Smooth weights f on the circle turn the angle restriction into a sum of
twisted moments; the counts below restrict directly.

Run: python3 demos/restricted_nonvanishing.py
"""
from rootmoments import BumpSpec, build_mollifier, central_family, nonvanishing_count, smoothed_moments
from rootmoments.bumps import family_condition_check, fourier_tail_index, shrinking_family_threshold
from rootmoments.nonvanish import c_eta, shrinking_sweep

q = 1009
fam = central_family(q)
ms = build_mollifier(q, 0.2)
bump = BumpSpec(0.1, 0.0, 0.5)
sm = smoothed_moments(fam, ms, bump)
print(f"f = {bump.label()}, int f = {bump.integral():.4f}, Fourier terms |k| <= {fourier_tail_index(bump)}")
print(f"  C direct {sm.C.computed.real:.6f}{sm.C.computed.imag:+.6f}i   Fourier {sm.C.params['fourier']:.6f}")
print(f"  D direct {sm.D.computed.real:.6f}   plateau {sm.D.params['plateau_sum']:.3f}   arc {sm.D.params['arc_sum']:.3f}")

# the 20th-derivative condition only holds for astronomically large q
print("\ncondition check at q=1009:", family_condition_check(bump, q, 0.01))
print("log10 q needed for mu = q^(-1/960):", round(shrinking_family_threshold(0.1, 1.0, 1 / 960, 0.0), 1))

q = 10007
fam = central_family(q)
r = nonvanishing_count(fam, (0.0, 1.0), 0.01)
print(f"\nq={q}: {r.count} of {r.family_in_window} even characters have |L| > {r.threshold:.4f}; proportion {r.proportion:.4f}")
for eta in (1 / 960, 0.9 / 480):
    reps = shrinking_sweep(fam, eta, [0.0, 0.25, 0.5, 0.75], 0.01)
    print(f"eta={eta:.5f} (c(eta)={c_eta(eta):.4f}), window {reps[0].mu:.4f}:",
          " ".join(f"{x.count}/{x.family_in_window}" for x in reps))
