"""Lengthen the sweep and watch the CD/QOSTE cost ratio grow.

The log-log slope over omega*t_f in {20, 40, 80, 160} comes out well above 2,
because at these durations the geodesic cost is still suppressed by the
exponentially small Landau-Zener transition amplitude.
"""
from qshortcut import lz_protocol, ratio_scaling

est = ratio_scaling(lambda tf: lz_protocol(-10.0, 20.0, 1.0, tf), [20.0, 40.0, 80.0, 160.0])
for tf, a, b, r in zip(est.t_f, est.c_cd, est.c_qoste, est.ratios):
    print(f"omega*t_f = {tf:6.1f}   C_cd = {a:.4e}   C_qoste = {b:.4e}   ratio = {r:.3e}")
print(f"fitted slope: {est.slope:.3f}")
