"""Optimise drives that tolerate a systematic amplitude error eta, at fixed
energy cost, and trace the cost/robustness frontier.

GRAPE runs on a 200-step grid, warm-started from the geodesic waveform and
then from the previous frontier point.
"""
from qshortcut import (GrapeOptions, TimeGrid, avg_fidelity, cd_cost_lz, cd_drive_lz, fidelity_scan,
                       lz_protocol, make_ensemble, qoste_solution, scan_etas, tradeoff_sweep)

p = lz_protocol(-10.0, 20.0, 1.0, 1.0)
grid = TimeGrid(p.t_f, 200)
ens = make_ensemble(0.15, 7)
sol = qoste_solution(p, grid)
cd = cd_drive_lz(p, grid)

print(f"baseline  QOSTE  F_bar = {avg_fidelity(sol.waveform, p, ens, grid)[0]:.5f}")
print(f"baseline  CD     F_bar = {avg_fidelity(cd, p, ens, grid)[0]:.5f}")

costs = sorted([sol.cost * r for r in (1.0, 2.71, 3.87, 8.0)] + [cd_cost_lz(p)])
frontier, controls = tradeoff_sweep(p, ens, grid, costs, sol.waveform, GrapeOptions(max_iters=3000))
for pt in frontier:
    print(f"C/C_qoste = {pt.cost / sol.cost:5.2f}   F_bar = {pt.avg_fidelity:.6f}   iters = {pt.iterations}")

etas = scan_etas(0.15, 201)
i_cd = costs.index(cd_cost_lz(p))
print("worst-case infidelity at the CD cost:")
print(f"  CD    {1 - fidelity_scan(cd, p, etas).min():.3e}")
print(f"  GRAPE {1 - fidelity_scan(controls[i_cd].waveform, p, etas).min():.3e}")
