"""Drive a fast Landau-Zener sweep with the counterdiabatic field and with the
geodesic (QOSTE) field, then compare their energy costs and final fidelities.

Run with ``python demos/01_lz_shortcuts.py``.
"""
from qshortcut import (ControlWaveform, TimeGrid, boundaries, cd_drive_lz, driven_coeffs, energy_cost, fidelity,
                       lz_protocol, propagate_state, qoste_solution)

p = lz_protocol(delta0=-10.0, delta_d=20.0, omega=1.0, t_f=1.0)
grid = TimeGrid(p.t_f, 100_000)
bd = boundaries(p)

drives = {
    "bare sweep": ControlWaveform.zeros(grid, bd.omega_i),
    "counterdiabatic": cd_drive_lz(p, grid),
    "geodesic": qoste_solution(p, grid).waveform,
}

print(f"{'drive':<16}{'cost':>10}{'fidelity':>14}")
for name, w in drives.items():
    traj = propagate_state(driven_coeffs(p, w), grid, bd.e_i)
    print(f"{name:<16}{energy_cost(w):>10.5f}{fidelity(traj.final, bd.e_f):>14.10f}")

# Both shortcuts land on the target state; the geodesic one does so for
# roughly a sixth of the energy.
