"""Walk through the cost hierarchy: counterdiabatic cost, the path-length bound
from the adiabatic ground path, and the geodesic bound that QOSTE saturates.
Also checks the chain for a random smooth tabulated protocol.
"""
import numpy as np

from qshortcut import Tabulated, TimeGrid, cost_chain_check, lz_protocol

p = lz_protocol(-10.0, 20.0, 1.0, 1.0)
rep = cost_chain_check(p, TimeGrid(p.t_f, 100_000))
for k, v in rep.to_dict().items():
    print(f"{k:>26}: {v}")

# a smooth random protocol with a gapped spectrum
rng = np.random.default_rng(7)
t = np.linspace(0.0, 2.0, 200)
cx = 1.0 + 0.3 * np.sin(2 * np.pi * t / 2.0 + rng.uniform(0, 2 * np.pi))
cz = -3.0 + 3.0 * t + 0.2 * np.cos(3 * t)
vals = np.column_stack([np.zeros_like(t), cx, np.zeros_like(t), cz])
rep = cost_chain_check(Tabulated(t, vals), TimeGrid(2.0, 20_000))
print("\nrandom protocol chain holds:", rep.chain_holds)
