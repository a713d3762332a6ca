"""Energy-efficient shortcuts for qubit Hamiltonian protocols.

Counterdiabatic driving, the analytic minimal-energy (QOSTE) drive, and
ensemble-robust GRAPE controls at fixed energy for two-level systems.
"""
from .errors import (AntipodalTarget, ConfigError, DegenerateHamiltonian, NotNormalized, OutOfRange,
                     QShortcutError, WrongProtocolKind, ZeroCoupling, ZeroWaveform)
from .grape import (GrapeOptions, RobustControl, RobustnessEnsemble, avg_fidelity, fidelity_scan,
                    grad_avg_fidelity, make_ensemble, optimize, project_energy, scan_etas, tradeoff_sweep)
from .propagation import TimeGrid, Trajectory, UnitaryPath, fidelity, propagate_state, propagate_u
from .protocols import BoundaryData, LandauZener, Protocol, Tabulated, boundaries, eval_h0, lz_protocol
from .qoste import (ChainReport, PathGeometry, QosteSolution, SlopeEstimate, cost_chain_check, final_bloch,
                    path_geometry, qoste_solution, ratio_scaling)
from .qubit_core import EigenFrame, PauliCoeffs, bloch_of, compose, decompose, eig2, expi
from .sta_cd import ControlWaveform, cd_cost_lz, cd_drive_general, cd_drive_lz, driven_coeffs, energy_cost

__version__ = "0.1.0"
