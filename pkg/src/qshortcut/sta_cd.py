"""Counterdiabatic drives and the control energy cost."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateHamiltonian, WrongProtocolKind
from .propagation import TimeGrid
from .protocols import LandauZener, Protocol
from .qubit_core import DEGENERACY_RTOL


@dataclass(frozen=True, eq=False)
class ControlWaveform:
    """Piecewise-constant control ``V(t) = omega_i v(t).sigma``.

    ``v[k]`` is the dimensionless control triple applied on
    ``[t_k, t_{k+1})``.
    """

    grid: TimeGrid
    v: np.ndarray
    omega_i: float

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (self.grid.n_steps, 3):
            raise ValueError(f"waveform must have shape ({self.grid.n_steps}, 3), got {v.shape}")
        if not self.omega_i > 0:
            raise ValueError("omega_i must be positive")
        object.__setattr__(self, "v", v)

    @property
    def cost(self) -> float:
        return energy_cost(self)

    def scaled(self, factor: float) -> "ControlWaveform":
        return ControlWaveform(self.grid, factor * self.v, self.omega_i)

    def coeffs(self, scale: float = 1.0) -> np.ndarray:
        """Pauli coefficients ``(0, omega_i * scale * v)`` per step."""
        out = np.zeros((self.grid.n_steps, 4))
        out[:, 1:] = (self.omega_i * scale) * self.v
        return out

    @classmethod
    def zeros(cls, grid: TimeGrid, omega_i: float) -> "ControlWaveform":
        return cls(grid, np.zeros((grid.n_steps, 3)), omega_i)


def initial_splitting(p: Protocol) -> float:
    """Half the spectral gap of ``H0(0)``, the energy scale ``omega_i``."""
    return float(np.linalg.norm(p.eval(0.0)[1:]))


def energy_cost(w: ControlWaveform) -> float:
    """``(omega_i / 2) * sum_k |v_k|^2 dt``.

    For ``V = omega_i v.sigma`` this is ``(1 / 4 omega_i) int ||V||_F^2 dt``.
    """
    return 0.5 * w.omega_i * float(np.sum(w.v * w.v)) * w.grid.dt


def driven_coeffs(p: Protocol, w: ControlWaveform, eta: float = 0.0) -> np.ndarray:
    """Step coefficients of ``H0 + (1 + eta) V`` at the step midpoints."""
    return p.eval(w.grid.midpoints) + w.coeffs(1.0 + eta)


def _check_gap(c: np.ndarray) -> None:
    gap = np.linalg.norm(c[..., 1:], axis=-1)
    if np.any(gap <= DEGENERACY_RTOL * np.maximum(np.abs(c[..., 0]), 1.0)):
        raise DegenerateHamiltonian("H0 is degenerate on the grid; the CD drive is undefined")


def cd_field(h: np.ndarray, h_dot: np.ndarray) -> np.ndarray:
    """Counterdiabatic field vector ``(h x h_dot) / (2 |h|^2)`` for traceless parts ``h``."""
    return np.cross(h, h_dot) / (2 * np.sum(h * h, axis=-1)[..., None])


def cd_drive_general(p: Protocol, grid: TimeGrid) -> ControlWaveform:
    """Counterdiabatic drive of an arbitrary qubit protocol.

    The field is evaluated at step midpoints, with the time derivative taken
    as the centred difference of the grid-node values around each midpoint.
    """
    omega_i = initial_splitting(p)
    nodes = p.eval(grid.times)
    mids = p.eval(grid.midpoints)
    _check_gap(nodes)
    _check_gap(mids)
    h_dot = np.diff(nodes[:, 1:], axis=0) / grid.dt
    return ControlWaveform(grid, cd_field(mids[:, 1:], h_dot) / omega_i, omega_i)


def _require_lz(p):
    if not isinstance(p, LandauZener):
        raise WrongProtocolKind(f"expected a LandauZener protocol, got {type(p).__name__}")


def cd_drive_lz(p: LandauZener, grid: TimeGrid) -> ControlWaveform:
    """Closed-form LZ drive ``-(delta_dot omega) / (2 (delta^2 + omega^2)) Y`` at step midpoints."""
    _require_lz(p)
    omega_i = initial_splitting(p)
    d = p.detuning(grid.midpoints)
    v = np.zeros((grid.n_steps, 3))
    v[:, 1] = -p.delta_dot * p.omega / (2 * (d * d + p.omega**2)) / omega_i
    return ControlWaveform(grid, v, omega_i)


def cd_cost_lz(p: LandauZener) -> float:
    """LZ counterdiabatic cost ``(1/2 omega_i) int omega^2 delta_dot^2 / (4 (delta^2 + omega^2)^2) dt``."""
    _require_lz(p)
    if p.delta_d == 0:
        return 0.0
    omega_i = initial_splitting(p)
    w2 = p.omega**2
    dd2 = p.delta_dot**2

    def integrand(t):
        d = p.delta0 + p.delta_d * t / p.t_f
        return w2 * dd2 / (4 * (d * d + w2) ** 2)

    # the integrand peaks where the sweep crosses zero detuning
    points = None
    t_cross = -p.delta0 / p.delta_d * p.t_f
    if 0 < t_cross < p.t_f:
        points = [t_cross]
    val, _ = integrate.quad(integrand, 0.0, p.t_f, points=points, epsabs=0.0, epsrel=1e-11, limit=200)
    return val / (2 * omega_i)
