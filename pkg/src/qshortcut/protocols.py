"""Uncontrolled drift protocols ``H0(t)`` as time-dependent Pauli coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfRange, ZeroCoupling
from .qubit_core import EigenFrame, as_coeffs, eig2

_T_TOL = 1e-12


class Protocol:
    """Base class: a drift Hamiltonian on ``[0, t_f]``.

    Subclasses implement :meth:`coeffs`, vectorized over ``t``.
    """

    t_f: float

    def coeffs(self, t) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t) -> np.ndarray:
        return self.eval(t)

    def eval(self, t) -> np.ndarray:
        """Pauli coefficients at time(s) ``t``; shape ``t.shape + (4,)``."""
        t = np.asarray(t, dtype=float)
        tol = _T_TOL * max(self.t_f, 1.0)
        if np.any(t < -tol) or np.any(t > self.t_f + tol):
            raise OutOfRange(f"t outside [0, {self.t_f}]")
        return self.coeffs(np.clip(t, 0.0, self.t_f))


@dataclass(frozen=True)
class LandauZener(Protocol):
    """Linear sweep ``H0(t) = (delta0 + delta_d t/t_f) Z + omega X``."""

    delta0: float
    delta_d: float
    omega: float
    t_f: float

    def __post_init__(self):
        if self.omega == 0:
            raise ZeroCoupling("Landau-Zener coupling omega must be nonzero")
        if not self.t_f > 0:
            raise ValueError("t_f must be positive")

    @property
    def delta_dot(self) -> float:
        return self.delta_d / self.t_f

    def detuning(self, t):
        return self.delta0 + self.delta_d * np.asarray(t, dtype=float) / self.t_f

    def coeffs(self, t):
        d = self.detuning(t)
        out = np.zeros(d.shape + (4,))
        out[..., 1] = self.omega
        out[..., 3] = d
        return out

    def with_duration(self, t_f: float) -> "LandauZener":
        return LandauZener(self.delta0, self.delta_d, self.omega, t_f)


@dataclass(frozen=True, eq=False)
class Tabulated(Protocol):
    """Protocol sampled on a time table, linearly interpolated per coefficient."""

    times: np.ndarray
    values: np.ndarray
    t_f: float = field(init=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = as_coeffs(self.values)
        if times.ndim != 1 or values.shape != (times.size, 4):
            raise ValueError("times must be 1-d and values of shape (len(times), 4)")
        if times.size < 2:
            raise ValueError("a tabulated protocol needs at least two samples")
        if times[0] != 0.0:
            raise ValueError("first tabulated time must be 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("tabulated times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t_f", float(times[-1]))

    @classmethod
    def from_protocol(cls, p: Protocol, n_samples: int) -> "Tabulated":
        t = np.linspace(0.0, p.t_f, n_samples)
        return cls(t, p.eval(t))

    def coeffs(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (4,))
        for k in range(4):
            out[..., k] = np.interp(t, self.times, self.values[:, k])
        return out


def lz_protocol(delta0, delta_d, omega, t_f) -> LandauZener:
    return LandauZener(float(delta0), float(delta_d), float(omega), float(t_f))


def eval_h0(p: Protocol, t) -> np.ndarray:
    return p.eval(t)


@dataclass(frozen=True)
class BoundaryData:
    """Initial and final eigen-data of a protocol.

    ``omega_i`` and ``omega_f`` are half the spectral gaps; ``e_*`` / ``g_*``
    the excited / ground states.  ``theta_i`` and ``theta_f`` are only set for
    Landau-Zener sweeps.
    """

    omega_i: float
    omega_f: float
    e_i: np.ndarray
    g_i: np.ndarray
    e_f: np.ndarray
    g_f: np.ndarray
    theta_i: float | None = None
    theta_f: float | None = None


def lz_mixing_angle(delta, omega) -> float:
    """Mixing angle of ``delta Z + omega X``: ``arctan(omega/delta) + pi/2 (1 - sign delta)``."""
    if delta == 0:
        return np.pi / 2 if omega > 0 else 3 * np.pi / 2
    return float(np.arctan(omega / delta) + np.pi / 2 * (1 - np.sign(delta)))


def _frame_states(fr: EigenFrame):
    return fr.v_plus, fr.v_minus


def boundaries(p: Protocol) -> BoundaryData:
    """Eigen-data at ``t = 0`` and ``t = t_f``.

    For a :class:`LandauZener` sweep the states are the analytic
    ``cos(theta/2)|1> + sin(theta/2)|0>`` forms, cross-checked against the
    numerical eigenframes.
    """
    fr_i = eig2(p.eval(0.0))
    fr_f = eig2(p.eval(p.t_f))
    e_i, g_i = _frame_states(fr_i)
    e_f, g_f = _frame_states(fr_f)
    theta_i = theta_f = None
    if isinstance(p, LandauZener):
        theta_i = lz_mixing_angle(p.delta0, p.omega)
        theta_f = lz_mixing_angle(p.delta0 + p.delta_d, p.omega)
        states = []
        for th, fr in ((theta_i, fr_i), (theta_f, fr_f)):
            e = np.array([np.cos(th / 2), np.sin(th / 2)], dtype=complex)
            g = np.array([-np.sin(th / 2), np.cos(th / 2)], dtype=complex)
            if abs(abs(np.vdot(e, fr.v_plus)) - 1) > 1e-10:
                raise AssertionError("analytic LZ eigenstate disagrees with eig2")
            states.append((e, g))
        (e_i, g_i), (e_f, g_f) = states
    return BoundaryData(fr_i.splitting, fr_f.splitting, e_i, g_i, e_f, g_f, theta_i, theta_f)
