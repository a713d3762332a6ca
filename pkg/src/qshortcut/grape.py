"""Ensemble-robust GRAPE at fixed control energy.

The controls are steered to maximize the ensemble-averaged fidelity

    F = mean_eta |<e_f| U_eta(t_f) |e_i>|^2,  H_eta = H0 + (1 + eta) omega_i v.sigma,

while the energy cost is held on a fixed value by rescaling after every
gradient step (projected gradient ascent on the cost sphere).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import ZeroWaveform
from .propagation import TimeGrid, cumulative_products, ordered_product
from .protocols import BoundaryData, Protocol, boundaries
from .qubit_core import IDENTITY, expi, expi_derivative
from .sta_cd import ControlWaveform, energy_cost

SCAN_POINTS = 201


@dataclass(frozen=True, eq=False)
class RobustnessEnsemble:
    epsilon: float
    n_eta: int
    etas: np.ndarray


def make_ensemble(epsilon: float, n_eta: int) -> RobustnessEnsemble:
    """Uniform grid of ``n_eta`` amplitude errors on ``[-epsilon, epsilon]``, endpoints and 0 included."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if int(n_eta) != n_eta or n_eta < 1:
        raise ValueError("n_eta must be a positive integer")
    if n_eta % 2 == 0:
        raise ValueError(f"n_eta must be odd so the grid contains eta = 0 (got {n_eta})")
    if epsilon == 0:
        return RobustnessEnsemble(0.0, 1, np.zeros(1))
    etas = np.linspace(-epsilon, epsilon, int(n_eta))
    etas[n_eta // 2] = 0.0
    return RobustnessEnsemble(float(epsilon), int(n_eta), etas)


class _EnsembleProblem:
    """Precomputed pieces shared by every fidelity / gradient evaluation."""

    def __init__(self, p: Protocol, etas, grid: TimeGrid, omega_i: float, bd: BoundaryData | None = None):
        self.grid = grid
        self.etas = np.asarray(etas, dtype=float)
        self.omega_i = omega_i
        self.h0 = p.eval(grid.midpoints)
        bd = boundaries(p) if bd is None else bd
        self.e_i = bd.e_i
        self.e_f = bd.e_f

    def coeffs(self, v):
        """Step coefficients for every eta, shape ``(n_eta, n_steps, 4)``."""
        amp = (1.0 + self.etas)[:, None, None] * self.omega_i
        out = np.broadcast_to(self.h0, (self.etas.size,) + self.h0.shape).copy()
        out[..., 1:] += amp * v
        return out

    def fidelities(self, v) -> np.ndarray:
        u = ordered_product(expi(self.coeffs(v), self.grid.dt))
        overlaps = (u @ self.e_i) @ np.conj(self.e_f)
        return np.abs(overlaps) ** 2

    def fidelities_and_gradient(self, v):
        c = self.coeffs(v)
        dt = self.grid.dt
        u = expi(c, dt)
        du = expi_derivative(c, dt)  # (n_eta, n, 3, 2, 2)
        prods = cumulative_products(u)  # P_j = U_j ... U_1
        final = prods[:, -1]
        n_eta = self.etas.size
        prev = np.concatenate([np.broadcast_to(IDENTITY, (n_eta, 1, 2, 2)), prods[:, :-1]], axis=1)
        psi = prev @ self.e_i  # state before step j
        # chi_j = U_{j+1}^dag ... U_n^dag e_f = P_j P_n^dag e_f
        back = np.conj(np.swapaxes(final, -1, -2)) @ self.e_f
        chi = np.einsum("enab,eb->ena", prods, back)
        overlap = (final @ self.e_i) @ np.conj(self.e_f)
        d_ov = np.einsum("ena,enkab,enb->enk", np.conj(chi), du, psi)
        scale = (1.0 + self.etas) * self.omega_i
        grad_each = 2 * np.real(np.conj(overlap)[:, None, None] * d_ov) * scale[:, None, None]
        fid = np.abs(overlap) ** 2
        return fid, grad_each


def _problem(w, p, ens, grid):
    if w.grid != grid:
        raise ValueError("waveform grid must match the propagation grid")
    etas = ens.etas if isinstance(ens, RobustnessEnsemble) else np.asarray(ens, dtype=float)
    return _EnsembleProblem(p, etas, grid, w.omega_i)


def avg_fidelity(w: ControlWaveform, p: Protocol, ens: RobustnessEnsemble, grid: TimeGrid):
    """``(F_bar, per_eta)``: fidelities to ``e_f`` starting from ``e_i`` for every eta."""
    fids = _problem(w, p, ens, grid).fidelities(w.v)
    return float(np.mean(fids)), fids


def fidelity_scan(w: ControlWaveform, p: Protocol, etas, grid: TimeGrid | None = None) -> np.ndarray:
    """Per-eta fidelity of ``w`` on an arbitrary eta list (e.g. a fine robustness scan)."""
    grid = w.grid if grid is None else grid
    return _problem(w, p, np.asarray(etas, dtype=float), grid).fidelities(w.v)


def scan_etas(epsilon: float, n: int = SCAN_POINTS) -> np.ndarray:
    return np.linspace(-epsilon, epsilon, n)


def grad_avg_fidelity(w: ControlWaveform, p: Protocol, ens: RobustnessEnsemble, grid: TimeGrid) -> np.ndarray:
    """Exact gradient ``dF_bar / dv`` of shape ``(n_steps, 3)``."""
    _, grad = _problem(w, p, ens, grid).fidelities_and_gradient(w.v)
    return np.mean(grad, axis=0)


def project_energy(w: ControlWaveform, c_target: float) -> ControlWaveform:
    """Rescale ``w`` uniformly so its energy cost equals ``c_target``."""
    if c_target < 0:
        raise ValueError("target cost must be nonnegative")
    if c_target == 0:
        return w.scaled(0.0)
    c = energy_cost(w)
    if c == 0:
        raise ZeroWaveform("cannot rescale a zero waveform to a positive cost")
    return w.scaled(np.sqrt(c_target / c))


def tangent_component(grad: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Part of ``grad`` tangent to the fixed-cost sphere through ``v``."""
    nv = float(np.sum(v * v))
    if nv == 0:
        return grad
    return grad - (np.sum(grad * v) / nv) * v


@dataclass
class GrapeOptions:
    max_iters: int = 500
    tol_F: float = 1e-10
    patience: int = 5
    seed: int = 0
    init_noise: float = 0.0
    init_step: float = 0.05
    max_halvings: int = 30
    step_growth: float = 2.0
    max_step: float = 1.0

    @classmethod
    def from_dict(cls, d: dict) -> "GrapeOptions":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown GRAPE options: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "GrapeOptions":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(eq=False)
class RobustControl:
    waveform: ControlWaveform
    cost: float
    avg_fidelity: float
    per_eta_fidelity: np.ndarray
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def _seeded_init(init: ControlWaveform, c_target: float, opts: GrapeOptions) -> ControlWaveform:
    w = init
    if opts.init_noise > 0:
        rng = np.random.default_rng(opts.seed)
        rms = np.sqrt(np.mean(np.sum(init.v**2, axis=1))) or 1.0
        w = ControlWaveform(init.grid, init.v + opts.init_noise * rms * rng.standard_normal(init.v.shape), init.omega_i)
    return project_energy(w, c_target)


def optimize(p: Protocol, ens: RobustnessEnsemble, grid: TimeGrid, c_target: float,
             init: ControlWaveform, opts: GrapeOptions | None = None) -> RobustControl:
    """Projected gradient ascent of ``F_bar`` on the sphere ``energy_cost = c_target``.

    Each iteration moves along the tangential gradient with a backtracking
    line search (halving), then rescales back onto the sphere.  Only
    improving steps are accepted, so ``F_bar`` never decreases.  Step sizes
    are measured relative to the sphere radius.
    """
    opts = GrapeOptions() if opts is None else opts
    if init.grid != grid:
        raise ValueError("initial waveform grid must match the propagation grid")
    prob = _EnsembleProblem(p, ens.etas, grid, init.omega_i)
    w = _seeded_init(init, c_target, opts)
    v = w.v
    radius = float(np.linalg.norm(v))
    fids = prob.fidelities(v)
    f_cur = float(np.mean(fids))
    history = [f_cur]
    if c_target == 0:
        return RobustControl(w, 0.0, f_cur, fids, 0, True, history)

    def on_sphere(x):
        return x * (radius / np.linalg.norm(x))

    step = opts.init_step
    stall = 0
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        _, grad_each = prob.fidelities_and_gradient(v)
        g = tangent_component(np.mean(grad_each, axis=0), v)
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0:
            converged = True
            break
        direction = g / gnorm
        accepted = False
        trial = min(step, opts.max_step)
        for _ in range(opts.max_halvings + 1):
            v_new = on_sphere(v + trial * radius * direction)
            fids_new = prob.fidelities(v_new)
            f_new = float(np.mean(fids_new))
            if f_new > f_cur:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            converged = True
            break
        gain = f_new - f_cur
        v, fids, f_cur = v_new, fids_new, f_new
        history.append(f_cur)
        step = trial * opts.step_growth
        stall = stall + 1 if gain < opts.tol_F else 0
        if stall >= opts.patience:
            converged = True
            break
    w = project_energy(ControlWaveform(grid, v, init.omega_i), c_target)
    fids = prob.fidelities(w.v)
    return RobustControl(w, energy_cost(w), float(np.mean(fids)), fids, it, converged, history)


@dataclass
class FrontierPoint:
    cost: float
    avg_fidelity: float
    per_eta_fidelity: list
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def tradeoff_sweep(p: Protocol, ens: RobustnessEnsemble, grid: TimeGrid, c_list, init: ControlWaveform,
                   opts: GrapeOptions | None = None):
    """Optimize at each cost in ``c_list``, warm-starting from the previous optimum.

    Returns ``(frontier, controls)``: a list of :class:`FrontierPoint` and the
    matching :class:`RobustControl` results.
    """
    c_list = [float(c) for c in c_list]
    if np.any(np.diff(c_list) <= 0):
        raise ValueError("cost list must be strictly increasing")
    frontier, controls = [], []
    start = init
    for c in c_list:
        res = optimize(p, ens, grid, c, start, opts)
        frontier.append(FrontierPoint(c, res.avg_fidelity, [float(f) for f in res.per_eta_fidelity],
                                      res.iterations, res.converged))
        controls.append(res)
        start = res.waveform
    return frontier, controls


def eta_convergence_check(w: ControlWaveform, p: Protocol, ens: RobustnessEnsemble, grid: TimeGrid) -> float:
    """``|F_bar(2 n_eta + 1 points) - F_bar(n_eta points)|`` for a fixed control."""
    f1, _ = avg_fidelity(w, p, ens, grid)
    f2, _ = avg_fidelity(w, p, make_ensemble(ens.epsilon, 2 * ens.n_eta + 1), grid)
    return abs(f2 - f1)
