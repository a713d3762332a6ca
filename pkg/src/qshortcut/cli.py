"""Command-line experiment runner.

Usage::

    qshortcut {simulate,costs,scaling,robust,geometry} CONFIG.json [--n-steps N] [--seed S] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .errors import ConfigError, QShortcutError
from .grape import GrapeOptions, fidelity_scan, make_ensemble, scan_etas, tradeoff_sweep, avg_fidelity
from .propagation import TimeGrid, fidelity, propagate_state, propagate_u
from .protocols import LandauZener, Protocol, boundaries, lz_protocol
from .qoste import (cost_chain_check, excited_bloch_path, path_geometry, qoste_solution, ratio_scaling)
from .qubit_core import bloch_of, state_of_bloch
from .sta_cd import ControlWaveform, cd_drive_general, cd_drive_lz, driven_coeffs, energy_cost

log = logging.getLogger("qshortcut")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class ExperimentConfig:
    """Validated experiment description.

    Landau-Zener energies are given in units of ``omega`` (``delta0``,
    ``delta_d``) and the duration as ``omega_tf``.
    """

    protocol: dict
    n_steps: int = 100_000
    epsilon: float = 0.15
    n_eta: int = 7
    cost_ratios: list = field(default_factory=lambda: [1.0, 2.71, 3.87, 8.0])
    cost_targets: list = field(default_factory=list)
    grape_n_steps: int = 200
    grape: dict = field(default_factory=dict)
    scan_points: int = 201
    scaling_omega_tf: list = field(default_factory=lambda: [20.0, 40.0, 80.0, 160.0])
    steps_per_radian: float = 500.0
    output_dir: str = "out"
    seed: int = 0
    base_dir: str = "."

    def build_protocol(self, omega_tf: float | None = None) -> Protocol:
        spec = self.protocol
        if spec["kind"] == "landau_zener":
            w = spec["omega"]
            tf = (spec["omega_tf"] if omega_tf is None else omega_tf) / w
            return lz_protocol(spec["delta0"] * w, spec["delta_d"] * w, w, tf)
        return io.read_protocol_csv(Path(self.base_dir) / spec["path"])

    def grape_options(self) -> GrapeOptions:
        opts = dict(self.grape)
        opts.setdefault("seed", self.seed)
        return GrapeOptions.from_dict(opts)


def _num(d, key, where, *, positive=False, nonneg=False, integer=False, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ConfigError(f"{where}.{key}: required field is missing")
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {val!r}")
    if integer and int(val) != val:
        raise ConfigError(f"{where}.{key}: expected an integer, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(f"{where}.{key}: must be > 0, got {val!r}")
    if nonneg and val < 0:
        raise ConfigError(f"{where}.{key}: must be >= 0, got {val!r}")
    return int(val) if integer else float(val)


def _num_list(d, key, where, default):
    if key not in d:
        return list(default)
    val = d[key]
    if not isinstance(val, list):
        raise ConfigError(f"{where}.{key}: expected a list of numbers")
    return [_num({"v": x}, "v", f"{where}.{key}[{i}]", nonneg=True) for i, x in enumerate(val)]


def validate_config(raw: dict, base_dir=".") -> ExperimentConfig:
    """Check every field before any computation; raise :class:`ConfigError` naming the field."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    known = {"protocol", "grid", "ensemble", "costs", "robust", "grape", "scaling", "output_dir", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    proto = raw.get("protocol")
    if not isinstance(proto, dict):
        raise ConfigError("protocol: required object is missing")
    kind = proto.get("kind")
    if kind == "landau_zener":
        pspec = {
            "kind": kind,
            "delta0": _num(proto, "delta0", "protocol"),
            "delta_d": _num(proto, "delta_d", "protocol"),
            "omega": _num(proto, "omega", "protocol", positive=True, default=1.0),
            "omega_tf": _num(proto, "omega_tf", "protocol", positive=True),
        }
    elif kind == "tabulated":
        if not isinstance(proto.get("path"), str):
            raise ConfigError("protocol.path: required string for a tabulated protocol")
        pspec = {"kind": kind, "path": proto["path"]}
    else:
        raise ConfigError(f"protocol.kind: expected 'landau_zener' or 'tabulated', got {kind!r}")

    def section(name):
        sec = raw.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"{name}: expected an object")
        return sec

    grid, ens, costs, robust, scaling = (section(n) for n in ("grid", "ensemble", "costs", "robust", "scaling"))
    cfg = ExperimentConfig(protocol=pspec, base_dir=str(base_dir))
    cfg.n_steps = _num(grid, "n_steps", "grid", positive=True, integer=True, default=cfg.n_steps)
    cfg.epsilon = _num(ens, "epsilon", "ensemble", nonneg=True, default=cfg.epsilon)
    cfg.n_eta = _num(ens, "n_eta", "ensemble", positive=True, integer=True, default=cfg.n_eta)
    if cfg.n_eta % 2 == 0:
        raise ConfigError(f"ensemble.n_eta: must be odd, got {cfg.n_eta}")
    cfg.cost_ratios = _num_list(costs, "ratios", "costs", cfg.cost_ratios)
    cfg.cost_targets = _num_list(costs, "targets", "costs", cfg.cost_targets)
    cfg.grape_n_steps = _num(robust, "n_steps", "robust", positive=True, integer=True, default=cfg.grape_n_steps)
    cfg.scan_points = _num(robust, "scan_points", "robust", positive=True, integer=True, default=cfg.scan_points)
    cfg.scaling_omega_tf = _num_list(scaling, "omega_tf", "scaling", cfg.scaling_omega_tf)
    cfg.steps_per_radian = _num(scaling, "steps_per_radian", "scaling", positive=True, default=cfg.steps_per_radian)
    gr = section("grape")
    try:
        GrapeOptions.from_dict(gr)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grape: {exc}") from None
    cfg.grape = gr
    if "output_dir" in raw and not isinstance(raw["output_dir"], str):
        raise ConfigError("output_dir: expected a string")
    cfg.output_dir = raw.get("output_dir", cfg.output_dir)
    cfg.seed = _num(raw, "seed", "config", integer=True, nonneg=True, default=cfg.seed)
    if kind == "tabulated":
        # parse now so file errors surface as config errors
        cfg.build_protocol()
    return cfg


def load_config(path, n_steps=None, seed=None, out=None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    cfg = validate_config(raw, base_dir=path.parent)
    if n_steps is not None:
        if n_steps < 1:
            raise ConfigError("--n-steps: must be >= 1")
        cfg.n_steps = n_steps
    if seed is not None:
        cfg.seed = seed
    if out is not None:
        cfg.output_dir = out
    return cfg


def _cd_waveform(p, grid):
    return cd_drive_lz(p, grid) if isinstance(p, LandauZener) else cd_drive_general(p, grid)


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> dict:
    p = cfg.build_protocol()
    grid = TimeGrid(p.t_f, cfg.n_steps)
    bd = boundaries(p)
    sol = qoste_solution(p, grid)
    drives = {
        "drift": ControlWaveform.zeros(grid, bd.omega_i),
        "cd": _cd_waveform(p, grid),
        "qoste": sol.waveform,
    }
    summary = {}
    for name, w in drives.items():
        traj = propagate_state(driven_coeffs(p, w), grid, bd.e_i)
        io.write_trajectory_csv(out / f"trajectory_{name}.csv", traj)
        summary[name] = {"fidelity": fidelity(traj.final, bd.e_f), "cost": energy_cost(w)}
    io.write_waveform_csv(out / "waveform_cd.csv", drives["cd"])
    io.write_waveform_csv(out / "waveform_qoste.csv", drives["qoste"])
    # Fig.-2-style inset table: QOSTE components and the CD y-amplitude
    cd_v = drives["cd"].v
    with open(out / "waveforms.csv", "w") as fh:
        fh.write("t_mid,vx,vy,vz,v_cd\n")
        for t, v, c in zip(grid.midpoints, sol.waveform.v, cd_v[:, 1]):
            fh.write(",".join(repr(float(x)) for x in (t, *v, c)) + "\n")
    io.write_json(out / "simulate.json", summary)
    return summary


def cmd_costs(cfg: ExperimentConfig, out: Path) -> dict:
    p = cfg.build_protocol()
    report = cost_chain_check(p, TimeGrid(p.t_f, cfg.n_steps)).to_dict()
    report["ratio"] = report["c_cd"] / report["c_qoste"] if report["c_qoste"] > 0 else None
    io.write_json(out / "costs.json", report)
    return report


def cmd_scaling(cfg: ExperimentConfig, out: Path) -> dict:
    if cfg.protocol["kind"] != "landau_zener":
        raise ConfigError("scaling: needs a landau_zener protocol family")

    def steps(p):
        h = p.eval(np.linspace(0.0, p.t_f, 101))[:, 1:]
        return int(max(cfg.n_steps, math.ceil(cfg.steps_per_radian * np.linalg.norm(h, axis=1).max() * p.t_f)))

    omega = cfg.protocol["omega"]
    tfs = [x / omega for x in cfg.scaling_omega_tf]
    est = ratio_scaling(lambda tf: cfg.build_protocol(tf * omega), tfs, n_steps=steps)
    report = est.to_dict()
    io.write_json(out / "scaling.json", report)
    return report


def cmd_geometry(cfg: ExperimentConfig, out: Path) -> dict:
    p = cfg.build_protocol()
    grid = TimeGrid(p.t_f, cfg.n_steps)
    path = propagate_u(p, grid)
    geom = path_geometry(p, grid, path)
    n_hat = excited_bloch_path(p, grid)
    rot = bloch_of(np.einsum("kji,kj->ki", np.conj(path.unitaries), state_of_bloch(n_hat)))
    with open(out / "adiabatic_paths.csv", "w") as fh:
        fh.write("t,x,y,z,x_rot,y_rot,z_rot\n")
        for t, a, b in zip(grid.times, n_hat, rot):
            fh.write(",".join(repr(float(x)) for x in (t, *a, *b)) + "\n")
    report = {"L": geom.L, "L_tilde": geom.L_tilde, "G_tilde": geom.G_tilde}
    io.write_json(out / "geometry.json", report)
    return report


def cmd_robust(cfg: ExperimentConfig, out: Path) -> dict:
    p = cfg.build_protocol()
    grid = TimeGrid(p.t_f, cfg.grape_n_steps)
    ens = make_ensemble(cfg.epsilon, cfg.n_eta)
    sol = qoste_solution(p, grid)
    cd = _cd_waveform(p, grid)
    c_q = sol.cost
    targets = sorted(set([r * c_q for r in cfg.cost_ratios] + list(cfg.cost_targets)))
    targets = [c for c in targets if c > 0]
    frontier, controls = tradeoff_sweep(p, ens, grid, targets, sol.waveform, cfg.grape_options())
    etas = scan_etas(cfg.epsilon, cfg.scan_points)
    scans = {"cd": fidelity_scan(cd, p, etas), "qoste": fidelity_scan(sol.waveform, p, etas)}
    for i, res in enumerate(controls):
        scans[f"grape_{i}"] = fidelity_scan(res.waveform, p, etas)
        io.write_waveform_csv(out / f"waveform_grape_{i}.csv", res.waveform)
    io.write_scan_csv(out / "scans.csv", etas, scans)
    f_q, per_q = avg_fidelity(sol.waveform, p, ens, grid)
    f_cd, per_cd = avg_fidelity(cd, p, ens, grid)
    report = {
        "epsilon": ens.epsilon,
        "etas": ens.etas,
        "c_qoste": c_q,
        "baselines": {
            "qoste": {"cost": energy_cost(sol.waveform), "avg_fidelity": f_q, "per_eta_fidelity": per_q},
            "cd": {"cost": energy_cost(cd), "avg_fidelity": f_cd, "per_eta_fidelity": per_cd},
        },
        "frontier": [dict(pt.to_dict(), cost_ratio=pt.cost / c_q, index=i) for i, pt in enumerate(frontier)],
    }
    for i, pt in enumerate(frontier):
        if not pt.converged:
            log.warning("frontier point %d (C = %.4g) did not converge", i, pt.cost)
    io.write_json(out / "frontier.json", report)
    return report


COMMANDS = {
    "simulate": cmd_simulate,
    "costs": cmd_costs,
    "scaling": cmd_scaling,
    "robust": cmd_robust,
    "geometry": cmd_geometry,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qshortcut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__name__.replace("cmd_", "run "))
        sp.add_argument("config", help="experiment config (JSON)")
        sp.add_argument("--n-steps", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.n_steps, args.seed, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QShortcutError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    log.info("wrote %s results to %s", args.command, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
