"""CSV / JSON formats for protocols, trajectories, waveforms and reports."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .propagation import TimeGrid, Trajectory
from .protocols import Tabulated
from .sta_cd import ControlWaveform

PROTOCOL_COLUMNS = ["t", "c0", "cx", "cy", "cz"]
TRAJECTORY_COLUMNS = ["t", "re_a", "im_a", "re_b", "im_b", "x", "y", "z"]
WAVEFORM_COLUMNS = ["t_mid", "vx", "vy", "vz"]


class ProtocolFileError(ConfigError):
    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = str(path)
        self.line = line


def _fmt(x) -> str:
    return repr(float(x))


def read_protocol_csv(path) -> Tabulated:
    """Load a tabulated protocol (columns ``t, c0, cx, cy, cz``, header required)."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != PROTOCOL_COLUMNS:
            raise ProtocolFileError(path, 1, f"header must be {','.join(PROTOCOL_COLUMNS)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise ProtocolFileError(path, line, f"expected 5 columns, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ProtocolFileError(path, line, "non-numeric value") from None
            if not np.all(np.isfinite(vals)):
                raise ProtocolFileError(path, line, "non-finite value")
            if rows and vals[0] <= rows[-1][1][0]:
                raise ProtocolFileError(path, line, "times must be strictly increasing")
            if not rows and vals[0] != 0.0:
                raise ProtocolFileError(path, line, "first time must be 0")
            rows.append((line, vals))
    if len(rows) < 2:
        raise ProtocolFileError(path, len(rows) + 1, "need at least two samples")
    data = np.array([v for _, v in rows])
    return Tabulated(data[:, 0], data[:, 1:])


def write_protocol_csv(path, p: Tabulated) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROTOCOL_COLUMNS)
        for t, c in zip(p.times, p.values):
            w.writerow([_fmt(t)] + [_fmt(x) for x in c])


def write_trajectory_csv(path, traj: Trajectory) -> None:
    bloch = traj.bloch
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for t, s, r in zip(traj.grid.times, traj.states, bloch):
            w.writerow([_fmt(t), _fmt(s[0].real), _fmt(s[0].imag), _fmt(s[1].real), _fmt(s[1].imag),
                        _fmt(r[0]), _fmt(r[1]), _fmt(r[2])])


def read_trajectory_csv(path) -> Trajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    t = data["t"]
    grid = TimeGrid(float(t[-1]), len(t) - 1, float(t[0]))
    states = np.stack([data["re_a"] + 1j * data["im_a"], data["re_b"] + 1j * data["im_b"]], axis=-1)
    return Trajectory(grid, states)


def write_waveform_csv(path, w: ControlWaveform) -> None:
    """Waveform CSV: a ``# {json}`` header line (omega_i, t_f, n_steps), then ``t_mid, vx, vy, vz``."""
    meta = {"omega_i": float(w.omega_i), "t_f": float(w.grid.t_f), "n_steps": int(w.grid.n_steps)}
    if w.grid.t0:
        meta["t0"] = float(w.grid.t0)
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(WAVEFORM_COLUMNS)
        for t, v in zip(w.grid.midpoints, w.v):
            wr.writerow([_fmt(t)] + [_fmt(x) for x in v])


def read_waveform_csv(path) -> ControlWaveform:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise ConfigError(f"{path}:1: missing '# {{json}}' waveform header")
    meta = json.loads(first[1:])
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    grid = TimeGrid(meta["t_f"], meta["n_steps"], meta.get("t0", 0.0))
    return ControlWaveform(grid, data[:, 1:4], meta["omega_i"])


def write_scan_csv(path, etas, columns: dict) -> None:
    """Per-eta fidelity table: ``eta`` followed by one column per control."""
    names = list(columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eta"] + names)
        for i, eta in enumerate(etas):
            w.writerow([_fmt(eta)] + [_fmt(columns[n][i]) for n in names])


def read_scan_csv(path) -> tuple[np.ndarray, dict]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    return data["eta"], {n: data[n] for n in names[1:]}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
