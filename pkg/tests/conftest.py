import numpy as np
import pytest

from qshortcut.protocols import lz_protocol
from qshortcut.qubit_core import compose

PAPER = dict(delta0=-10.0, delta_d=20.0, omega=1.0, t_f=1.0)


@pytest.fixture
def lz_paper():
    return lz_protocol(**PAPER)


def rk4_propagate(h, t_f, n, psi0):
    """Classic RK4 for d psi/dt = -i H(t) psi; independent of the exponential integrator."""
    dt = t_f / n
    t = np.arange(n) * dt
    h_start = compose(h(t))
    h_mid = compose(h(t + dt / 2))
    h_end = compose(h(t + dt))
    psi = np.asarray(psi0, dtype=complex)
    for k in range(n):
        k1 = -1j * h_start[k] @ psi
        k2 = -1j * h_mid[k] @ (psi + 0.5 * dt * k1)
        k3 = -1j * h_mid[k] @ (psi + 0.5 * dt * k2)
        k4 = -1j * h_end[k] @ (psi + dt * k3)
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def taylor_expm(a, squarings=12, terms=30):
    """Scaling-and-squaring Taylor series for a small dense matrix."""
    a = np.asarray(a, dtype=complex) / 2**squarings
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def smooth_random_protocol(seed, n_samples=400, t_f=None):
    """A smooth random qubit drift: a few Fourier modes on top of an offset field."""
    from qshortcut.protocols import Tabulated

    rng = np.random.default_rng(seed)
    t_f = rng.uniform(0.5, 2.0) if t_f is None else t_f
    t = np.linspace(0.0, t_f, n_samples)
    base = rng.normal(size=3)
    base *= rng.uniform(2.0, 5.0) / np.linalg.norm(base)
    h = np.tile(base, (n_samples, 1))
    for m in range(1, 4):
        amp = rng.normal(size=3) * 1.5 / m
        phase = rng.uniform(0, 2 * np.pi, size=3)
        h += amp * np.sin(m * np.pi * t[:, None] / t_f + phase)
    c0 = rng.normal() * np.cos(np.pi * t / t_f)
    return Tabulated(t, np.column_stack([c0, h]))


_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion" in report.nodeid:
        _CRITERIA.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
