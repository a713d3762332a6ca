import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import taylor_expm
from qshortcut.errors import DegenerateHamiltonian, NotNormalized
from qshortcut.qubit_core import (KET_0, KET_1, SIGMA_X, SIGMA_Z, PauliCoeffs, bloch_of, compose, decompose,
                                  eig2, eigenframes_along, expi, expi_derivative, great_circle_angle,
                                  state_of_bloch)

finite = st.floats(-50, 50, allow_nan=False)
coeffs = st.tuples(finite, finite, finite, finite)


def test_compose_basics():
    assert np.allclose(compose(PauliCoeffs(0, 0, 0, 1)), np.diag([1, -1]))
    assert np.allclose(compose((0, 1, 0, 0)), [[0, 1], [1, 0]])
    assert np.allclose(compose((1, 0, 0, 0)), np.eye(2))
    assert np.allclose(PauliCoeffs(0, 0, 0, 1).matrix(), SIGMA_Z)


@given(coeffs)
def test_compose_roundtrip_hermitian(c):
    m = compose(c)
    assert np.allclose(m, m.conj().T, atol=0)
    assert np.allclose(decompose(m), c, rtol=0, atol=1e-12)


def test_bloch_basis_states():
    s = np.sqrt(0.5)
    assert np.allclose(bloch_of(KET_1), [0, 0, 1])
    assert np.allclose(bloch_of(np.array([s, s])), [1, 0, 0])
    assert np.allclose(bloch_of(np.array([s, 1j * s])), [0, 1, 0])


def test_bloch_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        bloch_of(np.array([1.0, 0.1]))


@given(st.floats(0, 2 * np.pi), st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_bloch_phase_invariant_and_unit(phi, theta, az):
    s = np.array([np.cos(theta / 2), np.exp(1j * az) * np.sin(theta / 2)])
    r = bloch_of(s)
    # equal up to rounding in |e^{i phi} a|^2
    assert np.allclose(bloch_of(np.exp(1j * phi) * s), r, rtol=0, atol=1e-14)
    assert abs(np.dot(r, r) - 1) < 1e-10


def test_state_of_bloch_roundtrip():
    rng = np.random.default_rng(3)
    r = rng.normal(size=(50, 3))
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    r[0] = [0, 0, -1]
    assert np.allclose(bloch_of(state_of_bloch(r)), r, atol=1e-12)


def test_great_circle_angle():
    assert great_circle_angle([0, 0, 1], [0, 0, -1]) == pytest.approx(np.pi)
    assert great_circle_angle([1, 0, 0], [0, 1, 0]) == pytest.approx(np.pi / 2)
    assert great_circle_angle([0, 0, 1], [1e-9, 0, 1]) == pytest.approx(1e-9, rel=1e-6)


def test_eig2_diagonal():
    fr = eig2((0, 0, 0, 2.0))
    assert (fr.e_plus, fr.e_minus) == (2.0, -2.0)
    assert np.allclose(fr.v_plus, KET_1)


def test_eig2_lz_initial_point():
    omega, delta = 1.0, -10.0
    theta = np.arctan(omega / delta) + np.pi
    fr = eig2((0, omega, 0, delta))
    assert np.allclose(fr.v_plus, [np.cos(theta / 2), np.sin(theta / 2)], atol=1e-12)
    assert np.allclose(fr.v_minus, [-np.sin(theta / 2), np.cos(theta / 2)], atol=1e-12)


def test_eig2_sigma_x():
    fr = eig2((0, 3.0, 0, 0))
    assert abs(abs(np.vdot(fr.v_plus, np.array([1, 1]) / np.sqrt(2))) - 1) < 1e-12


@given(coeffs)
def test_eig2_invariants(c):
    if np.linalg.norm(c[1:]) < 1e-6:
        return
    fr = eig2(c)
    h = compose(c)
    assert np.allclose(h @ fr.v_plus, fr.e_plus * fr.v_plus, atol=1e-10 * max(1, abs(fr.e_plus)))
    assert np.allclose(h @ fr.v_minus, fr.e_minus * fr.v_minus, atol=1e-10 * max(1, abs(fr.e_minus)))
    assert abs(np.vdot(fr.v_plus, fr.v_minus)) < 1e-12
    ov = np.vdot(fr.gauge_anchor, fr.v_plus)
    assert abs(ov.imag) < 1e-12 and ov.real >= -1e-12


def test_eig2_degenerate():
    with pytest.raises(DegenerateHamiltonian):
        eig2((1.0, 0, 0, 0))
    with pytest.raises(DegenerateHamiltonian):
        eig2((1.0, 1e-16, 0, 0))


def test_eigenframe_continuity_under_chaining():
    # rotating field with a varying azimuth: naive gauges would jump
    def family(s):
        return np.array([0.3, np.cos(3 * s) * np.sin(s + 0.2), np.sin(3 * s) * np.sin(s + 0.2), np.cos(s + 0.2)])

    for h in (1e-2, 5e-3):
        s = np.arange(0, 2.5, h)
        frames = eigenframes_along(np.array([family(x) for x in s]))
        jumps = [np.linalg.norm(b.v_plus - a.v_plus) for a, b in zip(frames, frames[1:])]
        assert max(jumps) < 5 * h
        mjumps = [np.linalg.norm(b.v_minus - a.v_minus) for a, b in zip(frames, frames[1:])]
        assert max(mjumps) < 5 * h


def test_expi_phase_and_z_rotation():
    dt = 0.3
    phi = 0.7
    assert np.allclose(expi((phi / dt, 0, 0, 0), dt), np.exp(-1j * phi) * np.eye(2), atol=1e-15)
    u = expi((0, 0, 0, np.pi / (2 * dt)), dt)
    assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]), atol=1e-15)


def test_expi_matches_series_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        c = rng.normal(scale=3, size=4)
        dt = rng.uniform(0.01, 2.0)
        h = compose(c)
        ref = taylor_expm(-1j * h * dt)
        assert np.abs(expi(c, dt) - ref).max() < 1e-10
        assert np.abs(expi(c, dt) - scipy.linalg.expm(-1j * h * dt)).max() < 1e-10


@settings(max_examples=200)
@given(coeffs, st.floats(1e-6, 10))
def test_expi_unitary(c, dt):
    u = expi(c, dt)
    assert np.linalg.norm(u.conj().T @ u - np.eye(2)) <= 1e-12


def test_expi_batched_and_zero_field():
    c = np.zeros((5, 4))
    assert np.allclose(expi(c, 0.1), np.eye(2))
    c = np.random.default_rng(0).normal(size=(3, 7, 4))
    u = expi(c, 0.05)
    assert u.shape == (3, 7, 2, 2)
    assert np.allclose(u[1, 4], expi(c[1, 4], 0.05))


@pytest.mark.parametrize("scale", [1e-5, 1e-2, 1.0, 8.0])
def test_expi_derivative_finite_differences(scale):
    rng = np.random.default_rng(5)
    c = rng.normal(size=4) * scale
    dt = 0.37
    d = expi_derivative(c, dt)
    h = 1e-6
    for k in range(3):
        cp, cm = c.copy(), c.copy()
        cp[k + 1] += h
        cm[k + 1] -= h
        fd = (expi(cp, dt) - expi(cm, dt)) / (2 * h)
        assert np.abs(d[k] - fd).max() < 1e-8


def test_expi_derivative_at_zero_field():
    d = expi_derivative(np.zeros(4), 0.2)
    assert np.allclose(d[0], -1j * 0.2 * SIGMA_X)
