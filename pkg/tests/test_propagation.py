import numpy as np
import pytest

from conftest import rk4_propagate
from qshortcut.propagation import (TimeGrid, cumulative_products, final_unitary, fidelity, ordered_product,
                                   propagate_state, propagate_u)
from qshortcut.protocols import boundaries
from qshortcut.qubit_core import KET_1, expi


def test_grid():
    g = TimeGrid(2.0, 4)
    assert g.dt == 0.5
    assert np.allclose(g.times, [0, 0.5, 1, 1.5, 2])
    assert np.allclose(g.midpoints, [0.25, 0.75, 1.25, 1.75])
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 10)


@pytest.mark.parametrize("n", [1, 2, 7, 16, 17, 1000])
def test_scans_match_sequential_product(n):
    rng = np.random.default_rng(n)
    u = expi(rng.normal(size=(n, 4)), 0.3)
    acc = np.eye(2, dtype=complex)
    expected = []
    for k in range(n):
        acc = u[k] @ acc
        expected.append(acc)
    assert np.allclose(cumulative_products(u), expected, atol=1e-12)
    assert np.allclose(ordered_product(u), acc, atol=1e-12)


def test_constant_hamiltonian():
    c = np.array([0.2, 1.0, -0.5, 0.7])
    g = TimeGrid(1.3, 50)
    path = propagate_u(lambda t: np.broadcast_to(c, np.shape(t) + (4,)), g)
    assert np.abs(path.final - expi(c, 1.3)).max() < 1e-10


def test_free_evolution_identity():
    path = propagate_u(lambda t: np.zeros(np.shape(t) + (4,)), TimeGrid(1.0, 20))
    assert np.allclose(path.unitaries, np.eye(2))


def test_non_vectorized_callable_is_sampled():
    g = TimeGrid(1.0, 10)
    path = propagate_u(lambda t: [0.0, 1.0, 0.0, float(t)], g)
    ref = propagate_u(lambda t: np.stack([0 * t, 1 + 0 * t, 0 * t, t], axis=-1), g)
    assert np.allclose(path.final, ref.final)


def test_step_array_input(lz_paper):
    g = TimeGrid(1.0, 100)
    with pytest.raises(ValueError):
        propagate_u(np.zeros((99, 4)), g)
    assert np.allclose(propagate_u(lz_paper.eval(g.midpoints), g).final, propagate_u(lz_paper, g).final)


def test_grid_refinement_self_consistency(lz_paper):
    u1 = final_unitary(lz_paper, TimeGrid(1.0, 10_000))
    u2 = final_unitary(lz_paper, TimeGrid(1.0, 20_000))
    assert np.abs(u1 - u2).max() < 1e-6


def test_composition(lz_paper):
    n = 4000
    full = propagate_u(lz_paper, TimeGrid(1.0, n)).final
    first = propagate_u(lz_paper, TimeGrid(0.4, int(0.4 * n))).final
    second = propagate_u(lz_paper, TimeGrid(1.0, int(0.6 * n), t0=0.4)).final
    assert np.abs(second @ first - full).max() < 1e-10


def test_eigenstate_of_constant_field_stays():
    traj = propagate_state(lambda t: np.broadcast_to([0, 0, 0, 2.0], np.shape(t) + (4,)), TimeGrid(3.0, 30), KET_1)
    assert np.allclose(traj.bloch[:, 2], 1.0)


def test_bare_lz_is_non_adiabatic(lz_paper):
    bd = boundaries(lz_paper)
    traj = propagate_state(lz_paper, TimeGrid(1.0, 10_000), bd.e_i)
    assert fidelity(traj.final, bd.e_f) < 0.9


def test_against_rk4_oracle(lz_paper):
    bd = boundaries(lz_paper)
    n = 10_000
    psi = propagate_state(lz_paper, TimeGrid(1.0, n), bd.e_i).final
    ref = rk4_propagate(lz_paper.eval, 1.0, 10 * n, bd.e_i)
    assert np.linalg.norm(psi - ref) <= 1e-6


def test_second_order_convergence(lz_paper):
    bd = boundaries(lz_paper)
    ref = rk4_propagate(lz_paper.eval, 1.0, 40_000, bd.e_i)
    errs = [np.linalg.norm(propagate_state(lz_paper, TimeGrid(1.0, n), bd.e_i).final - ref) for n in (500, 1000, 2000)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(3.6 < r < 4.4 for r in ratios), ratios


def test_norm_and_unitarity_hygiene(lz_paper):
    g = TimeGrid(1.0, 20_000)
    traj = propagate_state(lz_paper, g, boundaries(lz_paper).e_i)
    assert np.abs(np.linalg.norm(traj.states, axis=1) - 1).max() <= 1e-10
    path = propagate_u(lz_paper, g)
    eye = np.einsum("kji,kjl->kil", path.unitaries.conj(), path.unitaries)
    assert np.abs(eye - np.eye(2)).max() <= 1e-10


def test_fidelity():
    a = np.array([0.6, 0.8j])
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(KET_1, np.array([0, 1])) == 0.0
    for phi in np.linspace(0, 6, 7):
        assert fidelity(a, np.exp(1j * phi) * a) == pytest.approx(1.0, abs=1e-15)
