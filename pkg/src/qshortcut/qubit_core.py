"""Closed-form 2x2 linear algebra for qubit Hamiltonians.

Hamiltonians are carried as real Pauli coefficients ``(c0, cx, cy, cz)``
so that ``H = c0*I + cx*X + cy*Y + cz*Z``.  All functions accept arrays with
arbitrary leading batch dimensions and a trailing axis of length 4 (or 2 for
kets), which keeps the propagation code free of Python-level loops.

States are written on the computational basis ``{|1>, |0>}`` with ``|1>``
first, i.e. ``|1>`` is the +1 eigenvector of ``Z``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateHamiltonian, NotNormalized

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])

KET_1 = np.array([1, 0], dtype=complex)
KET_0 = np.array([0, 1], dtype=complex)

NORM_TOL = 1e-8
DEGENERACY_RTOL = 1e-14


class PauliCoeffs(NamedTuple):
    """Real coefficients of a qubit Hamiltonian on ``(I, X, Y, Z)``."""

    c0: float
    cx: float
    cy: float
    cz: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.cz], dtype=float)

    def matrix(self) -> np.ndarray:
        return compose(self)


def as_coeffs(c) -> np.ndarray:
    """Return ``c`` as a float array whose last axis has length 4."""
    arr = np.asarray(c, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"Pauli coefficients need a trailing axis of 4, got shape {arr.shape}")
    return arr


def compose(c) -> np.ndarray:
    """Build ``c0*I + cx*X + cy*Y + cz*Z`` (batched over leading axes)."""
    c = as_coeffs(c)
    return np.einsum("...k,kij->...ij", c.astype(complex), PAULIS)


def decompose(m) -> np.ndarray:
    """Pauli coefficients of the Hermitian part of a 2x2 matrix.

    Inverse of :func:`compose`: ``c_k = Re Tr(m sigma_k) / 2``.
    """
    m = np.asarray(m, dtype=complex)
    return 0.5 * np.einsum("...ij,kji->...k", m, PAULIS).real


def ket(a, b) -> np.ndarray:
    """The state ``a|1> + b|0>``."""
    return np.array([a, b], dtype=complex)


def norm_error(s) -> np.ndarray:
    s = np.asarray(s)
    return np.abs(np.sum(np.abs(s) ** 2, axis=-1) - 1.0)


def bloch_of(s) -> np.ndarray:
    """Bloch vector ``(<X>, <Y>, <Z>)`` of a normalized ket (batched).

    Raises
    ------
    NotNormalized
        If any input deviates from unit norm by more than 1e-8.
    """
    s = np.asarray(s, dtype=complex)
    if np.any(norm_error(s) > NORM_TOL):
        raise NotNormalized("bloch_of expects normalized state vectors")
    a, b = s[..., 0], s[..., 1]
    ab = np.conj(a) * b
    return np.stack([2 * ab.real, 2 * ab.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=-1)


def state_of_bloch(r) -> np.ndarray:
    """A ket with Bloch vector ``r`` (unit length), phase fixed so ``<1|s> >= 0``.

    At the south pole the ket is ``|0>``.
    """
    r = np.asarray(r, dtype=float)
    r = r / np.linalg.norm(r, axis=-1, keepdims=True)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    top = np.sqrt(np.clip((1 + z) / 2, 0.0, None))
    # b = e^{i phi} sin(theta/2); use (x + iy) / (2 cos(theta/2)) away from the south pole
    safe = top > 1e-8
    denom = np.where(safe, 2 * top, 1.0)
    b = np.where(safe, (x + 1j * y) / denom, 1.0 + 0j)
    out = np.stack([top.astype(complex), b], axis=-1)
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def great_circle_angle(r1, r2) -> np.ndarray:
    """Angle between Bloch vectors, accurate for nearly (anti)parallel inputs."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    cross = np.linalg.norm(np.cross(r1, r2), axis=-1)
    dot = np.sum(r1 * r2, axis=-1)
    return np.arctan2(cross, dot)


@dataclass(frozen=True)
class EigenFrame:
    """Spectral data of a nondegenerate qubit Hamiltonian.

    ``v_plus`` and ``v_minus`` are the eigenvectors for ``e_plus > e_minus``.
    ``v_plus`` is gauge-fixed so its overlap with ``gauge_anchor`` is real and
    nonnegative.
    """

    e_plus: float
    e_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    gauge_anchor: np.ndarray

    @property
    def splitting(self) -> float:
        """Half the spectral gap."""
        return 0.5 * (self.e_plus - self.e_minus)


def _fix_phase(v, anchor):
    ov = np.vdot(anchor, v)
    if abs(ov) > 1e-14:
        v = v * (np.conj(ov) / abs(ov))
    return v


def eig2(c, anchor=None, anchor_minus=None) -> EigenFrame:
    """Eigen-decomposition of ``c0*I + c.sigma`` with phase gauge control.

    Parameters
    ----------
    c : array_like, shape (4,)
        Pauli coefficients.
    anchor : array_like, optional
        Reference ket for ``v_plus``; its overlap with ``v_plus`` is made real
        and nonnegative.  Defaults to ``|1>``.
    anchor_minus : array_like, optional
        Reference ket for ``v_minus``.  When omitted, ``v_minus`` is tied to
        ``v_plus`` by ``(a, b) -> (-b*, a*)``, which reproduces the usual
        ``-sin(theta/2)|1> + cos(theta/2)|0>`` convention.

    Raises
    ------
    DegenerateHamiltonian
        If ``|c_vec| <= 1e-14 * max(|c0|, 1)``.
    """
    c = as_coeffs(c)
    if c.shape != (4,):
        raise ValueError("eig2 takes a single set of Pauli coefficients")
    c0, vec = c[0], c[1:]
    h = float(np.linalg.norm(vec))
    if h <= DEGENERACY_RTOL * max(abs(c0), 1.0):
        raise DegenerateHamiltonian(f"degenerate qubit Hamiltonian: |c_vec| = {h:.3e}")
    anchor = KET_1 if anchor is None else np.asarray(anchor, dtype=complex)
    nx, ny, nz = vec / h
    # pick the better conditioned of the two null-space representations
    if nz >= 0:
        v = np.array([1 + nz, nx + 1j * ny], dtype=complex)
    else:
        v = np.array([nx - 1j * ny, 1 - nz], dtype=complex)
    v /= np.linalg.norm(v)
    v_plus = _fix_phase(v, anchor)
    v_minus = np.array([-np.conj(v_plus[1]), np.conj(v_plus[0])])
    if anchor_minus is not None:
        v_minus = _fix_phase(v_minus, np.asarray(anchor_minus, dtype=complex))
    return EigenFrame(c0 + h, c0 - h, v_plus, v_minus, anchor)


def eigenframes_along(coeffs, anchor=None) -> list[EigenFrame]:
    """Eigenframes along a sampled Hamiltonian family with anchor chaining.

    Each point is gauge-fixed against the previous point's eigenvectors, so
    the eigenvectors vary continuously with the sample index.
    """
    coeffs = as_coeffs(coeffs)
    frames = []
    prev = None
    for c in coeffs:
        if prev is None:
            fr = eig2(c, anchor)
        else:
            fr = eig2(c, prev.v_plus, prev.v_minus)
        frames.append(fr)
        prev = fr
    return frames


def expi(c, dt) -> np.ndarray:
    """``exp(-i (c0 I + c.sigma) dt)`` in closed form (batched).

    Uses ``e^{-i c0 dt} [cos|c|dt I - i sin(|c|dt)/|c| c.sigma]``; the
    ``sin(x)/x`` factor goes through ``np.sinc`` so ``|c| = 0`` is exact.
    """
    c = as_coeffs(c)
    dt = np.asarray(dt, dtype=float)
    vec = c[..., 1:]
    a = np.linalg.norm(vec, axis=-1) * dt
    cos_a = np.cos(a)
    s = dt * np.sinc(a / np.pi)
    gen = np.einsum("...k,kij->...ij", vec.astype(complex), PAULIS[1:])
    u = cos_a[..., None, None] * IDENTITY - 1j * s[..., None, None] * gen
    return np.exp(-1j * c[..., 0] * dt)[..., None, None] * u


def _sinc_slope(a):
    """``(a cos a - sin a) / a**3``, the derivative of ``sin(a)/a`` divided by ``a``."""
    a = np.asarray(a, dtype=float)
    small = a < 1e-2
    a_safe = np.where(small, 1.0, a)
    exact = (a_safe * np.cos(a_safe) - np.sin(a_safe)) / a_safe**3
    a2 = a * a
    series = -1 / 3 + a2 / 30 - a2 * a2 / 840 + a2**3 / 45360
    return np.where(small, series, exact)


def expi_derivative(c, dt) -> np.ndarray:
    """Derivatives of :func:`expi` with respect to ``(cx, cy, cz)``.

    Returns an array of shape ``(..., 3, 2, 2)``.  Exact (closed form), so it
    can be used for GRAPE gradients without a first-order approximation.
    """
    c = as_coeffs(c)
    dt = np.asarray(dt, dtype=float)
    vec = c[..., 1:]
    a = np.linalg.norm(vec, axis=-1) * dt
    s = np.sinc(a / np.pi)
    t = _sinc_slope(a)
    gen = np.einsum("...k,kij->...ij", vec.astype(complex), PAULIS[1:])
    phase = np.exp(-1j * c[..., 0] * dt)
    dt2 = dt * dt
    # d cos(a)/dc_k = -dt^2 S c_k ; d(dt S c.sigma)/dc_k = dt^3 T c_k c.sigma + dt S sigma_k
    d_id = (-dt2 * s)[..., None] * vec
    d_gen_coef = (dt * dt2 * t)[..., None] * vec
    out = (
        d_id[..., None, None].astype(complex) * IDENTITY
        - 1j * d_gen_coef[..., None, None] * gen[..., None, :, :]
        - 1j * (dt * s)[..., None, None, None] * PAULIS[1:]
    )
    return phase[..., None, None, None] * out
