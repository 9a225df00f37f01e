"""Explicit frames on S^1 x S^3 x S^2 and S^1 x M_+^5 and the first Chern form.

Points of S^1 x S^3 x S^2 are described by ``(theta, y, z)`` with ``y`` a
unit quaternion and ``z`` in R^3 = Im H (so ``z = z1 e1 + z2 e2 + z3 e3``).
Frames are returned as arrays of shape ``(..., 6, n)``: six flat tangent
vectors, in the layouts of :mod:`otfkm.structures`.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .algebra import cd_mul, clifford_system
from .calculus import FD_STEP, FD_STEP_2, coordinate_derivatives, exterior_derivative, integrate_2form, pullback_exterior_derivative
from .geometry import Chart, SurfacePoint, chart, psi_inverse
from .structures import j_product, product_spec

__all__ = [
    "J0",
    "SYS_M5",
    "h_matrix",
    "s_matrix",
    "gauge_matrix",
    "vu_frame",
    "x_star_frame",
    "y_frame",
    "y_frame_field",
    "phase_gauge",
    "rotation_gauge",
    "connection_forms",
    "connection_form",
    "chern_components",
    "chern_form",
    "sphere_point",
    "slice_chern_integral",
    "gauss_bonnet_sphere",
]

J0 = np.block([[np.zeros((3, 3)), -np.eye(3)], [np.eye(3), np.zeros((3, 3))]])
SYS_M5 = clifford_system(1, 4)  # m = 1, l = 4: M_+^5 in S^7


def _quat_imag(z):
    z = np.asarray(z, dtype=float)
    return np.concatenate([np.zeros(z.shape[:-1] + (1,)), z], axis=-1)


def _e(j):
    e = np.zeros(4)
    e[j] = 1.0
    return e


def h_matrix(z) -> np.ndarray:
    """h(z) with rows (0, z3, -z2), (-z3, 0, z1), (z2, -z1, 0); h_ij = <e_i e_j, z>."""
    z1, z2, z3 = np.moveaxis(np.asarray(z, dtype=float), -1, 0)
    o = np.zeros_like(z1)
    rows = [np.stack([o, z3, -z2], -1), np.stack([-z3, o, z1], -1), np.stack([z2, -z1, o], -1)]
    return np.stack(rows, -2)


def s_matrix(z) -> np.ndarray:
    """Representation matrix S = [[h, -z^t z], [I, -h]] of J-tilde in the (V, U) frame."""
    z = np.asarray(z, dtype=float)
    h = h_matrix(z)
    I = np.broadcast_to(np.eye(3), h.shape)
    zz = z[..., :, None] * z[..., None, :]
    return np.concatenate(
        [np.concatenate([h, -zz], -1), np.concatenate([I, -h], -1)], -2
    )


def gauge_matrix(z, inverse: bool = False) -> np.ndarray:
    """A = [[I, h], [0, I]] with A^{-1} S A = J0 (``inverse`` gives A^{-1})."""
    h = h_matrix(z)
    if inverse:
        h = -h
    I = np.broadcast_to(np.eye(3), h.shape)
    O = np.zeros_like(h)
    return np.concatenate([np.concatenate([I, h], -1), np.concatenate([O, I], -1)], -2)


def vu_frame(theta, y, z) -> np.ndarray:
    """(V1, V2, V3, U1, U2, U3) on S^1 x S^3 x S^2, flat layout [s, Y, Z_im].

    V_j = (z_j eps, 0, e_j - z_j z),  U_j = (0, e_j y, 0).
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(y.shape[:-1], z.shape[:-1], np.shape(theta))
    out = np.zeros(shape + (6, 8))
    for j in range(3):
        out[..., j, 0] = z[..., j]
        out[..., j, 5:] = np.eye(3)[j] - z[..., j, None] * z
        out[..., 3 + j, 1:5] = cd_mul(_e(j + 1), y)
    return out


def x_star_frame(theta, y, z) -> np.ndarray:
    """Psi_* of the J-tilde-adapted frame (V, V h + U), in layout [s, u, v]."""
    from .structures import big_psi_pushforward

    VU = vu_frame(theta, y, z)
    A = gauge_matrix(z)
    X = np.einsum("...kn,...kj->...jn", VU, A)
    p = _tilde_point(theta, y, z)
    return big_psi_pushforward(p[..., None, :], X)


def _tilde_point(theta, y, z):
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(y.shape[:-1], z.shape[:-1], np.shape(theta))
    p = np.zeros(shape + (8,))
    p[..., 0] = theta
    p[..., 1:5] = y
    p[..., 5:] = z
    return p


def y_frame(theta, y, z) -> np.ndarray:
    """Unitary frame (Y1, Y2, Y3, JY1, JY2, JY3) on S^1 x M_+^5, layout [s, u, v].

    Y_j = (z_j eps, 0, (e_j - z_j z) y); the point is (theta, (y, zy)/sqrt(2)).
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(y.shape[:-1], z.shape[:-1], np.shape(theta))
    zq = _quat_imag(z)
    out = np.zeros(shape + (6, 9))
    for j in range(3):
        out[..., j, 0] = z[..., j]
        out[..., j, 5:] = cd_mul(_e(j + 1) - z[..., j, None] * zq, y)
    yb = np.broadcast_to(y, shape + (4,))
    x = np.concatenate([yb, cd_mul(zq, yb)], -1) / np.sqrt(2.0)
    p = np.concatenate([np.broadcast_to(np.asarray(theta, dtype=float), shape)[..., None], x], -1)
    out[..., 3:, :] = j_product(SYS_M5, p[..., None, :], out[..., :3, :], check=False)
    return out


def y_frame_field(p) -> np.ndarray:
    """The Y frame as a field of the flat point [theta, x] of S^1 x M_+^5."""
    p = np.asarray(p, dtype=float)
    y, zq = psi_inverse(p[..., 1:])
    return y_frame(p[..., 0], y, zq[..., 1:])


def rotation_gauge(frame_field: Callable, angle: Callable, axis=(1.0, 1.0, 1.0)) -> Callable:
    """Rotate (Y1, Y2, Y3) by ``angle(p)`` about a fixed axis; extend to JY by the same matrix."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])

    def field(p):
        F = frame_field(p)
        a = angle(p)
        R = np.eye(3) + np.sin(a) * K + (1 - np.cos(a)) * K @ K
        return np.concatenate([R.T @ F[:3], R.T @ F[3:]])

    return field


def phase_gauge(frame_field: Callable, phases: Callable) -> Callable:
    """U(1)^3 gauge: Y_j -> cos f_j Y_j + sin f_j JY_j, JY_j -> J of that."""

    def field(p):
        F = frame_field(p)
        f = np.asarray(phases(p))[:, None]
        c, s = np.cos(f), np.sin(f)
        return np.concatenate([c * F[:3] + s * F[3:], c * F[3:] - s * F[:3]])

    return field


# --------------------------------------------------------------------------
# connection and Chern forms


def connection_forms(frame_field: Callable, ch: Chart, h: float = FD_STEP) -> Callable:
    """u -> w[A, B, i] = <D_{d_i} Y_B, Y_A> at chart parameter u.

    Convention: D Y_B = sum_A w_AB Y_A (Levi-Civita, since the frame is tangent).
    """

    def comps(u):
        u = np.asarray(u, dtype=float)
        F = frame_field(ch.eval(u))
        dF = coordinate_derivatives(lambda v: frame_field(ch.eval(v)), ch.dim, h, u)
        return np.einsum("an,ibn->abi", F, dF)

    return comps


def connection_form(p: SurfacePoint, Z, A: int, B: int, frame_field: Callable = y_frame_field, h: float = FD_STEP) -> float:
    """w_AB(Z) for the frame field at p (indices 0-based)."""
    ch = chart(p.spec, p)
    w = connection_forms(frame_field, ch, h)(np.zeros(ch.dim))
    return float(w[A, B] @ ch.coords(np.asarray(Z, dtype=float)))


def _trace_form(frame_field, ch, h):
    w = connection_forms(frame_field, ch, h)

    def alpha(u):
        W = w(u)
        return sum(W[j, j + 3] for j in range(3))

    return alpha


def chern_components(frame_field: Callable, ch: Chart, h: float = FD_STEP, h2: float = FD_STEP_2, u0=None) -> np.ndarray:
    """Chart components of -(1/2 pi) sum_j d w_{j, j+3} at ``u0`` (default origin)."""
    dalpha = exterior_derivative(_trace_form(frame_field, ch, h), ch.dim, h=h2, u0=u0)
    return -dalpha / (2 * np.pi)


def chern_form(p: SurfacePoint, X, Y, frame_field: Callable = y_frame_field, h: float = FD_STEP, h2: float = FD_STEP_2) -> float:
    """c_1 representative evaluated on tangent vectors X, Y at p."""
    ch = chart(p.spec, p)
    c = chern_components(frame_field, ch, h, h2)
    return float(ch.coords(np.asarray(X)) @ c @ ch.coords(np.asarray(Y)))


def mplus5_spec():
    return product_spec(SYS_M5)


# --------------------------------------------------------------------------
# S^2 slices


def sphere_point(phi, lam):
    """Unit vector with polar angle phi and azimuth lam."""
    return np.stack([np.sin(phi) * np.cos(lam), np.sin(phi) * np.sin(lam), np.cos(phi)], -1)


def _pulled_back_connection(frames: Callable, pairs, h: float) -> Callable:
    """(phi, lam) -> sum over (A, B) in pairs of (w_AB(d_phi), w_AB(d_lam))."""
    A = [a for a, _ in pairs]
    B = [b for _, b in pairs]

    def one_form(phi, lam):
        F = frames(phi, lam)[..., A, :]
        d_phi = (frames(phi + h, lam) - frames(phi - h, lam))[..., B, :] / (2 * h)
        d_lam = (frames(phi, lam + h) - frames(phi, lam - h))[..., B, :] / (2 * h)
        return np.sum(d_phi * F, (-2, -1)), np.sum(d_lam * F, (-2, -1))

    return one_form


def slice_chern_integral(theta, y, grid=(128, 256), h: float = FD_STEP_2, richardson: bool = True):
    """Integral of the c_1 representative over the slice {theta} x {y} x S^2."""
    y = np.asarray(y, dtype=float)

    def frames(phi, lam):
        return y_frame(theta, y, sphere_point(phi, lam))

    alpha = _pulled_back_connection(frames, [(j, j + 3) for j in range(3)], h)
    d_alpha = pullback_exterior_derivative(alpha, h)
    return integrate_2form(lambda P, L: -d_alpha(P, L) / (2 * np.pi), grid, richardson)


def gauss_bonnet_sphere(grid=(128, 256), h: float = FD_STEP_2, richardson: bool = True):
    """(1/2 pi) * integral of d w_12 = K dA for the round S^2 with frame (e_phi, e_lam)."""

    def frames(phi, lam):
        e_phi = np.stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), -np.sin(phi)], -1)
        e_lam = np.stack([-np.sin(lam), np.cos(lam), np.zeros_like(lam)], -1)
        return np.stack([e_phi, e_lam], -2)

    d_w = pullback_exterior_derivative(_pulled_back_connection(frames, [(0, 1)], h), h)
    res = integrate_2form(d_w, grid, richardson)
    return res._replace(
        value=res.value / (2 * np.pi),
        coarse=res.coarse / (2 * np.pi),
        fine=res.fine / (2 * np.pi),
        error=res.error / (2 * np.pi),
    )
