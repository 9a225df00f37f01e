"""Finite-difference tensor calculus on graph charts.

Tensor fields are handled through their chart components: a callable
``u -> array`` whose axes all have length ``chart.dim``.  Derivatives are
second-order central differences.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .geometry import Chart, ManifoldSpec, SurfacePoint, chart, tangent_projector
from .structures import StructureField

__all__ = [
    "FD_STEP",
    "FD_STEP_2",
    "coordinate_derivatives",
    "covariant_derivative",
    "projected_constant",
    "structure_components",
    "nijenhuis_tensor",
    "nijenhuis_norm",
    "kaehler_form",
    "kaehler_components",
    "form_components",
    "exterior_derivative",
    "nabla_phi",
    "metric_components",
    "riemann_fd",
    "sectional_curvature_fd",
    "Integral",
    "integrate_2form",
    "pullback_exterior_derivative",
]

FD_STEP = 1e-5
FD_STEP_2 = 1e-4


def coordinate_derivatives(field: Callable, dim: int, h: float = FD_STEP, u0=None) -> np.ndarray:
    """Central differences of ``field`` in every chart direction.

    Returns ``D`` with ``D[a] = d field / d u_a`` at ``u0`` (default 0).
    """
    u0 = np.zeros(dim) if u0 is None else np.asarray(u0, dtype=float)
    out = []
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = h
        out.append((np.asarray(field(u0 + e)) - np.asarray(field(u0 - e))) / (2 * h))
    return np.stack(out)


# --------------------------------------------------------------------------
# covariant derivative of the induced metric


def projected_constant(spec: ManifoldSpec, X0) -> Callable:
    """Extend a tangent vector by projecting the constant ambient field."""
    X0 = np.asarray(X0, dtype=float)
    return lambda x: tangent_projector(spec, x) @ X0


def covariant_derivative(spec: ManifoldSpec, p: SurfacePoint, Z, W: Callable, h: float = FD_STEP, ch: Chart | None = None):
    """(D_Z W)^T: ambient derivative of the field W along Z, projected to T_p.

    ``W`` maps a flat point to a flat tangent vector.  The curve through
    ``p`` with velocity ``Z`` is the chart image of ``t -> t * coords(Z)``.
    """
    ch = ch or chart(spec, p)
    a = ch.coords(np.asarray(Z, dtype=float))
    dW = (np.asarray(W(ch.eval(h * a))) - np.asarray(W(ch.eval(-h * a)))) / (2 * h)
    return tangent_projector(spec, p.x) @ dW


# --------------------------------------------------------------------------
# structures in chart components


def structure_components(J: StructureField, ch: Chart, u=None) -> np.ndarray:
    """Matrix ``C`` with ``J(d_j) = sum_k C[k, j] d_k`` at chart parameter u."""
    x = ch.base.x if u is None or not np.any(u) else ch.eval(u)
    return J.matrix(x, ch.frame_at(x))


def nijenhuis_tensor(J: StructureField, ch: Chart, h: float = FD_STEP) -> np.ndarray:
    """Components ``N[k, i, j]`` of the Nijenhuis tensor at the chart origin.

    N^k_ij = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l d_i J^l_j + J^k_l d_j J^l_i
    """
    C = structure_components(J, ch)
    dC = coordinate_derivatives(lambda u: structure_components(J, ch, u), ch.dim, h)
    return (
        np.einsum("li,lkj->kij", C, dC)
        - np.einsum("lj,lki->kij", C, dC)
        - np.einsum("kl,ilj->kij", C, dC)
        + np.einsum("kl,jli->kij", C, dC)
    )


def nijenhuis_norm(J: StructureField, spec: ManifoldSpec, p: SurfacePoint, h: float = FD_STEP) -> float:
    """max |N^k_ij| in an orthonormal-at-origin chart around p."""
    return float(np.abs(nijenhuis_tensor(J, chart(spec, p), h)).max())


# --------------------------------------------------------------------------
# forms


def kaehler_form(J: StructureField, x, X, Y) -> float:
    """Phi(X, Y) = <X, J Y>."""
    return float(np.asarray(X) @ J(x, Y))


def kaehler_components(J: StructureField, ch: Chart) -> Callable:
    """u -> Phi(d_i, d_j) in chart components."""

    def comps(u):
        x = ch.eval(u)
        E = ch.frame_at(x)
        return E.T @ J(x, E.T).T

    return comps


def form_components(form: Callable, ch: Chart, k: int) -> Callable:
    """Chart components of a k-form given pointwise as ``form(x, *vectors)``."""

    def comps(u):
        x = ch.eval(u)
        E = ch.frame_at(x).T
        out = np.zeros((ch.dim,) * k)
        for idx in np.ndindex(*out.shape):
            out[idx] = form(x, *(E[i] for i in idx))
        return out

    return comps


def exterior_derivative(form: Callable, dim: int, vectors=None, h: float = FD_STEP, u0=None):
    """Exterior derivative of a k-form from its component function.

    ``form(u)`` returns the k-axis component array at chart parameter u.
    Returns the (k+1)-form components at ``u0``, or their value on the given
    coordinate ``vectors`` (convention: d w(X, Y) = X w(Y) - Y w(X) - w([X, Y])).
    """
    D = coordinate_derivatives(form, dim, h, u0)
    k = D.ndim - 1
    out = sum((-1) ** j * np.moveaxis(D, 0, j) for j in range(k + 1))
    if vectors is None:
        return out
    for v in vectors:
        out = np.tensordot(np.asarray(v, dtype=float), out, axes=(0, 0))
    return float(out)


def nabla_phi(J: StructureField, spec: ManifoldSpec, p: SurfacePoint, X, Y: Callable, Z, h: float = FD_STEP) -> float:
    """(nabla_Z Phi)(X, Y) = <X, nabla_Z(J Y) - J(nabla_Z Y)>.

    ``Y`` is a closed-form tangent field (flat point -> flat vector); ``X``
    and ``Z`` are tangent vectors at ``p``.
    """
    ch = chart(spec, p)
    JY = covariant_derivative(spec, p, Z, lambda q: J(q, Y(q)), h, ch)
    DY = covariant_derivative(spec, p, Z, Y, h, ch)
    return float(np.asarray(X) @ (JY - J(p.x, DY)))


# --------------------------------------------------------------------------
# intrinsic curvature by finite differences


def metric_components(ch: Chart, u) -> np.ndarray:
    E = ch.frame(u)
    return E.T @ E


def _christoffel(ch: Chart, u, h):
    g = metric_components(ch, u)
    dg = coordinate_derivatives(lambda v: metric_components(ch, v), ch.dim, h, u)  # dg[a, i, j]
    # Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)
    lower = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
    return np.linalg.solve(g, lower.reshape(ch.dim, -1)).reshape(lower.shape)


def riemann_fd(ch: Chart, h: float = FD_STEP_2) -> np.ndarray:
    """R[i, j, k, l] with R(d_k, d_l) d_j = R^i_jkl d_i at the chart origin."""
    d = ch.dim
    G = _christoffel(ch, np.zeros(d), h)
    dG = coordinate_derivatives(lambda v: _christoffel(ch, v, h), d, h)  # dG[a, i, j, k]
    return (
        np.einsum("kilj->ijkl", dG)
        - np.einsum("likj->ijkl", dG)
        + np.einsum("ikm,mlj->ijkl", G, G)
        - np.einsum("ilm,mkj->ijkl", G, G)
    )


def sectional_curvature_fd(spec: ManifoldSpec, p: SurfacePoint, X, Y, h: float = FD_STEP_2) -> float:
    """Intrinsic sectional curvature <R(X, Y) Y, X> / |X ^ Y|^2 from the chart metric."""
    ch = chart(spec, p)
    R = riemann_fd(ch, h)
    a, b = ch.coords(np.asarray(X, dtype=float)), ch.coords(np.asarray(Y, dtype=float))
    num = np.einsum("ijkl,i,j,k,l->", R, a, b, a, b)
    return float(num / ((a @ a) * (b @ b) - (a @ b) ** 2))


# --------------------------------------------------------------------------
# integration over a 2-sphere slice


class Integral(NamedTuple):
    value: float
    coarse: float
    fine: float
    error: float


def _midpoint(density, n_phi, n_lam):
    dphi, dlam = np.pi / n_phi, 2 * np.pi / n_lam
    phi = (np.arange(n_phi) + 0.5) * dphi
    lam = (np.arange(n_lam) + 0.5) * dlam
    P, L = np.meshgrid(phi, lam, indexing="ij")
    vals = np.asarray(density(P, L), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite integrand sample")
    # numpy's sum is pairwise, so the reduction order is fixed
    return float(np.sum(vals) * dphi * dlam)


def integrate_2form(density: Callable, grid=(128, 256), richardson: bool = True) -> Integral:
    """Integrate a pulled-back 2-form over a sphere in polar coordinates.

    ``density(phi, lam)`` returns the coefficient of ``dphi ^ dlam`` on
    arrays of polar angle phi in (0, pi) and azimuth lam in (0, 2 pi).  The
    midpoint grid never touches the poles.  With ``richardson`` the grid is
    also doubled and the O(h^2) error eliminated.
    """
    n_phi, n_lam = grid
    coarse = _midpoint(density, n_phi, n_lam)
    if not richardson:
        return Integral(coarse, coarse, coarse, float("nan"))
    fine = _midpoint(density, 2 * n_phi, 2 * n_lam)
    return Integral((4 * fine - coarse) / 3, coarse, fine, abs(fine - coarse) / 3)


def pullback_exterior_derivative(one_form: Callable, h: float = FD_STEP_2) -> Callable:
    """Density of d(alpha) from the pulled-back 1-form ``alpha(phi, lam) -> (a_phi, a_lam)``."""

    def density(phi, lam):
        a_lam_p = one_form(phi + h, lam)[1]
        a_lam_m = one_form(phi - h, lam)[1]
        a_phi_p = one_form(phi, lam + h)[0]
        a_phi_m = one_form(phi, lam - h)[0]
        return (a_lam_p - a_lam_m) / (2 * h) - (a_phi_p - a_phi_m) / (2 * h)

    return density
