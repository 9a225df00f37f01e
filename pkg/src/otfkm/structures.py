"""Almost complex structures on M_0, on S^1 x M_+ and on S^1 x S^{l-1} x S^{l-2}.

Conventions
-----------
Vectors sit on the last axis and leading axes broadcast.  A point of
``S^1 x M_+`` is the flat array ``[theta, x]`` and a tangent vector there is
``[s, X]``, where ``s`` is the coefficient of ``eps = d/dtheta`` (a unit
vector).  A point of ``S^1 x S^{l-1} x S^{l-2}`` is ``[theta, y, z_im]`` with
``z_im`` the l-1 imaginary coordinates of the unit imaginary ``z``; its
tangents are ``[s, Y, Z_im]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import CliffordSystem, cd_conj, cd_mul, clifford_system
from .geometry import ManifoldSpec, fkm_eval, unit_normal_m0

__all__ = [
    "StructureField",
    "j_m0",
    "j_product",
    "phi_embed",
    "phi_differential",
    "jr_flat",
    "psi_pushforward",
    "big_psi",
    "big_psi_pushforward",
    "j_tilde",
    "intertwine_check",
    "structure_field",
    "tilde_spec",
    "product_spec",
    "split_tilde",
]

TANGENT_TOL = 1e-10


def _rows(a):
    return np.asarray(a, dtype=float)


def _dot(a, b):
    return np.sum(a * b, axis=-1, keepdims=True)


def _require(cond, message):
    if not np.all(cond):
        raise ValueError(message)


# --------------------------------------------------------------------------
# J on M_0


def j_m0(sys: CliffordSystem, x, W, tol=TANGENT_TOL):
    """The almost complex structure of M_0 applied to tangent vector(s) W.

    eta1 = P0P1 x and eta2 = P0P1 xi are rotated into each other; on their
    orthogonal complement E the structure is P0P1 itself.
    """
    x = _rows(x)
    W = _rows(W)
    xi = unit_normal_m0(sys, x, tol=max(tol, 1e-10))
    scale = np.maximum(1.0, np.linalg.norm(W, axis=-1))
    _require(np.abs(W @ x) <= tol * scale, "W is not tangent to the sphere")
    _require(np.abs(W @ xi) <= tol * scale, "W is not tangent to M_0")
    J = sys.P0P1
    eta1, eta2 = J @ x, J @ xi
    a, b = _dot(W, eta1), _dot(W, eta2)
    X = W - a * eta1 - b * eta2
    return a * eta2 - b * eta1 + X @ J.T


# --------------------------------------------------------------------------
# J on S^1 x M_+ (m = 1) and the flat structure on R^{2l}


def _mplus_checks(sys, x, X, tol):
    Px = np.tensordot(x, sys.P, axes=([-1], [2]))  # (..., m+1, 2l)
    quad = np.sum(Px * x[..., None, :], axis=-1)
    _require((np.abs(np.sum(x * x, axis=-1) - 1.0) <= 1e-10) & (np.abs(quad).max(axis=-1) <= 1e-10),
             "point is not on M_+")
    scale = np.maximum(1.0, np.linalg.norm(X, axis=-1))
    normal = np.abs(np.sum(Px * X[..., None, :], axis=-1)).max(axis=-1)
    worst = np.maximum(np.abs(np.sum(X * x, axis=-1)), normal)
    _require(worst <= tol * scale, "vector is not tangent to M_+")


def j_product(sys: CliffordSystem, p, W, tol=TANGENT_TOL, check=True):
    """The structure eps -> eta, eta -> -eps, X -> P0P1 X (X in V) on S^1 x M_+.

    ``p = [theta, x]`` and ``W = [s, X]`` (see the module conventions).
    ``check=False`` skips the point/tangency validation for inputs that are
    on M_+ by construction.
    """
    if sys.m != 1:
        raise ValueError("the product structure is defined for m = 1 only")
    p = _rows(p)
    W = _rows(W)
    x = p[..., 1:]
    s, X = W[..., :1], W[..., 1:]
    if check:
        _mplus_checks(sys, x, X, tol)
    J = sys.P0P1
    eta = x @ J.T
    t = _dot(X, eta)
    return np.concatenate([-t, s * eta + (X - t * eta) @ J.T], axis=-1)


def jr_flat(sys: CliffordSystem, Y):
    """Constant structure Y -> P0P1 Y on R^{2l}."""
    return _rows(Y) @ sys.P0P1.T


def phi_embed(theta, x):
    """Phi(theta, x) = exp(theta) x, the embedding of (S^1 minus {1}) x M_+ into R^{2l}."""
    theta = float(theta)
    if not 0.0 < theta < 2 * np.pi:
        raise ValueError("theta must lie in the open interval (0, 2 pi)")
    return np.exp(theta) * _rows(x)


def phi_differential(theta, x, W):
    """dPhi(s, X) = exp(theta) (s x + X)."""
    W = _rows(W)
    return np.exp(float(theta)) * (W[..., :1] * _rows(x) + W[..., 1:])


# --------------------------------------------------------------------------
# the parametrisation psi and the structure J-tilde


def _full(z_im):
    z_im = _rows(z_im)
    return np.concatenate([np.zeros(z_im.shape[:-1] + (1,)), z_im], axis=-1)


def psi_pushforward(y, z, Y, Z, tol=TANGENT_TOL):
    """psi_*(Y, Z) = (Y, Zy + zY)/sqrt(2); ``z`` and ``Z`` are full imaginary vectors."""
    y, z, Y, Z = (_rows(a) for a in (y, z, Y, Z))
    _require(np.abs(_dot(Y, y)) <= tol * np.maximum(1, np.linalg.norm(Y, axis=-1, keepdims=True)),
             "Y is not tangent to the sphere at y")
    _require((np.abs(Z[..., 0]) <= tol) & (np.abs(_dot(Z, z)[..., 0]) <= tol * np.maximum(1, np.linalg.norm(Z, axis=-1))),
             "Z is not an imaginary tangent at z")
    return np.concatenate([Y, cd_mul(Z, y) + cd_mul(z, Y)], axis=-1) / np.sqrt(2.0)


def split_tilde(p):
    """[theta, y, z_im] -> (theta, y, z) with z a full imaginary vector."""
    p = _rows(p)
    l = (p.shape[-1]) // 2  # noqa: E741
    return p[..., 0], p[..., 1 : 1 + l], _full(p[..., 1 + l :])


def _split_tangent(W, l):  # noqa: E741
    return W[..., :1], W[..., 1 : 1 + l], _full(W[..., 1 + l :])


def big_psi(p):
    """Psi = id x psi : [theta, y, z_im] -> [theta, (y, zy)/sqrt(2)]."""
    theta, y, z = split_tilde(p)
    x = np.concatenate([y, cd_mul(z, y)], axis=-1) / np.sqrt(2.0)
    return np.concatenate([np.asarray(theta)[..., None], x], axis=-1)


def big_psi_pushforward(p, W):
    theta, y, z = split_tilde(p)
    s, Y, Z = _split_tangent(_rows(W), y.shape[-1])
    return np.concatenate([s, psi_pushforward(y, z, Y, Z)], axis=-1)


def j_tilde(dim: int, p, W, tol=TANGENT_TOL):
    """The structure on S^1 x S^3 x S^2 (dim 6) or S^1 x S^7 x S^6 (dim 14).

    (eps, 0, 0) -> (0, zy, 0), (0, zy, 0) -> (-eps, 0, 0), and for <Y, zy> = 0
    (0, Y, Z) -> (0, Zy + zY, -(z(Zy)) conj(y)); in dim 6 the last slot is -zZ.
    A general W is split along (0, zy, 0) first.
    """
    if dim not in (6, 14):
        raise ValueError("dim must be 6 or 14")
    l = (dim + 2) // 2  # noqa: E741
    p = _rows(p)
    W = _rows(W)
    if p.shape[-1] != 2 * l or W.shape[-1] != 2 * l:
        raise ValueError(f"expected flat vectors of length {2 * l}")
    _, y, z = split_tilde(p)
    s, Y, Z = _split_tangent(W, l)
    scale = np.maximum(1.0, np.linalg.norm(W, axis=-1, keepdims=True))
    _require(np.abs(_dot(Y, y)) <= tol * scale, "Y is not tangent to the sphere at y")
    _require(np.abs(_dot(Z, z)) <= tol * scale, "Z is not tangent to the sphere at z")
    zy = cd_mul(z, y)
    t = _dot(Y, zy)
    Yp = Y - t * zy
    Y_out = s * zy + cd_mul(Z, y) + cd_mul(z, Yp)
    if dim == 6:
        Z_out = -cd_mul(z, Z)
    else:
        Z_out = -cd_mul(cd_mul(z, cd_mul(Z, y)), cd_conj(y))
    return np.concatenate([-t, Y_out, Z_out[..., 1:]], axis=-1)


def intertwine_check(dim: int, p, W):
    """|Psi_*(J-tilde W) - J(Psi_* W)| for the structure J on S^1 x M_+."""
    l = (dim + 2) // 2  # noqa: E741
    sys = clifford_system(1, l)
    lhs = big_psi_pushforward(p, j_tilde(dim, p, W))
    rhs = j_product(sys, big_psi(p), big_psi_pushforward(p, W))
    return np.linalg.norm(lhs - rhs, axis=-1)


# --------------------------------------------------------------------------
# uniform wrapper


def product_spec(sys: CliffordSystem) -> ManifoldSpec:
    return ManifoldSpec.product(ManifoldSpec.circle(), ManifoldSpec.m_plus(sys))


def tilde_spec(dim: int) -> ManifoldSpec:
    """S^1 x S^{l-1} x S^{l-2} with the last factor inside Im of the algebra."""
    l = (dim + 2) // 2  # noqa: E741
    return ManifoldSpec.product(
        ManifoldSpec.circle(), ManifoldSpec.sphere(l - 1), ManifoldSpec.sphere(l - 2)
    )


@dataclass(frozen=True, eq=False)
class StructureField:
    """A point-dependent tangent endomorphism on ``spec``.

    Calling ``J(x, W)`` applies the structure at the flat point ``x`` to
    tangent vector(s) ``W`` stacked on the last axis.
    """

    variant: str
    spec: ManifoldSpec
    apply: Callable
    sys: CliffordSystem | None = None
    hermitian: bool = True

    def __call__(self, x, W):
        return self.apply(x, W)

    def matrix(self, x, frame):
        """Components of J in the basis given by the columns of ``frame``."""
        JF = self.apply(x, frame.T).T
        return np.linalg.lstsq(frame, JF, rcond=None)[0]


def structure_field(variant: str, sys: CliffordSystem | None = None, dim: int | None = None) -> StructureField:
    """Build one of ``J_M0``, ``J_PRODUCT``, ``J_TILDE`` or ``J_FLAT``."""
    if variant == "J_M0":
        return StructureField(variant, ManifoldSpec.level_set(sys, 0.0),
                              lambda x, W: j_m0(sys, x, W), sys)
    if variant == "J_PRODUCT":
        return StructureField(variant, product_spec(sys),
                              lambda p, W: j_product(sys, p, W), sys)
    if variant == "J_FLAT":
        return StructureField(variant, ManifoldSpec.euclidean(sys.dim),
                              lambda x, W: jr_flat(sys, W), sys)
    if variant == "J_TILDE":
        return StructureField(variant, tilde_spec(dim),
                              lambda p, W: j_tilde(dim, p, W), None, hermitian=False)
    raise ValueError(f"unknown structure variant {variant!r}")


def on_m0(sys: CliffordSystem, x) -> bool:
    return abs(fkm_eval(sys, x)) < 1e-10
