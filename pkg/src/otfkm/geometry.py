"""FKM isoparametric function, its level sets, sampling and local charts.

Every manifold lives in a flat ambient space and is cut out by a constraint
map ``g``.  A point is stored as its flat ambient coordinate vector; for a
product the factor coordinates are concatenated, and a circle factor
contributes its angle (so the circle is locally the real line, with
``d/dtheta`` of unit length).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from .algebra import CliffordSystem, cd_conj, cd_mul, clifford_system

__all__ = [
    "ManifoldSpec",
    "SurfacePoint",
    "Chart",
    "ProjectionError",
    "ChartError",
    "fkm_eval",
    "fkm_gradient",
    "sphere_gradient",
    "unit_normal_m0",
    "psi_map",
    "psi_inverse",
    "project_to_level",
    "sample_point",
    "chart",
    "tangent_projector",
    "tangent_basis_mplus",
    "sectional_curvature_mplus",
    "random_unit_tangents",
]

CONSTRAINT_TOL = 1e-10
REGULARITY_TOL = 1e-6


class ProjectionError(RuntimeError):
    """Newton projection failed; ``residual`` holds the last constraint residual."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class ChartError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# the isoparametric polynomial


def _quad_forms(sys: CliffordSystem, x):
    """<P_i x, x> for every i, shape (..., m+1)."""
    Px = np.einsum("iab,...b->...ia", sys.P, x)
    return np.einsum("...ia,...a->...i", Px, x), Px


def fkm_eval(sys: CliffordSystem, x):
    """F(x) = |x|^4 - 2 sum_i <P_i x, x>^2."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != sys.dim:
        raise ValueError(f"expected vectors of length {sys.dim}, got {x.shape[-1]}")
    p, _ = _quad_forms(sys, x)
    r2 = np.sum(x * x, axis=-1)
    return r2**2 - 2.0 * np.sum(p * p, axis=-1)


def fkm_gradient(sys: CliffordSystem, x):
    """Euclidean gradient DF = 4|x|^2 x - 8 sum_i <P_i x, x> P_i x."""
    x = np.asarray(x, dtype=float)
    p, Px = _quad_forms(sys, x)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    return 4.0 * r2 * x - 8.0 * np.einsum("...i,...ia->...a", p, Px)


def sphere_gradient(sys: CliffordSystem, x):
    """Gradient of f = F|_S on the unit sphere: DF - <DF, x> x."""
    x = np.asarray(x, dtype=float)
    DF = fkm_gradient(sys, x)
    return DF - np.sum(DF * x, axis=-1, keepdims=True) * x


def unit_normal_m0(sys: CliffordSystem, x, tol=CONSTRAINT_TOL):
    """Unit normal xi = x - 2 sum <P_i x, x> P_i x of M_0 inside the sphere."""
    x = np.asarray(x, dtype=float)
    if abs(fkm_eval(sys, x)) > tol or abs(x @ x - 1.0) > tol:
        raise ValueError("point is not on M_0")
    p, Px = _quad_forms(sys, x)
    return x - 2.0 * p @ Px


# --------------------------------------------------------------------------
# manifold descriptions


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    """Description of a constraint manifold.

    Use the classmethod constructors; ``kind`` is one of ``SPHERE``,
    ``CIRCLE``, ``EUCLIDEAN``, ``LEVEL_SET``, ``M_PLUS``, ``M_MINUS``,
    ``PRODUCT``.
    """

    kind: str
    n: int = 0
    sys: CliffordSystem | None = None
    value: float = 0.0
    factors: tuple = field(default=())

    # constructors -------------------------------------------------------
    @classmethod
    def sphere(cls, n: int) -> "ManifoldSpec":
        """The unit sphere S^n in R^{n+1}."""
        return cls("SPHERE", n=n)

    @classmethod
    def circle(cls) -> "ManifoldSpec":
        return cls("CIRCLE", n=1)

    @classmethod
    def euclidean(cls, n: int) -> "ManifoldSpec":
        return cls("EUCLIDEAN", n=n)

    @classmethod
    def level_set(cls, sys: CliffordSystem, c: float = 0.0) -> "ManifoldSpec":
        if not -1.0 <= c <= 1.0:
            raise ValueError(f"level {c} outside the image [-1, 1] of f")
        if c == 1.0:
            return cls.m_plus(sys)
        if c == -1.0:
            return cls.m_minus(sys)
        return cls("LEVEL_SET", sys=sys, value=float(c))

    @classmethod
    def m_plus(cls, sys: CliffordSystem) -> "ManifoldSpec":
        return cls("M_PLUS", sys=sys, value=1.0)

    @classmethod
    def m_minus(cls, sys: CliffordSystem) -> "ManifoldSpec":
        return cls("M_MINUS", sys=sys, value=-1.0)

    @classmethod
    def product(cls, *factors: "ManifoldSpec") -> "ManifoldSpec":
        return cls("PRODUCT", factors=tuple(factors))

    # sizes ------------------------------------------------------------------
    @property
    def ambient_dim(self) -> int:
        k = self.kind
        if k == "PRODUCT":
            return sum(f.ambient_dim for f in self.factors)
        if k == "SPHERE":
            return self.n + 1
        if k in ("CIRCLE", "EUCLIDEAN"):
            return self.n
        return self.sys.dim

    @property
    def dim(self) -> int:
        k = self.kind
        if k == "PRODUCT":
            return sum(f.dim for f in self.factors)
        if k in ("SPHERE", "CIRCLE", "EUCLIDEAN"):
            return self.n
        l, m = self.sys.l, self.sys.m  # noqa: E741
        if k == "LEVEL_SET":
            return 2 * l - 2
        if k == "M_PLUS":
            return 2 * l - m - 2
        return l + m - 1

    @property
    def offsets(self) -> list[int]:
        """Start index of each factor inside the flat ambient vector."""
        out, at = [], 0
        for f in self.factors:
            out.append(at)
            at += f.ambient_dim
        return out

    def split(self, x):
        """Split a flat ambient vector into per-factor pieces."""
        if self.kind != "PRODUCT":
            return [x]
        return [x[..., o : o + f.ambient_dim] for o, f in zip(self.offsets, self.factors)]

    def __repr__(self) -> str:
        k = self.kind
        if k == "PRODUCT":
            return " x ".join(map(repr, self.factors))
        if k in ("SPHERE", "EUCLIDEAN"):
            return f"{k}({self.n})"
        if k == "CIRCLE":
            return "CIRCLE"
        tag = f"(m={self.sys.m}, k={self.sys.k})"
        return f"LEVEL_SET{tag}[c={self.value}]" if k == "LEVEL_SET" else k + tag

    # constraints ------------------------------------------------------------
    def constraints(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "PRODUCT":
            parts = [f.constraints(xi) for f, xi in zip(self.factors, self.split(x))]
            return np.concatenate(parts) if parts else np.zeros(0)
        if k in ("CIRCLE", "EUCLIDEAN"):
            return np.zeros(0)
        sphere = np.array([x @ x - 1.0])
        if k == "SPHERE":
            return sphere
        if k == "M_PLUS":
            p, _ = _quad_forms(self.sys, x)
            return np.concatenate([sphere, p])
        return np.concatenate([sphere, [fkm_eval(self.sys, x) - self.value]])

    def jacobian(self, x) -> np.ndarray:
        """Jacobian of :meth:`constraints`, shape (n_constraints, ambient_dim)."""
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "PRODUCT":
            blocks = [f.jacobian(xi) for f, xi in zip(self.factors, self.split(x))]
            rows = sum(b.shape[0] for b in blocks)
            out = np.zeros((rows, self.ambient_dim))
            r = 0
            for b, o in zip(blocks, self.offsets):
                out[r : r + b.shape[0], o : o + b.shape[1]] = b
                r += b.shape[0]
            return out
        if k in ("CIRCLE", "EUCLIDEAN"):
            return np.zeros((0, self.n))
        if k == "SPHERE":
            return 2.0 * x[None, :]
        if k == "M_PLUS":
            _, Px = _quad_forms(self.sys, x)
            return 2.0 * np.vstack([x, Px])
        return np.vstack([2.0 * x, fkm_gradient(self.sys, x)])

    def residual(self, x) -> float:
        g = self.constraints(x)
        return float(np.abs(g).max()) if g.size else 0.0


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    """A point of ``spec`` given by its flat ambient coordinates ``x``."""

    x: np.ndarray
    spec: ManifoldSpec

    @property
    def components(self) -> list:
        return self.spec.split(self.x)

    def residual(self) -> float:
        return self.spec.residual(self.x)


# --------------------------------------------------------------------------
# the Stiefel parametrisation of M_+ for m = 1


def psi_map(y, z, tol=CONSTRAINT_TOL) -> SurfacePoint:
    """(y, z) in S^{l-1} x S^{l-2} -> (y, zy)/sqrt(2) on the focal set M_+.

    ``y`` is a unit quaternion or octonion, ``z`` a unit imaginary one.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if y.shape != z.shape or y.shape[-1] not in (4, 8):
        raise ValueError("psi_map needs two quaternions or two octonions")
    if abs(y @ y - 1.0) > tol:
        raise ValueError("y is not a unit vector")
    if abs(z @ z - 1.0) > tol or abs(z[0]) > tol:
        raise ValueError("z is not a unit imaginary vector")
    x = np.concatenate([y, cd_mul(z, y)]) / np.sqrt(2.0)
    return SurfacePoint(x, ManifoldSpec.m_plus(clifford_system(1, y.shape[-1])))


def psi_inverse(x):
    """Inverse of :func:`psi_map` on the ambient vector ``x = (u, v)``.

    Returns ``(y, z) = (sqrt(2) u, 2 v conj(u))``; broadcasts over leading axes.
    """
    x = np.asarray(x, dtype=float)
    l = x.shape[-1] // 2  # noqa: E741
    u, v = x[..., :l], x[..., l:]
    return np.sqrt(2.0) * u, 2.0 * cd_mul(v, cd_conj(u))


# --------------------------------------------------------------------------
# projection and sampling


def _newton_min_norm(spec, x, tol, max_iter, history=None):
    for _ in range(max_iter):
        g = spec.constraints(x)
        res = float(np.abs(g).max())
        if history is not None:
            history.append(res)
        if res < tol:
            return x, res
        x = x - np.linalg.lstsq(spec.jacobian(x), g, rcond=None)[0]
    g = spec.constraints(x)
    res = float(np.abs(g).max())
    if history is not None:
        history.append(res)
    return x, res


def _project_m_minus(sys, x, tol, max_iter, history=None):
    # M_- = {x : P_t x = x for some unit t}; alternate t-update and eigen-projection
    P = sys.P
    for _ in range(max_iter):
        x = x / np.linalg.norm(x)
        res = abs(fkm_eval(sys, x) + 1.0)
        if history is not None:
            history.append(res)
        if res < tol:
            return x, res
        p, _ = _quad_forms(sys, x)
        t = p / np.linalg.norm(p)
        x = x + np.einsum("i,iab,b->a", t, P, x)
    x = x / np.linalg.norm(x)
    return x, abs(fkm_eval(sys, x) + 1.0)


def project_to_level(spec: ManifoldSpec, x0, tol=1e-13, max_iter=50, history=None) -> SurfacePoint:
    """Newton projection of ``x0`` onto ``spec`` with minimum-norm steps.

    Points already within ``tol`` are returned unchanged.  Pass a list as
    ``history`` to collect the residual after every iteration.
    """
    x0 = np.array(x0, dtype=float)
    if spec.residual(x0) < tol:
        if history is not None:
            history.append(spec.residual(x0))
        return SurfacePoint(x0, spec)
    if spec.kind == "PRODUCT":
        parts = [
            project_to_level(f, xi, tol, max_iter, history).x
            for f, xi in zip(spec.factors, spec.split(x0))
        ]
        return SurfacePoint(np.concatenate(parts), spec)
    if spec.kind == "M_MINUS":
        x, res = _project_m_minus(spec.sys, x0, tol, max_iter, history)
    else:
        x, res = _newton_min_norm(spec, x0, tol, max_iter, history)
    if not res < tol:
        raise ProjectionError(f"Newton projection onto {spec!r} did not converge", res)
    return SurfacePoint(x, spec)


def _unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _sample_level(spec, rng, restarts):
    sys, c = spec.sys, spec.value
    for _ in range(restarts):
        x0 = _unit(rng, sys.dim)
        try:
            return project_to_level(spec, x0)
        except ProjectionError:
            pass
        # bisection along the great circle towards a focal point on the other side
        f0 = fkm_eval(sys, x0) - c
        target_spec = ManifoldSpec.m_plus(sys) if f0 < 0 else ManifoldSpec.m_minus(sys)
        target = _sample_focal(target_spec, rng, restarts).x
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            xm = (1 - mid) * x0 + mid * target
            xm /= np.linalg.norm(xm)
            if (fkm_eval(sys, xm) - c) * f0 > 0:
                lo = mid
            else:
                hi = mid
        try:
            return project_to_level(spec, xm)
        except ProjectionError:
            continue
    raise ProjectionError(f"sampling {spec!r} failed after {restarts} restarts")


def _sample_focal(spec, rng, restarts):
    sys = spec.sys
    if spec.kind == "M_MINUS":
        t = _unit(rng, sys.m + 1)
        Pt = np.einsum("i,iab->ab", t, sys.P)
        x = (np.eye(sys.dim) + Pt) @ rng.standard_normal(sys.dim)
        return project_to_level(spec, x / np.linalg.norm(x))
    if sys.m == 1:
        l = sys.l  # noqa: E741
        if l in (4, 8):
            y = _unit(rng, l)
            z = np.concatenate([[0.0], _unit(rng, l - 1)])
            return SurfacePoint(psi_map(y, z).x, spec)
        # Stiefel description: u perp v, |u| = |v| = 1/sqrt(2)
        u = _unit(rng, l)
        v = rng.standard_normal(l)
        v -= (v @ u) * u
        v /= np.linalg.norm(v)
        return project_to_level(spec, np.concatenate([u, v]) / np.sqrt(2.0))
    last = np.nan
    for _ in range(restarts):
        try:
            return project_to_level(spec, _unit(rng, sys.dim))
        except ProjectionError as err:
            last = err.residual
    raise ProjectionError(f"sampling {spec!r} failed after {restarts} restarts", last)


def sample_point(spec: ManifoldSpec, seed, restarts: int = 20) -> SurfacePoint:
    """Deterministic random point of ``spec`` for a given seed.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    k = spec.kind
    if k in ("LEVEL_SET", "M_PLUS", "M_MINUS") and spec.sys.l < spec.sys.m + 1:
        # second multiplicity l - m - 1 must not be negative
        raise ValueError(f"{spec!r} is empty or degenerate (l < m + 1)")
    if k == "PRODUCT":
        parts = [sample_point(f, rng, restarts).x for f in spec.factors]
        return SurfacePoint(np.concatenate(parts), spec)
    if k == "CIRCLE":
        return SurfacePoint(np.array([rng.uniform(0.0, 2 * np.pi)]), spec)
    if k == "EUCLIDEAN":
        return SurfacePoint(rng.standard_normal(spec.n), spec)
    if k == "SPHERE":
        return SurfacePoint(_unit(rng, spec.n + 1), spec)
    if k == "LEVEL_SET":
        return _sample_level(spec, rng, restarts)
    return _sample_focal(spec, rng, restarts)


# --------------------------------------------------------------------------
# charts


def _tangent_basis(spec: ManifoldSpec, x):
    """Orthonormal (tangent, normal) bases at x; product factors kept block-wise."""
    if spec.kind == "PRODUCT":
        n = spec.ambient_dim
        Ts, Ns = [], []
        for f, o, xi in zip(spec.factors, spec.offsets, spec.split(x)):
            T, N = _tangent_basis(f, xi)
            Tp = np.zeros((n, T.shape[1]))
            Tp[o : o + f.ambient_dim] = T
            Np = np.zeros((n, N.shape[1]))
            Np[o : o + f.ambient_dim] = N
            Ts.append(Tp)
            Ns.append(Np)
        return np.hstack(Ts), np.hstack(Ns)
    if spec.kind == "M_MINUS":
        raise ChartError("the defining function of M_- is critical there; no graph chart")
    Dg = spec.jacobian(x)
    if Dg.shape[0] == 0:
        return np.eye(spec.ambient_dim), np.zeros((spec.ambient_dim, 0))
    U, s, Vt = np.linalg.svd(Dg)
    if s.min() < REGULARITY_TOL * max(1.0, s.max()):
        raise ChartError(f"constraint Jacobian rank deficient (sigma_min={s.min():.2e})")
    r = Dg.shape[0]
    return Vt[r:].T.copy(), Vt[:r].T.copy()


class Chart:
    """Graph chart ``u -> p + B u + N lambda(u)`` around a base point.

    ``B`` is an orthonormal tangent basis and ``N`` an orthonormal normal
    basis at the base point; ``lambda(u)`` is found by Newton's method so
    that the constraints hold.  The coordinate vectors :meth:`frame` are
    computed by implicit differentiation, so they are exact up to round-off.
    """

    def __init__(self, spec: ManifoldSpec, base: SurfacePoint):
        self.spec = spec
        self.base = base
        self.basis, self.normal = _tangent_basis(spec, base.x)
        self.dim = self.basis.shape[1]

    def eval(self, u, tol=1e-15, max_iter=30) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if not np.any(u):
            return self.base.x.copy()
        x = self.base.x + self.basis @ u
        N = self.normal
        if N.shape[1] == 0:
            return x
        for _ in range(max_iter):
            g = self.spec.constraints(x)
            if np.abs(g).max() < tol:
                break
            step = np.linalg.solve(self.spec.jacobian(x) @ N, g)
            x = x - N @ step
            if np.abs(step).max() < 1e-17:
                break
        else:
            res = self.spec.residual(x)
            if res > CONSTRAINT_TOL:
                raise ProjectionError("chart retraction did not converge", res)
        return x

    def point(self, u) -> SurfacePoint:
        return SurfacePoint(self.eval(u), self.spec)

    def frame(self, u=None) -> np.ndarray:
        """Coordinate tangent vectors d eval / d u_i as columns."""
        if u is None or not np.any(u):
            x = self.base.x
        else:
            x = self.eval(u)
        return self.frame_at(x)

    def frame_at(self, x) -> np.ndarray:
        B, N = self.basis, self.normal
        if N.shape[1] == 0:
            return B.copy()
        Dg = self.spec.jacobian(x)
        return B - N @ np.linalg.solve(Dg @ N, Dg @ B)

    def coords(self, W) -> np.ndarray:
        """Chart components of tangent vector(s) W at the base point."""
        return self.basis.T @ W


def chart(spec: ManifoldSpec, p: SurfacePoint) -> Chart:
    return Chart(spec, p)


def tangent_projector(spec: ManifoldSpec, x) -> np.ndarray:
    """Orthogonal projector onto the tangent space at ``x``."""
    if spec.kind == "M_MINUS":
        raise ChartError("tangent projector undefined through the critical constraint of M_-")
    Dg = spec.jacobian(x)
    n = spec.ambient_dim
    if Dg.shape[0] == 0:
        return np.eye(n)
    return np.eye(n) - Dg.T @ np.linalg.solve(Dg @ Dg.T, Dg)


# --------------------------------------------------------------------------
# M_+ : distinguished direction and curvature


class MPlusSplitting(NamedTuple):
    eta: np.ndarray
    V: np.ndarray
    closure_residual: float


def tangent_basis_mplus(sys: CliffordSystem, x) -> MPlusSplitting:
    """eta = P0 P1 x and an orthonormal basis of V = eta^perp in T_x M_+.

    ``closure_residual`` measures how far P0 P1 V is from V; it vanishes for
    m = 1, where V is a complex subspace.
    """
    x = np.asarray(x, dtype=float)
    J = sys.P0P1
    eta = J @ x
    normals = np.vstack([x, sys.P @ x, eta])
    V = null_space(normals)
    JV = J @ V
    closure = float(np.abs(JV - V @ (V.T @ JV)).max()) if V.size else 0.0
    return MPlusSplitting(eta, V, closure)


def sectional_curvature_mplus(sys: CliffordSystem, x, X, Y, tol=1e-8) -> float:
    """Sectional curvature of M_+ (induced metric) on the plane X ^ Y via Gauss.

    Uses the orthonormal normal frame {x, P_0 x, ..., P_m x} of M_+ in R^{2l}
    and II(X, Y) = sum_nu <-D_X nu, Y> nu.
    """
    x, X, Y = (np.asarray(a, dtype=float) for a in (x, X, Y))
    G = np.array([[X @ X, X @ Y], [X @ Y, Y @ Y]])
    if np.abs(G - np.eye(2)).max() > tol:
        raise ValueError("X, Y must be orthonormal")

    # D_X of the normal fields x, P_i x is X, P_i X
    def second_form(A, B):
        return -np.concatenate([[A @ B], np.einsum("iab,b->ia", sys.P, A) @ B])

    return float(
        second_form(X, X) @ second_form(Y, Y) - second_form(X, Y) @ second_form(X, Y)
    )


def random_unit_tangents(spec: ManifoldSpec, p: SurfacePoint, rng, count=2) -> np.ndarray:
    """``count`` orthonormal random tangent vectors at p (columns)."""
    T, _ = _tangent_basis(spec, p.x)
    Q, _ = np.linalg.qr(T @ rng.standard_normal((T.shape[1], count)))
    return Q
