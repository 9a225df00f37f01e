"""Cayley-Dickson algebras and symmetric Clifford systems.

Hypercomplex numbers are plain numpy arrays whose last axis holds the
coefficients over the basis ``(1, e1, e2, ...)``.  Every routine
broadcasts over leading axes, so a batch of quaternions is an array of
shape ``(..., 4)``.

The doubling convention is fixed once and for all::

    (x, y)(u, v) = (xu - conj(v) y,  v x + y conj(u))

With it ``e1 e2 = e3`` in the quaternions and ``e4 e4 = -1`` in the
octonions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "cd_mul",
    "cd_conj",
    "cd_norm",
    "cd_inv",
    "basis_element",
    "associator",
    "left_mul_matrix",
    "delta_m",
    "CliffordSystem",
    "clifford_system",
]


def _check_dim(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"Cayley-Dickson dimension must be a power of two, got {n}")


def cd_conj(a):
    """Conjugate: negate every imaginary coefficient."""
    a = np.asarray(a)
    out = -a
    out[..., 0] = a[..., 0]
    return out


def cd_mul(a, b):
    """Cayley-Dickson product of ``a`` and ``b`` (same last-axis length)."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[-1]
    if b.shape[-1] != n:
        raise ValueError(f"dimension mismatch: {n} vs {b.shape[-1]}")
    _check_dim(n)
    return _mul(a, b)


def cd_mul_recursive(a, b):
    """Pure doubling-rule product, without the quaternion shortcut."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[-1]
    if n == 1:
        return a * b
    h = n // 2
    x, y = a[..., :h], a[..., h:]
    u, v = b[..., :h], b[..., h:]
    first = cd_mul_recursive(x, u) - cd_mul_recursive(cd_conj(v), y)
    second = cd_mul_recursive(v, x) + cd_mul_recursive(y, cd_conj(u))
    return np.concatenate(np.broadcast_arrays(first, second), axis=-1)


def _quat_mul(a, b):
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def _mul(a, b):
    n = a.shape[-1]
    if n == 1:
        return a * b
    if n == 4:
        # closed form of the doubling rule, checked against it in the tests
        return _quat_mul(a, b)
    h = n // 2
    x, y = a[..., :h], a[..., h:]
    u, v = b[..., :h], b[..., h:]
    first = _mul(x, u) - _mul(cd_conj(v), y)
    second = _mul(v, x) + _mul(y, cd_conj(u))
    return np.concatenate(np.broadcast_arrays(first, second), axis=-1)


def cd_norm(a):
    return np.linalg.norm(np.asarray(a), axis=-1)


def cd_inv(a):
    a = np.asarray(a)
    return cd_conj(a) / np.sum(a * a, axis=-1, keepdims=True)


def basis_element(i: int, n: int, dtype=float):
    """The i-th standard basis element (``e0 = 1``) of the dimension-n algebra."""
    _check_dim(n)
    e = np.zeros(n, dtype=dtype)
    e[i] = 1
    return e


def associator(a, b, c):
    """(ab)c - a(bc); vanishes identically only in the associative cases n <= 4."""
    return cd_mul(cd_mul(a, b), c) - cd_mul(a, cd_mul(b, c))


@lru_cache(maxsize=None)
def _left_mul(i: int, n: int) -> np.ndarray:
    cols = [cd_mul(basis_element(i, n, int), basis_element(j, n, int)) for j in range(n)]
    mat = np.stack(cols, axis=1).astype(np.int64)
    mat.setflags(write=False)
    return mat


def left_mul_matrix(i: int, n: int) -> np.ndarray:
    """Integer matrix of ``x -> e_i x`` on the dimension-n algebra."""
    return _left_mul(i, n).copy()


_DELTA_TABLE = {1: 1, 2: 2, 3: 4, 4: 4, 5: 8, 6: 8, 7: 8, 8: 8}


def delta_m(m: int) -> int:
    """Dimension of the irreducible module of the Clifford algebra C_{m-1}."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    periods, r = divmod(m - 1, 8)
    return _DELTA_TABLE[r + 1] * 16**periods


@dataclass(frozen=True, eq=False)
class CliffordSystem:
    """Symmetric Clifford system ``P_0, ..., P_m`` on R^{2l}, l = k * delta(m).

    The matrices are exact integers; use :attr:`P` for a float copy.
    """

    m: int
    k: int
    matrices: tuple = field(repr=False)

    @property
    def l(self) -> int:  # noqa: E743
        return self.k * delta_m(self.m)

    @property
    def dim(self) -> int:
        return 2 * self.l

    @property
    def P(self) -> np.ndarray:
        """Float stack of shape (m+1, 2l, 2l)."""
        return _float_stack(self)

    @property
    def P0P1(self) -> np.ndarray:
        return _p0p1(self)

    def anticommutator_defect(self) -> int:
        """max |P_i P_j + P_j P_i - 2 delta_ij I| in integer arithmetic."""
        eye = np.eye(self.dim, dtype=np.int64)
        worst = 0
        for i, Pi in enumerate(self.matrices):
            for j, Pj in enumerate(self.matrices):
                d = Pi @ Pj + Pj @ Pi - (2 * eye if i == j else 0)
                worst = max(worst, int(np.abs(d).max()))
        return worst


@lru_cache(maxsize=None)
def _float_stack(sys: CliffordSystem) -> np.ndarray:
    out = np.stack(sys.matrices).astype(float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _p0p1(sys: CliffordSystem) -> np.ndarray:
    out = (sys.matrices[0] @ sys.matrices[1]).astype(float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def clifford_system(m: int, k: int = 1) -> CliffordSystem:
    """Build a symmetric Clifford system for ``1 <= m <= 7``.

    ``P_0 = diag(I, -I)``, ``P_1 = [[0, I], [I, 0]]`` and, for i >= 1,
    ``P_{1+i} = [[0, E_i], [-E_i, 0]]`` with ``E_i`` the left multiplication
    by ``e_i`` on the algebra of dimension delta(m), repeated k times along
    the block diagonal.
    """
    if not 1 <= m <= 7:
        raise ValueError(f"Clifford systems supported for m <= 7 (1 <= m <= 7), got m={m}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    d = delta_m(m)
    l = k * d  # noqa: E741
    eye = np.eye(l, dtype=np.int64)
    zero = np.zeros((l, l), dtype=np.int64)
    mats = [np.block([[eye, zero], [zero, -eye]]), np.block([[zero, eye], [eye, zero]])]
    for i in range(1, m):
        E = np.kron(np.eye(k, dtype=np.int64), _left_mul(i, d))
        mats.append(np.block([[zero, E], [-E, zero]]))
    for P in mats:
        P.setflags(write=False)
    return CliffordSystem(m=m, k=k, matrices=tuple(mats))
