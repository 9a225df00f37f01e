import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from otfkm import algebra as alg
from otfkm import geometry as geo

SYSTEMS = [(1, 4), (1, 8), (2, 2), (3, 1), (3, 2)]


def unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def test_fkm_known_values(rng):
    s = alg.clifford_system(1, 4)
    u = unit(rng, 4)
    assert geo.fkm_eval(s, np.concatenate([u, np.zeros(4)])) == pytest.approx(-1.0, abs=1e-14)
    y = unit(rng, 4)
    z = np.concatenate([[0.0], unit(rng, 3)])
    assert geo.fkm_eval(s, geo.psi_map(y, z).x) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m,k", SYSTEMS)
def test_fkm_range(m, k, rng):
    s = alg.clifford_system(m, k)
    x = rng.standard_normal((1000, s.dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    f = geo.fkm_eval(s, x)
    assert f.min() >= -1 - 1e-12 and f.max() <= 1 + 1e-12


@pytest.mark.parametrize("m,k", SYSTEMS)
def test_sphere_gradient_matches_fd(m, k, rng):
    s = alg.clifford_system(m, k)
    x = unit(rng, s.dim)
    g = geo.sphere_gradient(s, x)
    assert abs(g @ x) < 1e-12
    T = np.linalg.svd(np.eye(s.dim) - np.outer(x, x))[0][:, : s.dim - 1]
    h = 1e-5
    for v in T.T[:4]:
        # great-circle curve keeps the point on the sphere
        fp = geo.fkm_eval(s, np.cos(h) * x + np.sin(h) * v)
        fm = geo.fkm_eval(s, np.cos(h) * x - np.sin(h) * v)
        assert abs((fp - fm) / (2 * h) - g @ v) < 1e-6


@pytest.mark.parametrize("m,k", [(1, 4), (2, 2), (3, 1)])
def test_focal_points_are_critical(m, k):
    s = alg.clifford_system(m, k)
    for seed in range(5):
        p = geo.sample_point(geo.ManifoldSpec.m_plus(s), seed)
        assert np.abs(geo.sphere_gradient(s, p.x)).max() < 1e-10


@pytest.mark.parametrize("m,k", SYSTEMS)
def test_unit_normal(m, k):
    s = alg.clifford_system(m, k)
    spec = geo.ManifoldSpec.level_set(s, 0.0)
    for seed in range(10):
        x = geo.sample_point(spec, seed).x
        xi = geo.unit_normal_m0(s, x)
        assert abs(xi @ xi - 1) < 1e-10
        assert abs(xi @ x) < 1e-12
        g = geo.sphere_gradient(s, x)
        assert abs(abs(g @ xi) / np.linalg.norm(g) - 1) < 1e-8


def test_unit_normal_off_m0():
    s = alg.clifford_system(1, 4)
    with pytest.raises(ValueError):
        geo.unit_normal_m0(s, np.eye(8)[0])


def test_psi_map_values(rng):
    p = geo.psi_map(np.eye(4)[0], np.eye(4)[1])
    np.testing.assert_allclose(p.x, np.array([1, 0, 0, 0, 0, 1, 0, 0]) / np.sqrt(2), atol=0)
    for n in (4, 8):
        y = unit(rng, n)
        z = np.concatenate([[0.0], unit(rng, n - 1)])
        p = geo.psi_map(y, z)
        assert p.residual() < 1e-12
        y2, z2 = geo.psi_inverse(p.x)
        np.testing.assert_allclose(y2, y, atol=1e-14)
        np.testing.assert_allclose(z2, z, atol=1e-14)


def test_psi_map_rejects_bad_input():
    with pytest.raises(ValueError):
        geo.psi_map(np.eye(4)[0], np.eye(4)[0])
    with pytest.raises(ValueError):
        geo.psi_map(2 * np.eye(4)[0], np.eye(4)[1])


@pytest.mark.parametrize("m,k", SYSTEMS)
def test_dimensions(m, k):
    s = alg.clifford_system(m, k)
    l = s.l  # noqa: E741
    assert geo.ManifoldSpec.level_set(s, 0.3).dim == 2 * l - 2
    assert geo.ManifoldSpec.m_plus(s).dim == 2 * l - m - 2
    assert geo.ManifoldSpec.m_minus(s).dim == l + m - 1
    assert geo.ManifoldSpec.level_set(s, 1.0).kind == "M_PLUS"
    assert geo.ManifoldSpec.level_set(s, -1.0).kind == "M_MINUS"


@pytest.mark.parametrize("kind", ["level0", "level", "plus", "minus"])
@pytest.mark.parametrize("m,k", SYSTEMS)
def test_sampling_hits_manifold(kind, m, k):
    s = alg.clifford_system(m, k)
    spec = {
        "level0": geo.ManifoldSpec.level_set(s, 0.0),
        "level": geo.ManifoldSpec.level_set(s, -0.4),
        "plus": geo.ManifoldSpec.m_plus(s),
        "minus": geo.ManifoldSpec.m_minus(s),
    }[kind]
    for seed in range(3):
        p = geo.sample_point(spec, seed)
        assert p.residual() < 1e-10
        if kind == "plus":
            assert np.abs(np.einsum("iab,a,b->i", s.P, p.x, p.x)).max() < 1e-10
        if kind == "level0":
            assert abs(geo.fkm_eval(s, p.x)) < 1e-10


def test_sampling_deterministic():
    spec = geo.ManifoldSpec.level_set(alg.clifford_system(2, 2), 0.0)
    assert np.array_equal(geo.sample_point(spec, 7).x, geo.sample_point(spec, 7).x)
    assert not np.array_equal(geo.sample_point(spec, 7).x, geo.sample_point(spec, 8).x)


def test_sampling_degenerate():
    # l = m gives an empty focal set
    with pytest.raises(ValueError, match="empty or degenerate"):
        geo.sample_point(geo.ManifoldSpec.m_plus(alg.clifford_system(2, 1)), 0)


def test_projection_fixed_point():
    spec = geo.ManifoldSpec.level_set(alg.clifford_system(1, 4), 0.0)
    p = geo.sample_point(spec, 3)
    assert np.array_equal(geo.project_to_level(spec, p.x).x, p.x)


@pytest.mark.parametrize("kind", ["level0", "plus"])
def test_projection_converges_quadratically(kind, rng):
    s = alg.clifford_system(2, 2)
    spec = geo.ManifoldSpec.level_set(s, 0.0) if kind == "level0" else geo.ManifoldSpec.m_plus(s)
    p = geo.sample_point(spec, 1)
    d = rng.standard_normal(s.dim)
    x0 = p.x + 1e-3 * d / np.linalg.norm(d)
    hist = []
    q = geo.project_to_level(spec, x0, history=hist)
    assert q.residual() < 1e-12
    assert len(hist) <= 6  # initial residual plus at most 5 iterations
    if kind == "level0":
        assert abs(geo.fkm_eval(s, q.x)) < 1e-12


def test_projection_failure_reports_residual():
    spec = geo.ManifoldSpec.m_plus(alg.clifford_system(1, 4))
    with pytest.raises(geo.ProjectionError) as err:
        geo.project_to_level(spec, np.ones(8), max_iter=1)
    assert err.value.residual > 0


@pytest.mark.parametrize(
    "spec",
    [
        geo.ManifoldSpec.level_set(alg.clifford_system(1, 4), 0.0),
        geo.ManifoldSpec.level_set(alg.clifford_system(2, 2), 0.5),
        geo.ManifoldSpec.m_plus(alg.clifford_system(1, 8)),
        geo.ManifoldSpec.product(geo.ManifoldSpec.circle(), geo.ManifoldSpec.m_plus(alg.clifford_system(1, 4))),
        geo.ManifoldSpec.product(geo.ManifoldSpec.circle(), geo.ManifoldSpec.sphere(3), geo.ManifoldSpec.sphere(2)),
    ],
    ids=repr,
)
def test_chart(spec):
    p = geo.sample_point(spec, 5)
    ch = geo.chart(spec, p)
    assert np.array_equal(ch.eval(np.zeros(ch.dim)), p.x)
    E = ch.frame()
    np.testing.assert_allclose(E.T @ E, np.eye(ch.dim), atol=1e-10)
    u = 1e-2 * np.arange(1, ch.dim + 1) / ch.dim
    x = ch.eval(u)
    assert spec.residual(x) < 1e-12
    # FD metric at the origin is the identity
    h = 1e-6
    D = np.stack([(ch.eval(h * e) - ch.eval(-h * e)) / (2 * h) for e in np.eye(ch.dim)])
    np.testing.assert_allclose(D @ D.T, np.eye(ch.dim), atol=1e-8)
    # the implicit-differentiation frame agrees with FD away from the origin
    Du = np.stack([(ch.eval(u + h * e) - ch.eval(u - h * e)) / (2 * h) for e in np.eye(ch.dim)]).T
    np.testing.assert_allclose(ch.frame(u), Du, atol=1e-8)


def test_m0_chart_dimension():
    spec = geo.ManifoldSpec.level_set(alg.clifford_system(1, 4), 0.0)
    assert geo.chart(spec, geo.sample_point(spec, 0)).dim == 6


def test_m_minus_has_no_chart():
    spec = geo.ManifoldSpec.m_minus(alg.clifford_system(1, 4))
    with pytest.raises(geo.ChartError):
        geo.chart(spec, geo.sample_point(spec, 0))


@pytest.mark.parametrize("k", [4, 8])
def test_mplus_splitting(k):
    s = alg.clifford_system(1, k)
    spec = geo.ManifoldSpec.m_plus(s)
    for seed in range(10):
        x = geo.sample_point(spec, seed).x
        split = geo.tangent_basis_mplus(s, x)
        eta = split.eta
        assert abs(eta @ eta - 1) < 1e-12
        assert max(abs(eta @ x), abs(eta @ s.P[0] @ x), abs(eta @ s.P[1] @ x)) < 1e-12
        assert split.V.shape[1] == spec.dim - 1
        JV = s.P0P1 @ split.V
        normals = np.vstack([x, s.P @ x, eta])
        assert np.abs(normals @ JV).max() < 1e-12
        assert split.closure_residual < 1e-12


def _isotropic_unit(quads, B, rng):
    """Unit vector in span(B) with v^t Q v = 0 for every Q (min-norm Newton)."""
    c = rng.standard_normal(B.shape[1])
    Qs = [B.T @ Q @ B for Q in quads]
    for _ in range(60):
        F = np.array([c @ Q @ c for Q in Qs] + [c @ c - 1])
        if np.abs(F).max() < 1e-15:
            break
        Jac = np.array([2 * Q @ c for Q in Qs] + [2 * c])
        c = c - np.linalg.lstsq(Jac, F, rcond=None)[0]
    return B @ c


def test_curvature_round_value(rng):
    # planes with all P_i-pairings zero have the round-sphere value 1
    s = alg.clifford_system(1, 8)
    x = geo.sample_point(geo.ManifoldSpec.m_plus(s), 2).x
    T = np.linalg.svd(np.vstack([x, s.P @ x]))[2][3:].T
    X = _isotropic_unit(list(s.P), T, rng)
    cons = np.vstack([X, s.P @ X])  # Y orthogonal to X and to every P_i X
    W = T @ np.linalg.svd(cons @ T)[2][3:].T
    Y = _isotropic_unit(list(s.P), W, rng)
    pair = [X @ P @ X for P in s.P] + [Y @ P @ Y for P in s.P] + [X @ P @ Y for P in s.P]
    assert np.abs(pair).max() < 1e-12
    assert geo.sectional_curvature_mplus(s, x, X, Y) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m,k", [(1, 4), (2, 2), (3, 2)])
def test_curvature_matches_expansion(m, k, rng):
    s = alg.clifford_system(m, k)
    spec = geo.ManifoldSpec.m_plus(s)
    p = geo.sample_point(spec, 0)
    for _ in range(20):
        X, Y = geo.random_unit_tangents(spec, p, rng, 2).T
        expect = 1 + sum((X @ P @ X) * (Y @ P @ Y) - (X @ P @ Y) ** 2 for P in s.P)
        assert geo.sectional_curvature_mplus(s, p.x, X, Y) == pytest.approx(expect, abs=1e-13)


def test_curvature_requires_orthonormal():
    s = alg.clifford_system(1, 4)
    x = geo.sample_point(geo.ManifoldSpec.m_plus(s), 0).x
    with pytest.raises(ValueError):
        geo.sectional_curvature_mplus(s, x, np.ones(8), np.ones(8))


@given(st.integers(0, 2**32 - 1))
def test_random_tangents_orthonormal(seed):
    spec = geo.ManifoldSpec.level_set(alg.clifford_system(1, 4), 0.0)
    rng = np.random.default_rng(seed)
    p = geo.sample_point(spec, rng)
    Q = geo.random_unit_tangents(spec, p, rng, 3)
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)
    assert np.abs(spec.jacobian(p.x) @ Q).max() < 1e-10
