"""Named verification suites.

Each suite takes a :class:`~otfkm.report.RunConfig` and returns a list of
:class:`~otfkm.report.CheckRecord`.  A failing check never stops the suite;
sampler failures are recorded with status ``"sampler-failure"``.
"""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from . import algebra as alg
from . import calculus as calc
from . import frames as fr
from . import geometry as geo
from . import structures as st
from .report import CheckRecord, RunConfig

DEFAULT_SEED = 0


def _rng(cfg: RunConfig, tag: str) -> np.random.Generator:
    # one independent stream per check so checks do not perturb each other
    key = [cfg.seed] + [ord(c) for c in tag]
    return np.random.default_rng(np.random.SeedSequence(key))


def _unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


class _Recorder:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.records: list[CheckRecord] = []

    def tol(self, name, default):
        return self.cfg.tolerances.get(name, default)

    def add(self, name, value, tol, kind="max", gating=True, witness=None):
        tol = self.tol(name, tol)
        self.records.append(CheckRecord(name, float(value), float(tol), kind, gating, witness))

    def witness_gating(self) -> bool:
        # existence witnesses are pre-verified only for the shipped seed
        return self.cfg.seed == DEFAULT_SEED

    def run(self, name, fn: Callable, tol, kind="max", gating=True):
        try:
            value, witness = fn()
        except geo.ProjectionError as err:
            self.records.append(CheckRecord(name, float("nan"), float(self.tol(name, tol)), kind, gating,
                                            None, status="sampler-failure", note=str(err)))
            return
        except Exception as err:  # recorded, never aborts the run
            self.records.append(CheckRecord(name, float("nan"), float(self.tol(name, tol)), kind, gating,
                                            None, status="error", note=f"{type(err).__name__}: {err}"))
            return
        self.add(name, value, tol, kind, gating, witness)


def _worst(values, points=None):
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values))
    return float(values[i]), (None if points is None else np.asarray(points[i]).ravel())


# --------------------------------------------------------------------------
# algebra


def algebra_suite(cfg: RunConfig) -> list[CheckRecord]:
    r = _Recorder(cfg)

    def clifford():
        worst, sym, skew = 0, 0, 0
        for m, k in itertools.product(range(1, 8), (1, 2)):
            s = alg.clifford_system(m, k)
            worst = max(worst, s.anticommutator_defect())
            eye = np.eye(s.dim, dtype=np.int64)
            for P in s.matrices:
                sym = max(sym, int(np.abs(P - P.T).max()), int(np.abs(P @ P.T - eye).max()))
            J = s.matrices[0] @ s.matrices[1]
            skew = max(skew, int(np.abs(J + J.T).max()), int(np.abs(J @ J.T - eye).max()))
        return worst, sym, skew

    res = {}

    def get():
        if not res:
            res["v"] = clifford()
        return res["v"]

    r.run("clifford_anticommutation", lambda: (get()[0], None), 0.0)
    r.run("clifford_symmetric_orthogonal", lambda: (get()[1], None), 0.0)
    r.run("p0p1_skew_orthogonal", lambda: (get()[2], None), 0.0)

    def delta_table():
        expect = {1: 1, 2: 2, 3: 4, 4: 4, 5: 8, 6: 8, 7: 8, 8: 8, 9: 16, 14: 128}
        return max(abs(alg.delta_m(m) - d) for m, d in expect.items()), None

    r.run("delta_table", delta_table, 0.0)

    for n in (4, 8):
        rng = _rng(cfg, f"alg{n}")
        a = rng.standard_normal((cfg.samples, n))
        b = rng.standard_normal((cfg.samples, n))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        r.run(f"norm_multiplicative_dim{n}",
              lambda: (np.abs(alg.cd_norm(alg.cd_mul(a, b)) - 1.0).max(), None), 1e-12)
        r.run(f"conj_reverses_products_dim{n}",
              lambda: (np.abs(alg.cd_conj(alg.cd_mul(a, b)) - alg.cd_mul(alg.cd_conj(b), alg.cd_conj(a))).max(), None), 1e-12)
        r.run(f"alternativity_dim{n}",
              lambda: (max(np.abs(alg.associator(a, a, b)).max(), np.abs(alg.associator(a, b, b)).max(),
                           np.abs(alg.associator(a, b, a)).max()), None), 1e-12)

    def nonassoc():
        best, trip = 0.0, None
        for i, j, k in itertools.product(range(1, 8), repeat=3):
            e = [alg.basis_element(t, 8) for t in (i, j, k)]
            v = np.abs(alg.associator(*e)).max()
            if v > best:
                best, trip = v, (i, j, k)
        return best, np.array(trip, dtype=float)

    r.run("octonion_nonassociativity_witness", nonassoc, 0.1, kind="min")

    def skew_pairing():
        rng = _rng(cfg, "skew")
        worst = 0.0
        for m in range(1, 8):
            s = alg.clifford_system(m, 1)
            xs = rng.standard_normal((cfg.samples, s.dim))
            for i, j in itertools.permutations(range(m + 1), 2):
                A = s.P[i] @ s.P[j]
                worst = max(worst, np.abs(np.einsum("na,ab,nb->n", xs, A, xs)).max() / s.dim)
        return worst, None

    r.run("skew_pairing", skew_pairing, 1e-12)
    return r.records


# --------------------------------------------------------------------------
# the almost Hermitian structure on M_0


def prop1_suite(cfg: RunConfig, nijenhuis_points: int = 3) -> list[CheckRecord]:
    r = _Recorder(cfg)
    m, k = cfg.m or 1, cfg.k or 4
    sys = alg.clifford_system(m, k)
    spec = geo.ManifoldSpec.level_set(sys, 0.0)
    rng = _rng(cfg, "prop1")
    stats = {}

    def collect():
        if stats:
            return stats
        acc = {n: [] for n in ("j2", "herm", "closure", "xi_unit", "xi_grad", "tangent")}
        J = sys.P0P1
        for _ in range(cfg.samples):
            p = geo.sample_point(spec, rng)
            x = p.x
            W = geo.random_unit_tangents(spec, p, rng, 2).T
            JW = st.j_m0(sys, x, W)
            acc["j2"].append(np.abs(st.j_m0(sys, x, JW) + W).max())
            acc["herm"].append(abs(JW[0] @ JW[1] - W[0] @ W[1]) + np.abs(np.sum(JW**2, 1) - 1).max())
            xi = geo.unit_normal_m0(sys, x)
            eta1, eta2 = J @ x, J @ xi
            X = W[0] - (W[0] @ eta1) * eta1 - (W[0] @ eta2) * eta2
            JX = J @ X
            acc["closure"].append(max(abs(JX @ x), abs(JX @ xi), abs(JX @ eta1), abs(JX @ eta2)))
            acc["xi_unit"].append(max(abs(xi @ xi - 1), abs(xi @ x)))
            g = geo.sphere_gradient(sys, x)
            acc["xi_grad"].append(1 - abs(g @ xi) / np.linalg.norm(g))
            acc["tangent"].append(max(np.abs(JW @ x).max(), np.abs(JW @ xi).max()))
        stats.update({n: np.array(v) for n, v in acc.items()})
        return stats

    for name, key, tol in [
        ("m0_j_squared", "j2", 1e-10),
        ("m0_hermitian", "herm", 1e-10),
        ("m0_E_closure", "closure", 1e-10),
        ("m0_normal_unit", "xi_unit", 1e-10),
        ("m0_normal_parallel_gradient", "xi_grad", 1e-8),
        ("m0_output_tangent", "tangent", 1e-10),
    ]:
        r.run(name, lambda key=key: (collect()[key].max(), None), tol)

    def probe():
        Jf = st.structure_field("J_M0", sys)
        vals = [calc.nijenhuis_norm(Jf, spec, geo.sample_point(spec, rng), cfg.fd_step)
                for _ in range(nijenhuis_points)]
        return max(vals), None

    # integrability on M_0 is open; report only
    r.run(f"m0_nijenhuis_probe_m{m}", probe, float("inf"), gating=False)
    return r.records


# --------------------------------------------------------------------------
# integrability of the product structure (m = 1)


def integrability_suite(cfg: RunConfig, ks=None) -> list[CheckRecord]:
    r = _Recorder(cfg)
    if ks is None:
        ks = (cfg.k,) if cfg.k else (4, 8)
    for k in ks:
        sys = alg.clifford_system(1, k)
        Jf = st.structure_field("J_PRODUCT", sys)
        spec = Jf.spec
        dim = spec.dim
        rng = _rng(cfg, f"thm{k}")
        npts = min(cfg.samples, 50)

        def algebraic():
            j2, herm = [], []
            for _ in range(cfg.samples):
                p = geo.sample_point(spec, rng)
                W = geo.random_unit_tangents(spec, p, rng, 2).T
                JW = Jf(p.x, W)
                j2.append(np.abs(Jf(p.x, JW) + W).max())
                herm.append(np.abs(JW @ JW.T - W @ W.T).max())
            return max(j2), max(herm)

        cache = {}
        r.run(f"product_j_squared_dim{dim}",
              lambda: (cache.setdefault("a", algebraic())[0], None), 1e-10)
        r.run(f"product_hermitian_dim{dim}",
              lambda: (cache.setdefault("a", algebraic())[1], None), 1e-10)

        def nijenhuis():
            pts = [geo.sample_point(spec, rng) for _ in range(npts)]
            vals = [calc.nijenhuis_norm(Jf, spec, p, cfg.fd_step) for p in pts]
            return _worst(vals, [p.x for p in pts])

        r.run(f"product_nijenhuis_dim{dim}", nijenhuis, 1e-4)

        def phi_intertwine():
            worst = 0.0
            for _ in range(min(cfg.samples, 20)):
                p = geo.sample_point(spec, rng)
                theta = p.x[0]
                if not 0 < theta < 2 * np.pi:
                    continue
                ch = geo.chart(spec, p)
                W = geo.random_unit_tangents(spec, p, rng, 1)[:, 0]

                def dphi(V):
                    a = ch.coords(V)
                    h = cfg.fd_step
                    f = lambda t: st.phi_embed(ch.eval(t * a)[0], ch.eval(t * a)[1:])  # noqa: E731
                    return (f(h) - f(-h)) / (2 * h)

                lhs = st.jr_flat(sys, dphi(W))
                rhs = dphi(Jf(p.x, W))
                worst = max(worst, np.abs(lhs - rhs).max() / np.exp(theta))
            return worst, None

        r.run(f"phi_intertwining_dim{dim}", phi_intertwine, 1e-6)

    def flat():
        sys = alg.clifford_system(1, 4)
        Jf = st.structure_field("J_FLAT", sys)
        return calc.nijenhuis_norm(Jf, Jf.spec, geo.sample_point(Jf.spec, 0), cfg.fd_step), None

    r.run("flat_nijenhuis", flat, 1e-12)
    return r.records


# --------------------------------------------------------------------------
# unitary frames and the first Chern form


def _point_m5(rng):
    y = _unit(rng, 4)
    z = _unit(rng, 3)
    theta = rng.uniform(0.5, 2 * np.pi - 0.5)
    return theta, y, z


def prop3_suite(cfg: RunConfig, n_slices: int = 3, grid=(128, 256), n_gauge: int = 20,
                n_closed: int = 3) -> list[CheckRecord]:
    r = _Recorder(cfg)
    rng = _rng(cfg, "prop3")
    zs = rng.standard_normal((10 * cfg.samples, 3))
    zs /= np.linalg.norm(zs, axis=1, keepdims=True)
    h = fr.h_matrix(zs)
    S = fr.s_matrix(zs)
    A, Ai = fr.gauge_matrix(zs), fr.gauge_matrix(zs, inverse=True)
    zz = zs[:, :, None] * zs[:, None, :]
    I3, I6 = np.eye(3), np.eye(6)
    r.run("h_skew", lambda: (np.abs(h + np.swapaxes(h, 1, 2)).max(), None), 1e-14)
    r.run("h_kills_z", lambda: (np.abs(np.einsum("nij,nj->ni", h, zs)).max(), None), 1e-14)
    r.run("h_squared", lambda: (np.abs(h @ h + I3 - zz).max(), None), 1e-14)
    r.run("s_squared", lambda: (np.abs(S @ S + I6).max(), None), 1e-14)
    r.run("gauge_conjugation", lambda: (np.abs(Ai @ S @ A - fr.J0).max(), None), 1e-14)
    r.run("gauge_inverse", lambda: (np.abs(Ai @ A - I6).max(), None), 1e-14)

    pts = [_point_m5(rng) for _ in range(cfg.samples)]

    def frames_check():
        acc = {n: 0.0 for n in ("vu", "srep", "yg", "xs", "jy", "hij", "jvu")}
        for theta, y, z in pts:
            F = fr.vu_frame(theta, y, z)
            acc["vu"] = max(acc["vu"], np.abs(F @ F.T - I6).max())
            p = np.concatenate([[theta], y, z])
            JF = st.j_tilde(6, p, F)
            Sz = fr.s_matrix(z)
            acc["srep"] = max(acc["srep"], np.abs(JF - Sz.T @ F).max())
            # <J V_j, V_i> = <e_i e_j, z>
            E = np.eye(4)[1:]
            eiej = alg.cd_mul(E[:, None, :], E[None, :, :])[..., 1:]
            acc["hij"] = max(acc["hij"], np.abs((F[:3] @ JF[:3].T) - eiej @ z).max())
            acc["jvu"] = max(acc["jvu"], np.abs(F[3:] @ JF[:3].T - I3).max())
            Y = fr.y_frame(theta, y, z)
            acc["yg"] = max(acc["yg"], np.abs(Y @ Y.T - I6).max())
            Xs = fr.x_star_frame(theta, y, z)
            G = Xs @ Xs.T
            target = 0.5 * (I3 + np.outer(z, z))
            acc["xs"] = max(acc["xs"], np.abs(G[:3, :3] - target).max(), np.abs(G[3:, 3:] - target).max(),
                            np.abs(G[:3, 3:]).max())
            q = st.big_psi(p)
            acc["jy"] = max(acc["jy"], np.abs(st.j_product(fr.SYS_M5, q, Y[3:]) + Y[:3]).max())
        return acc

    cache = {}
    for name, key, tol in [
        ("vu_orthonormal", "vu", 1e-12),
        ("s_represents_jtilde", "srep", 1e-10),
        ("jtilde_vv_entries", "hij", 1e-12),
        ("jtilde_vu_entries", "jvu", 1e-12),
        ("y_frame_orthonormal", "yg", 1e-12),
        ("x_star_gram", "xs", 1e-12),
        ("y_frame_unitary", "jy", 1e-10),
    ]:
        r.run(name, lambda key=key: (cache.setdefault("f", frames_check())[key], None), tol)

    spec = fr.mplus5_spec()

    def surface(theta, y, z):
        return geo.SurfacePoint(st.big_psi(np.concatenate([[theta], y, z])), spec)

    def antisym():
        worst = 0.0
        for theta, y, z in pts[:5]:
            ch = geo.chart(spec, surface(theta, y, z))
            w = fr.connection_forms(fr.y_frame_field, ch, cfg.fd_step)(np.zeros(ch.dim))
            worst = max(worst, np.abs(w + np.swapaxes(w, 0, 1)).max())
        return worst, None

    r.run("connection_antisymmetric", antisym, 1e-8)

    slices = pts[:n_slices]

    def chern_slices():
        vals, errs = [], []
        for theta, y, _ in slices:
            res = fr.slice_chern_integral(theta, y, grid)
            vals.append(abs(res.value))
            errs.append(res.error)
        cache["slice_err"] = max(errs)
        return max(vals), None

    r.run("chern_slice_integral", chern_slices, 5e-3)
    r.run("chern_slice_richardson_error", lambda: (cache.get("slice_err", np.nan), None), 5e-3)
    r.run("gauss_bonnet_contrast", lambda: (abs(fr.gauss_bonnet_sphere(grid).value - 2.0), None), 1e-3)

    def gauge():
        worst = 0.0
        rot = fr.rotation_gauge(fr.y_frame_field, lambda q: 1.3 * q[2] + np.sin(2 * q[7]))
        ph = fr.phase_gauge(fr.y_frame_field,
                            lambda q: np.array([q[1] + q[6] ** 2, np.sin(3 * q[7]), q[0] * q[8]]))
        for theta, y, z in pts[:n_gauge]:
            ch = geo.chart(spec, surface(theta, y, z))
            base = fr.chern_components(fr.y_frame_field, ch, cfg.fd_step)
            for g in (rot, ph):
                worst = max(worst, np.abs(fr.chern_components(g, ch, cfg.fd_step) - base).max())
        return worst, None

    r.run("chern_frame_independence", gauge, 1e-3)

    def closed():
        worst = 0.0
        for theta, y, z in pts[:n_closed]:
            ch = geo.chart(spec, surface(theta, y, z))
            # a non-trivial gauge keeps the 1-form alpha non-zero
            ph = fr.phase_gauge(fr.y_frame_field, lambda q: np.array([q[1] * q[6], q[7], 0.0]))
            form = lambda u: fr.chern_components(ph, ch, 1e-4, 1e-3, u0=u)  # noqa: E731
            worst = max(worst, np.abs(calc.exterior_derivative(form, ch.dim, h=1e-3)).max())
        return worst, None

    r.run("chern_form_closed", closed, 1e-3)
    return r.records


# --------------------------------------------------------------------------
# nabla Phi and d Phi


def _eta_field(sys):
    J = sys.P0P1
    return lambda q: np.concatenate([[0.0], J @ q[1:]])


def prop4_suite(cfg: RunConfig, ks=None, n_points: int = 20) -> list[CheckRecord]:
    r = _Recorder(cfg)
    if ks is None:
        ks = (cfg.k,) if cfg.k else (8, 4)
    for k in ks:
        sys = alg.clifford_system(1, k)
        Jf = st.structure_field("J_PRODUCT", sys)
        spec = Jf.spec
        dim = spec.dim
        rng = _rng(cfg, f"prop4{k}")
        eta = _eta_field(sys)

        def nabla():
            vals, alt = [], []
            for _ in range(n_points):
                p = geo.sample_point(spec, rng)
                split = geo.tangent_basis_mplus(sys, p.x[1:])
                Xv = split.V @ _unit(rng, split.V.shape[1])
                X = np.concatenate([[0.0], Xv])
                vals.append(abs(calc.nabla_phi(Jf, spec, p, X, eta, X, cfg.fd_step) - 1.0))
                # tensoriality: another extension of eta gives the same value
                eta2 = lambda q, e=eta, X=X, p=p: e(q) + 3.0 * ((q - p.x) @ X) * geo.tangent_projector(spec, q) @ X  # noqa: E731
                alt.append(abs(calc.nabla_phi(Jf, spec, p, X, eta2, X, cfg.fd_step) - 1.0))
            cache["alt"] = max(alt)
            return max(vals), None

        cache = {}
        r.run(f"nabla_phi_X_eta_X_dim{dim}", nabla, 1e-5)
        r.run(f"nabla_phi_extension_independent_dim{dim}", lambda: (cache.get("alt", np.nan), None), 1e-5)

        def dphi():
            best, wit = 0.0, None
            for _ in range(10):
                p = geo.sample_point(spec, rng)
                ch = geo.chart(spec, p)
                d = calc.exterior_derivative(calc.kaehler_components(Jf, ch), ch.dim, h=cfg.fd_step)
                v = np.abs(d).max()
                if v > best:
                    best, wit = v, p.x
            return best, wit

        r.run(f"dphi_witness_dim{dim}", dphi, 1e-3, kind="min", gating=r.witness_gating())
    return r.records


# --------------------------------------------------------------------------
# sectional curvature of M_+^5


def curvature_scan(cfg: RunConfig, points: int = 100, planes: int = 100):
    """Rows (point_index, plane_index, K) of Gauss-equation curvatures on M_+^5."""
    sys = alg.clifford_system(1, 4)
    spec = geo.ManifoldSpec.m_plus(sys)
    rng = _rng(cfg, "curv")
    rows, samples = [], []
    for i in range(points):
        p = geo.sample_point(spec, rng)
        for j in range(planes):
            Q = geo.random_unit_tangents(spec, p, rng, 2)
            K = geo.sectional_curvature_mplus(sys, p.x, Q[:, 0], Q[:, 1])
            rows.append((i, j, K))
            samples.append((p, Q))
    return rows, samples, spec, sys


def curvature_suite(cfg: RunConfig, points: int = 100, planes: int = 100, n_cross: int = 20) -> list[CheckRecord]:
    r = _Recorder(cfg)
    cache = {}

    def scan():
        rows, samples, spec, sys = curvature_scan(cfg, points, planes)
        cache.update(rows=rows, samples=samples, spec=spec, sys=sys)
        i = int(np.argmin([K for _, _, K in rows]))
        p, Q = samples[i]
        return rows[i][2], np.concatenate([p.x, Q[:, 0], Q[:, 1]])

    r.run("mplus5_negative_curvature_witness", scan, -0.01, kind="max", gating=r.witness_gating())

    def cross():
        rows, samples = cache["rows"], cache["samples"]
        order = np.argsort([K for _, _, K in rows])
        # the most negative planes plus an even spread of the rest
        pick = list(order[: n_cross // 2]) + list(order[:: max(1, len(order) // (n_cross - n_cross // 2))])
        worst = 0.0
        for i in pick[:n_cross]:
            p, Q = samples[i]
            fd = calc.sectional_curvature_fd(cache["spec"], p, Q[:, 0], Q[:, 1])
            worst = max(worst, abs(fd - rows[i][2]))
        return worst, None

    r.run("gauss_vs_fd_riemann", cross, 1e-4)
    return r.records


# --------------------------------------------------------------------------
# the structure J-tilde on S^1 x S^{l-1} x S^{l-2}


def jtilde_suite(cfg: RunConfig) -> list[CheckRecord]:
    r = _Recorder(cfg)
    for dim in (6, 14):
        spec = st.tilde_spec(dim)
        l = (dim + 2) // 2  # noqa: E741
        rng = _rng(cfg, f"jt{dim}")
        pts = [geo.sample_point(spec, rng) for _ in range(cfg.samples)]
        Ws = [geo.random_unit_tangents(spec, p, rng, 3).T for p in pts]

        r.run(f"psi_intertwining_dim{dim}",
              lambda: _worst([st.intertwine_check(dim, p.x, W).max() for p, W in zip(pts, Ws)]), 1e-8)

        def first_line():
            worst = 0.0
            for p in pts:
                _, y, z = st.split_tilde(p.x)
                eps = np.zeros(2 * l)
                eps[0] = 1.0
                out = st.j_tilde(dim, p.x, eps)
                target = np.concatenate([[0.0], alg.cd_mul(z, y), np.zeros(l - 1)])
                worst = max(worst, np.abs(out - target).max(), st.intertwine_check(dim, p.x, eps))
            return worst, None

        r.run(f"jtilde_first_line_dim{dim}", first_line, 1e-12)
        r.run(f"jtilde_squared_dim{dim}",
              lambda: (max(np.abs(st.j_tilde(dim, p.x, st.j_tilde(dim, p.x, W)) + W).max()
                           for p, W in zip(pts, Ws)), None), 1e-10)

        def tangent():
            worst = 0.0
            for p, W in zip(pts, Ws):
                _, y, z = st.split_tilde(p.x)
                out = st.j_tilde(dim, p.x, W)
                worst = max(worst, np.abs(out[:, 1 : 1 + l] @ y).max(), np.abs(out[:, 1 + l :] @ z[1:]).max())
            return worst, None

        r.run(f"jtilde_output_tangent_dim{dim}", tangent, 1e-10)

        def non_hermitian():
            best, wit = 0.0, None
            for p, W in zip(pts, Ws):
                d = np.abs(np.sum(st.j_tilde(dim, p.x, W) ** 2, 1) - np.sum(W**2, 1))
                if d.max() > best:
                    best, wit = d.max(), p.x
            return best, wit

        if dim == 14:
            r.run("jtilde_non_hermitian_witness_dim14", non_hermitian, 1e-3, kind="min", gating=r.witness_gating())
        else:
            def simplified():
                worst = 0.0
                for p, W in zip(pts, Ws):
                    _, y, z = st.split_tilde(p.x)
                    Z = np.concatenate([np.zeros((len(W), 1)), W[:, 1 + l :]], 1)
                    Y = W[:, 1 : 1 + l]
                    zy = alg.cd_mul(z, y)
                    Yp = Y - (Y @ zy)[:, None] * zy
                    Wp = np.concatenate([np.zeros((len(W), 1)), Yp, W[:, 1 + l :]], 1)
                    general = -alg.cd_mul(alg.cd_mul(z, alg.cd_mul(Z, y)), alg.cd_conj(y))
                    worst = max(worst, np.abs(st.j_tilde(6, p.x, Wp)[:, 1 + l :] - general[:, 1:]).max())
                return worst, None

            r.run("jtilde_quaternion_simplification", simplified, 1e-12)

        def pushforward_fd():
            worst = 0.0
            for p, W in zip(pts[:20], Ws[:20]):
                ch = geo.chart(spec, p)
                a = ch.coords(W[0])
                hh = cfg.fd_step
                fd = (st.big_psi(ch.eval(hh * a)) - st.big_psi(ch.eval(-hh * a))) / (2 * hh)
                worst = max(worst, np.abs(fd - st.big_psi_pushforward(p.x, W[0])).max())
            return worst, None

        r.run(f"psi_pushforward_fd_dim{dim}", pushforward_fd, 1e-6)

        def eta_ident():
            sys = alg.clifford_system(1, l)
            worst = 0.0
            for p in pts:
                _, y, z = st.split_tilde(p.x)
                pf = st.psi_pushforward(y, z, alg.cd_mul(z, y), np.zeros(l))
                worst = max(worst, np.abs(pf - sys.P0P1 @ st.big_psi(p.x)[1:]).max())
            return worst, None

        r.run(f"eta_identification_dim{dim}", eta_ident, 1e-12)
    return r.records


# --------------------------------------------------------------------------
# finite-difference infrastructure


def fd_defect_ratio(defect: Callable, h: float) -> float:
    return defect(h) / defect(h / 2)


def infrastructure_suite(cfg: RunConfig) -> list[CheckRecord]:
    r = _Recorder(cfg)
    rng = _rng(cfg, "infra")
    sys = alg.clifford_system(1, 4)
    spec = st.product_spec(sys)
    p = geo.sample_point(spec, rng)
    # projected constant field on S^5: (D_X W)^T = -<c, x> X
    sphere = geo.ManifoldSpec.sphere(5)
    q = geo.sample_point(sphere, rng)
    c = rng.standard_normal(6)
    Xs = geo.random_unit_tangents(sphere, q, rng, 1)[:, 0]
    field = calc.projected_constant(sphere, c)

    def cov_defect(h):
        return np.abs(calc.covariant_derivative(sphere, q, Xs, field, h) + (c @ q.x) * Xs).max()

    def gb_defect(h):
        # connection form of the round-sphere frame against w_12 = -cos(phi) d lam
        phi, lam = 0.9, 0.4
        one = fr._pulled_back_connection(
            lambda a, b: np.stack([
                np.stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), -np.sin(a)], -1),
                np.stack([-np.sin(b), np.cos(b), 0 * b], -1)], -2), [(0, 1)], h)
        return abs(one(phi, lam)[1] + np.cos(phi))

    def ext_defect(h):
        # d of the 1-form (sin u1, u0 u2^2, exp(u0 + u2)) against its closed form
        def w(u):
            return np.array([np.sin(u[1]), u[0] * u[2] ** 2, np.exp(u[0] + u[2])])

        u0 = np.array([0.3, -0.2, 0.5])
        exact_d = np.array([
            [0.0, u0[2] ** 2 - np.cos(u0[1]), np.exp(u0[0] + u0[2])],
            [0.0, 0.0, -2 * u0[0] * u0[2]],
            [0.0, 0.0, 0.0],
        ])
        exact_d = exact_d - exact_d.T
        return np.abs(calc.exterior_derivative(w, 3, h=h, u0=u0) - exact_d).max()

    for name, f, h in [("fd_order_covariant_derivative", cov_defect, 2e-2),
                       ("fd_order_connection_form", gb_defect, 2e-2),
                       ("fd_order_exterior_derivative", ext_defect, 2e-2)]:
        r.run(name, lambda f=f, h=h: (abs(fd_defect_ratio(f, h) - 4.0), None), 1.0)

    def dd():
        ch = geo.chart(spec, p)

        def f(u):
            x = ch.eval(u)
            return np.sin(x[0]) * x[1] + x[2] * x[3] ** 2

        df = lambda u: calc.coordinate_derivatives(f, ch.dim, 1e-4, u)  # noqa: E731
        return np.abs(calc.exterior_derivative(df, ch.dim, h=1e-3)).max(), None

    r.run("d_squared_zero", dd, 1e-6)

    def chart_metric():
        ch = geo.chart(spec, p)
        return np.abs(calc.metric_components(ch, np.zeros(ch.dim)) - np.eye(ch.dim)).max(), None

    r.run("chart_metric_identity", chart_metric, 1e-10)
    return r.records


CASES = {
    "algebra": (algebra_suite, "exact Clifford and Cayley-Dickson identities"),
    "prop1": (prop1_suite, "almost Hermitian structure on M_0"),
    "theorem-m1": (integrability_suite, "integrability on S^1 x M_+ (Nijenhuis, Phi-intertwining)"),
    "prop3-frames": (prop3_suite, "h, S, A, Y frame, connection forms, first Chern form"),
    "prop4": (prop4_suite, "nabla Phi(X, eta, X) = 1 and a d Phi witness"),
    "remark-curvature": (curvature_suite, "negative sectional curvature on M_+^5"),
    "jtilde": (jtilde_suite, "J-tilde on S^1 x S^3 x S^2 and S^1 x S^7 x S^6"),
    "infrastructure": (infrastructure_suite, "finite-difference convergence and chart sanity"),
}
