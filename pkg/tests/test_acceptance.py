"""Acceptance criteria 1-9, each at its stated tolerance.

Every test prints one PASS/FAIL line (also collected into the terminal
summary) before asserting.
"""
import itertools
import json

import pytest

from otfkm import algebra as alg
from otfkm import cli
from otfkm.report import RunConfig, load_config
from otfkm.suites import (
    CASES,
    curvature_suite,
    infrastructure_suite,
    jtilde_suite,
    prop1_suite,
    prop3_suite,
    prop4_suite,
    integrability_suite,
)

from .conftest import ACCEPTANCE_LINES


def verdict(label, records, names):
    picked = [r for r in records if any(r.name == n or r.name.startswith(n + "_dim") for n in names)]
    missing = [n for n in names if not any(r.name == n or r.name.startswith(n + "_dim") for r in picked)]
    ok = not missing and all(r.passed for r in picked)
    detail = "; ".join(f"{r.name}={r.value:.3g}" for r in picked)
    if missing:
        detail += f"; missing {missing}"
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, [r.line() for r in picked if not r.passed]


def test_criterion_1_clifford_exactness():
    defects = {(m, k): alg.clifford_system(m, k).anticommutator_defect()
               for m, k in itertools.product(range(1, 8), (1, 2))}
    ok = all(d == 0 for d in defects.values())
    line = f"{'PASS' if ok else 'FAIL'} 1 Clifford exactness: max integer defect {max(defects.values())} over {len(defects)} systems"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, defects


@pytest.mark.parametrize("m,k", [(1, 4), (1, 8), (2, 2), (3, 1)])
def test_criterion_2_prop1(m, k):
    recs = prop1_suite(RunConfig(case="prop1", m=m, k=k, samples=100), nijenhuis_points=1)
    ok, bad = verdict(f"2 almost Hermitian M_0 (m={m}, k={k}, 100 points)", recs, ["m0_j_squared", "m0_hermitian"])
    assert ok, bad


def test_criterion_3_integrable():
    recs = integrability_suite(RunConfig(case="theorem-m1", samples=50, fd_step=1e-5), ks=(4, 8))
    assert sum(r.name.startswith("product_nijenhuis") for r in recs) == 2
    ok, bad = verdict("3 integrability on S^1 x M_+^5 and S^1 x M_+^13 (50 points)", recs,
                      ["product_nijenhuis", "phi_intertwining"])
    assert ok, bad


@pytest.fixture(scope="module")
def prop3_records():
    return prop3_suite(RunConfig(case="prop3-frames", samples=100), n_slices=3, grid=(128, 256), n_gauge=20)


def test_criterion_4_prop3_algebra(prop3_records):
    names = ["h_skew", "h_kills_z", "h_squared", "s_squared", "gauge_conjugation",
             "y_frame_orthonormal", "x_star_gram"]
    ok, bad = verdict("4 h, S, A identities (1000 z), Y and X* Gram matrices (100 points)", prop3_records, names)
    tol = {r.name: r.tolerance for r in prop3_records}
    assert all(tol[n] == 1e-14 for n in names[:5])
    assert tol["y_frame_orthonormal"] == tol["x_star_gram"] == 1e-12
    assert ok, bad


def test_criterion_5_chern_vanishing(prop3_records):
    ok, bad = verdict("5 Chern vanishing, Gauss-Bonnet contrast, frame independence", prop3_records,
                      ["chern_slice_integral", "chern_slice_richardson_error", "gauss_bonnet_contrast",
                       "chern_frame_independence"])
    assert ok, bad


def test_criterion_6_prop4():
    recs = prop4_suite(RunConfig(case="prop4", samples=100), ks=(8, 4), n_points=20)
    ok, bad = verdict("6 nabla Phi(X, eta, X) = 1 and d Phi witness", recs,
                      ["nabla_phi_X_eta_X", "dphi_witness"])
    assert all(r.gating for r in recs)
    assert ok, bad


def test_criterion_7_jtilde():
    recs = jtilde_suite(RunConfig(case="jtilde", samples=100))
    ok, bad = verdict("7 Psi-intertwining (dims 6, 14) and dim-14 non-Hermitian witness", recs,
                      ["psi_intertwining", "jtilde_non_hermitian_witness"])
    assert ok, bad


def test_criterion_8_curvature():
    recs = curvature_suite(RunConfig(case="remark-curvature"), points=100, planes=100, n_cross=20)
    ok, bad = verdict("8 negative curvature on M_+^5 (10^4 planes), FD Riemann cross-check", recs,
                      ["mplus5_negative_curvature_witness", "gauss_vs_fd_riemann"])
    assert ok, bad


def test_criterion_9_infrastructure(tmp_path):
    recs = infrastructure_suite(RunConfig(case="infrastructure"))
    ok, bad = verdict("9a FD second-order convergence (ratio in [3, 5])", recs,
                      ["fd_order_covariant_derivative", "fd_order_connection_form", "fd_order_exterior_derivative"])
    assert ok, bad
    outputs = []
    for case in ["prop4", "jtilde"]:
        for i in range(2):
            path = tmp_path / f"{case}{i}.json"
            cli.main(["verify", "--case", case, "--out", str(path)])
            outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1] and outputs[2] == outputs[3]
    rep = cli.run_case(load_config(known_cases=CASES, case="remark-curvature"))
    same = same and rep.to_json() == cli.run_case(load_config(known_cases=CASES, case="remark-curvature")).to_json()
    line = f"{'PASS' if same else 'FAIL'} 9b byte-identical reports across repeated runs"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert same
    assert json.loads(outputs[0])["case"] == "prop4"
