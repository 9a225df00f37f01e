"""Clifford systems, the FKM polynomial and its level sets.

Run:  python3 demos/01_clifford_systems.py
"""
import numpy as np

from otfkm import algebra as alg
from otfkm import geometry as geo

for m, k in [(1, 4), (2, 2), (3, 1)]:
    sys = alg.clifford_system(m, k)
    print(f"m={m} k={k}: l={sys.l}, P_i are {sys.dim}x{sys.dim}, anticommutator defect {sys.anticommutator_defect()}")
    for name, spec in [
        ("M_0", geo.ManifoldSpec.level_set(sys, 0.0)),
        ("M_+", geo.ManifoldSpec.m_plus(sys)),
        ("M_-", geo.ManifoldSpec.m_minus(sys)),
    ]:
        p = geo.sample_point(spec, 0)
        print(f"  {name}: dim {spec.dim}, F = {geo.fkm_eval(sys, p.x):+.12f}, residual {p.residual():.1e}")

# the focal set M_+ for m = 1 is a Stiefel manifold, parametrised by (y, z)
rng = np.random.default_rng(1)
y = rng.standard_normal(8)
y /= np.linalg.norm(y)
z = np.concatenate([[0.0], rng.standard_normal(7)])
z /= np.linalg.norm(z)
x = geo.psi_map(y, z).x
sys = alg.clifford_system(1, 8)
print("psi(y, z) on M_+^13:", np.round(np.einsum("iab,a,b->i", sys.P, x, x), 15), "F =", geo.fkm_eval(sys, x))
