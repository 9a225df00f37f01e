"""M_+^5 carries planes of negative sectional curvature.

Run:  python3 demos/04_curvature_scan.py
"""
import numpy as np

from otfkm import algebra as alg
from otfkm import calculus as calc
from otfkm import geometry as geo

sys = alg.clifford_system(1, 4)
spec = geo.ManifoldSpec.m_plus(sys)
rng = np.random.default_rng(0)

best = (np.inf, None)
for _ in range(50):
    p = geo.sample_point(spec, rng)
    for _ in range(40):
        X, Y = geo.random_unit_tangents(spec, p, rng, 2).T
        K = geo.sectional_curvature_mplus(sys, p.x, X, Y)
        if K < best[0]:
            best = (K, (p, X, Y))

K, (p, X, Y) = best
print(f"most negative K over 2000 planes: {K:.6f}")
print(f"same plane from the intrinsic FD Riemann tensor: {calc.sectional_curvature_fd(spec, p, X, Y):.6f}")
