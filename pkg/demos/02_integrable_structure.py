"""The structure J on S^1 x M_+ is integrable but not nearly Kaehler.

Run:  python3 demos/02_integrable_structure.py
"""
import numpy as np

from otfkm import algebra as alg
from otfkm import calculus as calc
from otfkm import geometry as geo
from otfkm import structures as st

for k in (4, 8):
    sys = alg.clifford_system(1, k)
    J = st.structure_field("J_PRODUCT", sys)
    spec = J.spec
    p = geo.sample_point(spec, 0)
    print(f"S^1 x M_+^{spec.dim - 1}")
    print("  max |N| (Nijenhuis):", calc.nijenhuis_norm(J, spec, p))

    eta = lambda q: np.concatenate([[0.0], sys.P0P1 @ q[1:]])  # noqa: E731
    V = geo.tangent_basis_mplus(sys, p.x[1:]).V
    X = np.concatenate([[0.0], V[:, 0]])
    print("  (nabla_X Phi)(X, eta):", calc.nabla_phi(J, spec, p, X, eta, X))

    ch = geo.chart(spec, p)
    dphi = calc.exterior_derivative(calc.kaehler_components(J, ch), ch.dim)
    print("  max |d Phi|:", np.abs(dphi).max())

# the structure on M_0 is only almost complex; its Nijenhuis tensor is large
J0 = st.structure_field("J_M0", alg.clifford_system(1, 4))
print("M_0 (m=1, k=4) max |N|:", calc.nijenhuis_norm(J0, J0.spec, geo.sample_point(J0.spec, 0)))
