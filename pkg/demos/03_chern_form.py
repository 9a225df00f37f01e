"""A unitary frame on S^1 x M_+^5 and the vanishing first Chern form.

Run:  python3 demos/03_chern_form.py   (about 20 s)
"""
import numpy as np

from otfkm import frames as fr
from otfkm import geometry as geo
from otfkm.structures import big_psi

rng = np.random.default_rng(0)
theta, y, z = 1.2, rng.standard_normal(4), rng.standard_normal(3)
y /= np.linalg.norm(y)
z /= np.linalg.norm(z)

Y = fr.y_frame(theta, y, z)
print("Gram matrix of the Y frame - I:", np.abs(Y @ Y.T - np.eye(6)).max())
S = fr.s_matrix(z)
A, Ai = fr.gauge_matrix(z), fr.gauge_matrix(z, inverse=True)
print("S^2 + I:", np.abs(S @ S + np.eye(6)).max(), "  A^-1 S A - J0:", np.abs(Ai @ S @ A - fr.J0).max())

p = geo.SurfacePoint(big_psi(np.concatenate([[theta], y, z])), fr.mplus5_spec())
ch = geo.chart(p.spec, p)
print("c1 components at a point:", np.abs(fr.chern_components(fr.y_frame_field, ch)).max())

res = fr.slice_chern_integral(theta, y)
print(f"integral of c1 over a 2-sphere slice: {res.value:.3e} (Richardson error {res.error:.1e})")
gb = fr.gauss_bonnet_sphere()
print(f"contrast, (1/2 pi) * integral of K dA over the round S^2: {gb.value:.9f}")
