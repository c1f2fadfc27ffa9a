"""Walk through the BPST instanton: duality, vacuum equations, <E, B> and its action.

    python3 demos/bpst_tour.py [mu]
"""
import sys

import numpy as np

from ymforms import EUCLIDEAN, QuadratureSpec, build_bpst, classify_duality, curvature, global_inner, ym_residuals
from ymforms.variational import eb_inner, extract_eb
from ymforms.yang_mills import sample_points_shell

mu = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
b = build_bpst(mu)
z1, z2 = sample_points_shell(200, seed=0)

F = curvature(b.connection)
print(f"BPST at scale mu = {mu}")
print("  duality class on 200 shell points:", classify_duality(F(z1, z2), EUCLIDEAN).value)

bianchi, costar = ym_residuals(b.connection, None, EUCLIDEAN, z1, z2, F)
print(f"  max ||D_A F||   = {bianchi.max():.2e}")
print(f"  max ||D_A^* F|| = {costar.max():.2e}")

# F is a multiple of d eta, with a profile p(r) and a sign we measure rather than assume
print(f"  F = s p d eta with s = {b.sign:+d}")

eb = eb_inner(extract_eb(F, z1, z2))
p = b.p_of(z1, z2)
print(f"  <E, B> / p^2: min {np.min(eb.real / p**2):.10f}, max {np.max(eb.real / p**2):.10f}")

# the total field energy does not depend on mu
q = QuadratureSpec(radius=60.0, nodes_per_axis=200, rule="radial", directions=4)
action = global_inner(F.form, F.form, EUCLIDEAN, q).real
print(f"  (F, F) = {action:.6f}   8 pi^2 = {8 * np.pi**2:.6f}")
