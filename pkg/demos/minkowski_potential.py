"""The holomorphic 2x2 potential that satisfies the Minkowski SD condition.

The condition holds identically, yet the curvature is neither SD nor ASD and
the vacuum equations fail.  The script prints all three facts.

    python3 demos/minkowski_potential.py
"""
import numpy as np

from ymforms import MINKOWSKI, classify_duality, curvature, ym_residuals
from ymforms.coefficients import monomial
from ymforms.instantons import build_eta_potential, eta_duality_residual, gauge_normalize
from ymforms.yang_mills import sample_points

z1, z2 = sample_points(100, seed=0)
for label, h in (("h = 0", None), ("h = z1 z2", monomial((1, 1, 0, 0), [[1]]))):
    eta, A = build_eta_potential(h)
    cond = eta_duality_residual(eta, MINKOWSKI, "SD", z1, z2, tol=1e-12)
    F = curvature(A)
    _, costar = ym_residuals(A, None, MINKOWSKI, z1, z2, F)
    print(label)
    print(f"  SD condition residual     {cond.residual:.2e}")
    print(f"  curvature class           {classify_duality(F(z1, z2), MINKOWSKI).value}")
    print(f"  max ||F||                 {np.max(F(z1, z2).norm()):.3g}")
    print(f"  max ||D_A^* F|| (vacuum)  {costar.max():.3g}")

# a unitary gauge removes h entirely
res = gauge_normalize(build_eta_potential(monomial((1, 1, 0, 0), [[1]]))[0], z1=z1, z2=z2)
ref = curvature(build_eta_potential()[1])(z1, z2).data
print(f"gauge-normalised curvature vs h = 0: {np.max(np.abs(curvature(res.connection)(z1, z2).data - ref)):.2e}")
