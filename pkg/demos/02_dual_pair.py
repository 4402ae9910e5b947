"""The spray on T*g* and the symplectic dual pair it produces.

The exponential of the canonical spray is ``(x, xi) -> xi o exp(ad_x)``.
Together with the projection it forms a full dual pair for the two-form
``Omega_g`` wherever ``Xi_x`` is invertible. For so(3) that fails first on
the sphere of radius 2 pi.
"""

import math

from plab import algebra as alg, linalg, spray
from plab.spray import SprayPoint

so3 = alg.so3()
p = SprayPoint([0.0, 0.0, math.pi / 2], [1.0, 0.0, 0.0])
print("rotate e1* a quarter turn about e3:", spray.spray_exp(so3, p).round(12))

for name in ["so3", "sl2"]:
    L = alg.CATALOG[name]()
    for rep in (spray.verify_dual_pair(L, samples=30), spray.verify_omega_g_closed(L, samples=10)):
        print(rep.line())

for r in (1.0, 2 * math.pi - 0.1, 2 * math.pi):
    M = spray.omega_g_matrix(so3, [0.0, 0.0, r], [0.2, 0.1, 1.0])
    print(f"|x0| = {r:.4f}: min singular value of Omega_g {linalg.min_singular_value(M):.2e}")
