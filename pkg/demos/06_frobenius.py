"""Splitting along the fibres of a Frobenius subalgebra.

When ``lambda o [.,.]`` is nondegenerate on h, the fibres of ``g* -> h*`` are
transversals and g* splits near them as an open orbit of h times a fibre.
The Lie-Poisson bivector decomposes into commuting horizontal and vertical
Poisson parts, and the transverse structure is at most quadratic.
"""

from plab import frobenius as fr

for P in (fr.borel_in_sl2(), fr.diagonal_in_aff1_x_aff1()):
    print(f"--- {P.g.name}, dim h = {P.m}")
    print("omega_lambda at 0:\n", fr.omega_lambda_matrix(P, [0.0, 0.0]))
    print("nondegenerate up to radius", fr.nondegeneracy_radius(P))
    print(fr.weinstein_splitting_check(P, samples=30).line())
    print(fr.check_vorobjev(P, samples=20).line())
    q = fr.transverse_quadraticity(P)
    print(q.line(), "fitted degree", q.extra["degree"])
