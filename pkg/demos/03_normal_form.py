"""Normal form around a Poisson transversal.

For so(3) the affine line ``e3* + span(e3*)`` meets every nonzero coadjoint
sphere transversally. The spray exponential, restricted to the conormal
bundle of the line, carries the local model built from the form ``omega_V``
onto the Lie-Poisson structure. Scaling ``omega_V`` breaks this, which the
negative control shows.
"""

from plab import algebra as alg, data_path, spray
from plab.transversal import load_transversal, split_at

so3 = alg.so3()
T = load_transversal(so3, data_path("transversals", "so3_e3.json"))
s = split_at(T, T.base)
print("tangential block", s.tangential.ravel(), " normal block\n", s.normal)

print(spray.verify_normal_form(T, samples=50).line())
bad = spray.verify_normal_form(T, samples=20, sigma=spray.omega_V_on_conormal(T, scale=1.1))
print("omega_V scaled by 1.1:", bad.line())

sl2 = alg.sl2()
print(spray.verify_normal_form(load_transversal(sl2, data_path("transversals", "sl2_h.json")), samples=50).line())
