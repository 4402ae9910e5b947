"""The symplectic groupoid SO(3) x so(3)* and its local model.

Arrows are pairs ``(g, xi)`` with source ``xi`` and target the coadjoint
image. The form ``Omega_G`` is multiplicative. Restricting to arrows between
points of a transversal gives a smaller symplectic groupoid, and pulling it
back along the conormal projection rebuilds a groupoid whose base carries the
local model of the normal form.
"""

from plab import algebra as alg, data_path, groupoid as gp
from plab.transversal import load_transversal

so3 = alg.so3()
rep = gp.standard_rep(so3)
T = load_transversal(so3, data_path("transversals", "so3_e3.json"))

print(gp.check_groupoid_axioms(rep, words=200).line())
print(gp.check_multiplicative(rep, samples=20).line())

GX = gp.restrict_to_transversal(rep, T)
print(gp.check_restriction(GX, samples=5).line())

for c in gp.build_pullback_model(T, rep=rep).certify(samples=10):
    print(c.line())
