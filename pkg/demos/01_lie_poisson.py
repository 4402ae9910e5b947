"""Structure constants, the Lie-Poisson bivector and its Jacobi identity.

A bracket table is a Lie algebra exactly when the linear bivector it defines
on the dual is Poisson. We check both sides for the shipped algebras and then
for a table that violates Jacobi.
"""

from plab import algebra as alg, data_path, fields

for name in ["so3", "sl2", "aff1", "heisenberg3"]:
    L = alg.load_algebra(data_path("algebras", f"{name}.json"))
    mx, _ = alg.jacobiator(L)
    f = fields.lie_poisson_field(L)
    print(f"{name:12s} jacobiator {mx:g}   [pi, pi] = 0: {fields.schouten_poly(f, f).is_zero()}")

# [e1,e2] = e3 and [e2,e3] = e2 is antisymmetric but not a Lie bracket
broken = alg.load_algebra(data_path("algebras", "broken.json"))
mx, J = alg.jacobiator(broken)
f = fields.lie_poisson_field(broken)
print(f"\nbroken       jacobiator {mx:g}   [pi, pi] = 0: {fields.schouten_poly(f, f).is_zero()}")

# the bivector at a point, pi(xi)_{ij} = xi([e_i, e_j])
print("\npi_so3 at (0, 0, 1):\n", alg.so3().poisson_matrix([0.0, 0.0, 1.0]))
