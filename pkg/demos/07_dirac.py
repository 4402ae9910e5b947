"""Linear Dirac structures under gauge transformations and images.

The local model of the normal form is assembled from these operations. Here
they act on a plane bivector to show that pullback along a projection leaves
the world of graphs while a gauge transformation stays inside it.
"""

import numpy as np

from plab import dirac
from plab.errors import NotGraph

P = np.array([[0.0, 1.0], [-1.0, 0.0]])
D = dirac.graph_of_bivector(P)

sigma = np.array([[0.0, 0.5], [-0.5, 0.0]])
print("gauged bivector:\n", dirac.as_bivector(dirac.gauge(D, sigma)))

p = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
up = dirac.backward_image(p, D)
try:
    dirac.as_bivector(up)
except NotGraph as exc:
    print("pullback along R^3 -> R^2 is not a graph, intersection dim", exc.intersection_dim)

print("pushing back down recovers P:", dirac.forward_image(p, up).same_as(D))
