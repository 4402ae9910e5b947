"""Normal form for the Poisson map dual to a Lie algebra inclusion.

The Borel subalgebra b of sl(2) includes by ``f``, so ``f^T: sl(2)* -> b*``
is Poisson. A point of b* where b has an open orbit is a transversal, and its
preimage is a transversal line in sl(2)*. The normal forms of the two
transversals fit into a commuting square.
"""

import json

import numpy as np

from plab import algebra as alg, data_path, spray
from plab.transversal import load_transversal

b, g = alg.borel_sl2(), alg.sl2()
f = np.array(json.loads(data_path("morphisms", "borel_in_sl2.json").read_text())["matrix"])
X = load_transversal(b, data_path("transversals", "borel_point.json"))

pre = spray.preimage_transversal(b, g, f, X)
print("preimage line: base", pre.Y.base, "direction", pre.Y.L.ravel())

rep = spray.poisson_map_normal_form(b, g, f, X, samples=30)
print(rep.line())
print("sub-checks:", rep.extra["subchecks"])
