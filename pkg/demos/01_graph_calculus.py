"""Discrete calculus on a weighted graph.

Builds a small path graph by hand and walks through the Laplacian, the
gradient form, integrals against the vertex measure, norms, boundaries
and the validation of the potential-well hypothesis.
"""

import numpy as np

from logschro import WeightedGraph

g = WeightedGraph(
    vertex_ids=["v1", "v2", "v3", "v4", "v5", "v6"],
    mu=[1.0] * 6,
    potential_a=[1.0, 1.0, 0.0, 0.0, 1.0, 1.0],
    edges=[(f"v{i}", f"v{i + 1}", 1.0) for i in range(1, 6)],
)

u = g.field({"v3": 1.0, "v4": -1.0})
print("field u:            ", u)
print("laplacian:          ", g.laplacian(u))
print("gradient form G(u): ", g.gamma(u))
print("dirichlet energy:   ", g.integrate(g.gamma(u)))

phi = g.field({"v2": 1.0})
lhs = g.integrate(g.gamma(u, phi))
rhs = -g.integrate(g.laplacian(u) * phi)
print(f"integration by parts: {lhs:.12f} == {rhs:.12f}")

nb = g.norms(u, lam=10.0)
print("norms: H1^2 =", nb.h1_sq, " H_lam^2 =", nb.h_lambda_sq, " sup =", nb.linf)
print("sup-norm embedding bound:", np.sqrt(nb.h_lambda_sq / g.mu_min))

well = g.validate_potential()
print("well interior:", well.omega.interior, " boundary:", well.omega.boundary)
print("hypothesis check passes:", well.passes)
print("hop distance v1 -> v6:", g.distance("v1", "v6"))
