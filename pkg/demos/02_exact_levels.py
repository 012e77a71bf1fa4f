"""Hand-solvable instances: the solver against closed-form levels.

On the two-vertex graph the sign-changing set contains exactly the pair
+-(e, -e), so the least nodal level is e^2 and the ground level is 1.
On the six-vertex path with a two-vertex well, the Dirichlet nodal level
is e^3 with minimizer +-(e^1.5, -e^1.5) on the well.
"""

import math

from logschro import (
    ProblemInstance,
    SolveOptions,
    WeightedGraph,
    generate_graph,
    solve_ground,
    solve_nodal,
    verify,
)

E = math.e
opts = SolveOptions(starts=16, seed=0)

k2 = WeightedGraph(["v1", "v2"], [1.0, 1.0], [0.0, 0.0], [("v1", "v2", 1.0)])
inst = ProblemInstance.full(k2, 1.0)

nodal = solve_nodal(inst, opts)
ground = solve_ground(inst, opts)
print("two-vertex graph")
print(f"  m        = {nodal.level!r}   (exact e^2 = {E * E!r})")
print(f"  minimizer= {nodal.minimizer}  (exact +-(e, -e))")
print(f"  c        = {ground.level!r}  (exact 1)")

report = verify(inst, nodal.minimizer, companion_ground=ground.level)
print(f"  residual sup = {report.residual_inf:.2e}, m - 2c = {report.m_margin!r}")

p6 = WeightedGraph.from_dict(generate_graph("path", 6, "3..4"))
dirichlet = ProblemInstance.dirichlet(p6)
nodal = solve_nodal(dirichlet, opts)
print("six-vertex path, Dirichlet problem on the well {v3, v4}")
print(f"  m_Omega  = {nodal.level!r}   (exact e^3 = {E**3!r})")
print(f"  minimizer= {nodal.minimizer}")
print(f"  sign pattern: {nodal.sign_pattern}")
