"""Maurer-Cartan elements, gauge flows, and the nerve of a dgla.

A gl2-coefficient dgla carries honest matrix computations: flowing a
Maurer-Cartan element along a constant gauge direction conjugates its
matrix components, and the nerve of solutions found from a seed grid is
invariant under passing to the minimal model.
"""

import numpy as np

from homotopylie.generators import lambda_dgla, mat_vec, read_mat, expm2
from homotopylie.mc import gauge_flow, solve_mc, build_nerve, to_float_morphism
from homotopylie.transfer import minimal_model

alg = lambda_dgla()
X = [[0, 1], [0, 0]]
gamma0 = mat_vec(alg, (1,), X)
H = [[1, 0], [0, -1]]
eta = mat_vec(alg, (), H)

path = gauge_flow(alg, gamma0, eta, step=1e-3)
print("max MC residual along the flow: %.2e" % path.max_mc_residual())

E = expm2(np.array(H, dtype=complex), -1.0)
Einv = expm2(np.array(H, dtype=complex), 1.0)
want = E @ np.array(X, dtype=complex) @ Einv
got = read_mat(alg, (1,), path.end)
print("distance to the conjugation closed form: %.2e" % np.max(np.abs(got - want)))

big = lambda_dgla(coupled=True)
res = minimal_model(big, arity_out=3)
V = res.small.space
rng = np.random.default_rng(0)
seeds = [
    {V.index(1, i): complex(c) for i, c in enumerate(rng.normal(size=V.dim(1)) * 0.3)}
    for _ in range(6)
]
incl = to_float_morphism(res.inclusion)
g_small = build_nerve(res.small, seeds, flow_step=0.05)
g_big = build_nerve(big, [incl.apply_point(s) for s in seeds], flow_step=0.05)
print(
    "nerve components: minimal model %d, ambient dgla %d"
    % (len(g_small.components()), len(g_big.components()))
)
