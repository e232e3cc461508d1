"""Maurer-Cartan geometry: numerical MC solving, gauge flows along the
interval path object, pushforward of flows through morphisms, the
1-truncated Maurer-Cartan nerve, and the homotopy gauge action of a
dgla model with a retract.

Flows always run in float mode; exact algebras are converted first.
"""

from __future__ import annotations

from fractions import Fraction

from . import words as W
from .scalars import FloatComplexField
from .graded import GradedSpace, vec_clean
from .multilinear import MultiLinearOp
from .linfty import LInftyAlgebra, LInftyMorphism, _partial_insert

DEFAULT_STEP = 1e-3
DEDUP_RADIUS = 1e-6


# ------------------------------------------------------- float conversion

def to_float_algebra(alg, tol=1e-10):
    """The same structure constants over approximate complex scalars."""
    if not alg.field.exact:
        return alg
    field = FloatComplexField(tol)
    space = GradedSpace(alg.space.dims, alg.space.labels, field=field)
    sp = space.shifted(1)
    sops = {}
    for k, op in alg.sops.items():
        new = MultiLinearOp(sp, sp, k, 1, "sym")
        for (win, o), c in op.entries.items():
            new.entries[(win, o)] = field.coerce(c)
        sops[k] = new
    return LInftyAlgebra(space, sops)


def to_float_morphism(F, src=None, tgt=None, tol=1e-10):
    src = src if src is not None else to_float_algebra(F.source, tol)
    tgt = tgt if tgt is not None else to_float_algebra(F.target, tol)
    field = src.field
    comps = {}
    for k, f in F.components.items():
        new = MultiLinearOp(src.shifted_space, tgt.shifted_space, k, 0, "sym")
        for (win, o), c in f.entries.items():
            new.entries[(win, o)] = field.coerce(c)
        comps[k] = new
    return LInftyMorphism(src, tgt, comps)


def float_vector(field, x):
    return {i: field.coerce(c) for i, c in x.items()}


def vec_max_norm(x):
    return max((abs(c) for c in x.values()), default=0.0)


def vec_dist(x, y):
    keys = set(x) | set(y)
    return max((abs(x.get(i, 0j) - y.get(i, 0j)) for i in keys), default=0.0)


# ---------------------------------------------------- dense fast path

class _DenseTower:
    """Structure constants of a (small) tower expanded to dense numpy
    tensors, with Koszul signs baked in; used by the numerical solvers
    and integrators."""

    def __init__(self, alg):
        import numpy as np
        from itertools import product

        n = alg.space.total_dim
        self.n = n
        self.deg1 = list(alg.space.indices_of_degree(1))
        self.deg2 = list(alg.space.indices_of_degree(2))
        self.tensors = {}
        for k, op in alg.sops.items():
            T = np.zeros((n,) * k + (n,), dtype=complex)
            for tup in product(range(n), repeat=k):
                for o, c in op.eval_basis(tup).items():
                    T[tup + (o,)] = complex(c)
            self.tensors[k] = T

    def _fold(self, k, vectors):
        """Contract the first len(vectors) input slots of tensor k."""
        import numpy as np

        M = self.tensors[k]
        for v in vectors:
            M = np.tensordot(v, M, axes=(0, 0))
        return M

    def mc(self, g):
        import numpy as np

        out = np.zeros(self.n, dtype=complex)
        for k in self.tensors:
            out = out + self._fold(k, [g] * k) / float(W._factorial(k))
        return out

    def mc_residual(self, g):
        import numpy as np

        return float(np.max(np.abs(self.mc(g)))) if self.n else 0.0

    def derivative(self, g):
        """Jacobian of the Maurer-Cartan function at g, shape (out, in)."""
        import numpy as np

        J = np.zeros((self.n, self.n), dtype=complex)
        for k in self.tensors:
            M = self._fold(k, [g] * (k - 1))
            J = J + M.T / float(W._factorial(k - 1))
        return J

    def anchor_rate(self, g, e):
        """sum_k 1/(k-1)! l_k(e, g, ..., g) as a dense vector."""
        import numpy as np

        out = np.zeros(self.n, dtype=complex)
        for k in self.tensors:
            out = out + self._fold(k, [e] + [g] * (k - 1)) / float(W._factorial(k - 1))
        return out


def _dense_tower(alg):
    tower = getattr(alg, "_dense_tower_cache", None)
    if tower is None:
        tower = _DenseTower(alg)
        alg._dense_tower_cache = tower
    return tower


def _to_dense(n, x):
    import numpy as np

    v = np.zeros(n, dtype=complex)
    for i, c in x.items():
        v[i] = complex(c)
    return v


def _to_dict(v, tol=0.0):
    return {i: c for i, c in enumerate(v) if abs(c) > tol}


# ------------------------------------------------------------- MC solving

class MCElement:
    def __init__(self, algebra, vector, residual, converged, iterations):
        self.algebra = algebra
        self.vector = vector
        self.residual = residual
        self.converged = converged
        self.iterations = iterations

    def __repr__(self):
        return "MCElement(residual=%.2e, converged=%r)" % (self.residual, self.converged)


def _mc_derivative(alg, x, v):
    """d/dt F(x + t v): sum_k 1/(k-1)! l_k(v, x, ..., x)."""
    field = alg.field
    out = {}
    for k, op in alg.sops.items():
        c = field.coerce(Fraction(1, W._factorial(k - 1)))
        for o, val in op.evaluate([v] + [x] * (k - 1)).items():
            out[o] = out.get(o, field.zero) + c * val
    return out


def solve_mc(alg, seed, tol=1e-10, max_iter=50, radius=None):
    """Gauss-Newton iteration on the Maurer-Cartan function, float mode."""
    import numpy as np

    algf = to_float_algebra(alg)
    field = algf.field
    tower = _dense_tower(algf)
    deg1, deg2 = tower.deg1, tower.deg2
    x = np.zeros(tower.n, dtype=complex)
    for i, c in seed.items():
        x[i] = complex(field.coerce(c))
    res = None
    it = 0
    for it in range(max_iter + 1):
        Fv = tower.mc(x)
        res = float(np.max(np.abs(Fv[deg2]))) if deg2 else 0.0
        if res <= tol:
            return MCElement(algf, _to_dict(x), res, True, it)
        if it == max_iter:
            break
        J = tower.derivative(x)[np.ix_(deg2, deg1)]
        step, *_ = np.linalg.lstsq(J, -Fv[deg2], rcond=None)
        x = x.copy()
        x[deg1] = x[deg1] + step
        bound = radius if radius is not None else 1e8
        if np.max(np.abs(x)) > bound:
            return MCElement(algf, _to_dict(x), res, False, it)
    return MCElement(algf, _to_dict(x), res, False, it)


# ------------------------------------------------------------ gauge flows

class GaugePath:
    """A sampled solution of gamma' = -anchor(gamma)(eta) together with
    the gauge parameter samples; connects gamma(0) to gamma(1)."""

    def __init__(self, algebra, times, samples, eta_samples, ok=True):
        self.algebra = algebra
        self.times = times
        self.samples = samples
        self.eta_samples = eta_samples
        self.ok = ok

    @property
    def start(self):
        return self.samples[0]

    @property
    def end(self):
        return self.samples[-1]

    def max_mc_residual(self):
        tower = _dense_tower(self.algebra)
        return max(tower.mc_residual(_to_dense(tower.n, s)) for s in self.samples)

    def max_ode_defect(self):
        """Central-difference consistency of the samples with the flow ODE."""
        worst = 0.0
        for j in range(1, len(self.times) - 1):
            dt = self.times[j + 1] - self.times[j - 1]
            rate = {}
            keys = set(self.samples[j + 1]) | set(self.samples[j - 1])
            for i in keys:
                rate[i] = (self.samples[j + 1].get(i, 0j) - self.samples[j - 1].get(i, 0j)) / dt
            want = _anchor_apply(self.algebra, self.samples[j], self.eta_samples[j])
            worst = max(worst, vec_dist(rate, {i: -c for i, c in want.items()}))
        return worst

    def reversed(self):
        return GaugePath(
            self.algebra,
            [self.times[-1] - t for t in reversed(self.times)],
            list(reversed(self.samples)),
            [{i: -c for i, c in e.items()} for e in reversed(self.eta_samples)],
            self.ok,
        )


def _anchor_apply(alg, gamma, eta):
    """anchor(gamma)(eta) = sum_k 1/(k-1)! l_k(eta, gamma, ..., gamma)."""
    field = alg.field
    out = {}
    for k, op in alg.sops.items():
        c = field.coerce(Fraction(1, W._factorial(k - 1)))
        for o, val in op.evaluate([eta] + [gamma] * (k - 1)).items():
            out[o] = out.get(o, field.zero) + c * val
    return vec_clean(field, out)


def gauge_flow(alg, mu, eta, step=DEFAULT_STEP, t_end=1.0, radius=None, n_samples=11):
    """Integrate gamma' = -anchor(gamma)(eta) from mu by fixed-step RK4.

    eta is a constant degree-0 vector or a callable t -> vector."""
    import numpy as np

    algf = to_float_algebra(alg)
    field = algf.field
    tower = _dense_tower(algf)
    eta_fun = eta if callable(eta) else (lambda t, e=eta: e)

    def eta_at(t):
        return _to_dense(tower.n, float_vector(field, eta_fun(t)))

    def rhs(t, g):
        return -tower.anchor_rate(g, eta_at(t))

    n_steps = max(1, int(round(t_end / step)))
    h = t_end / n_steps
    sample_every = max(1, n_steps // max(1, n_samples - 1))
    g = _to_dense(tower.n, float_vector(field, mu))
    times, samples, etas = [0.0], [_to_dict(g)], [_to_dict(eta_at(0.0))]
    ok = True
    for s in range(n_steps):
        t = s * h
        k1 = rhs(t, g)
        k2 = rhs(t + h / 2, g + k1 * (h / 2))
        k3 = rhs(t + h / 2, g + k2 * (h / 2))
        k4 = rhs(t + h, g + k3 * h)
        g = g + (k1 + 2 * k2 + 2 * k3 + k4) * (h / 6)
        if radius is not None and float(np.max(np.abs(g))) > radius:
            ok = False
            times.append(t + h)
            samples.append(_to_dict(g))
            etas.append(_to_dict(eta_at(t + h)))
            break
        if (s + 1) % sample_every == 0 or s + 1 == n_steps:
            times.append(t + h)
            samples.append(_to_dict(g))
            etas.append(_to_dict(eta_at(t + h)))
    return GaugePath(algf, times, samples, etas, ok)


def pushforward_path(F, path):
    """Map a gauge path through a morphism: points by the Maurer-Cartan
    pushforward, gauge parameters by the tangent map at each sample."""
    Ff = to_float_morphism(F) if F.field.exact else F
    samples = [Ff.apply_point(g) for g in path.samples]
    etas = []
    for g, e in zip(path.samples, path.eta_samples):
        etas.append(vec_clean(Ff.target.field, Ff.tangent_at(g)(e)))
    return GaugePath(Ff.target, list(path.times), samples, etas, path.ok)


# ------------------------------------------------------------------ nerve

class NerveGraph:
    def __init__(self, algebra, vertices, edges, n_seeds, failures):
        self.algebra = algebra
        self.vertices = vertices  # list of MCElement
        self.edges = edges  # list of (i, j, GaugePath); plus implicit loops
        self.n_seeds = n_seeds
        self.failures = failures

    def components(self):
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j, _ in self.edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
        groups = {}
        for v in range(len(self.vertices)):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def to_json_dict(self):
        verts = []
        for m in self.vertices:
            verts.append(
                {
                    "vector": {
                        str(i): [c.real, c.imag] for i, c in sorted(m.vector.items())
                    },
                    "residual": m.residual,
                }
            )
        edges = [{"from": i, "to": j} for i, j, _ in self.edges]
        return {
            "vertices": verts,
            "edges": edges,
            "components": self.components(),
            "seeds": self.n_seeds,
            "failed_seeds": self.failures,
        }

    def to_graph_text(self):
        """Trivial graph format: vertex lines, '#', edge lines."""
        lines = ["%d v%d" % (i, i) for i in range(len(self.vertices))]
        lines.append("#")
        for i, j, _ in self.edges:
            lines.append("%d %d" % (i, j))
        return "\n".join(lines) + "\n"


def _shoot_edge(alg, v_from, v_to, step, max_iter=12, tol=1e-6, fd=1e-6):
    """Search for a constant gauge parameter whose time-1 flow connects
    two vertices; Gauss-Newton with finite-difference sensitivities."""
    import numpy as np

    deg0 = alg.space.indices_of_degree(0)
    if not deg0:
        return None
    deg1 = alg.space.indices_of_degree(1)
    eta = {i: 0j for i in deg0}

    def endpoint(e):
        return gauge_flow(alg, v_from, e, step=step, n_samples=2).end

    for _ in range(max_iter):
        endp = endpoint(eta)
        r = [endp.get(i, 0j) - v_to.get(i, 0j) for i in deg1]
        if max((abs(c) for c in r), default=0.0) <= tol:
            path = gauge_flow(alg, v_from, eta, step=step)
            if path.max_mc_residual() <= 1e-5:
                return path
            return None
        J = np.zeros((len(deg1), len(deg0)), dtype=complex)
        for col, i in enumerate(deg0):
            bumped = dict(eta)
            bumped[i] = bumped.get(i, 0j) + fd
            pe = endpoint(bumped)
            for row, o in enumerate(deg1):
                J[row, col] = (pe.get(o, 0j) - endp.get(o, 0j)) / fd
        stepv, *_ = np.linalg.lstsq(J, -np.array(r), rcond=None)
        if not np.all(np.isfinite(stepv)):
            return None
        eta = {i: eta.get(i, 0j) + stepv[col] for col, i in enumerate(deg0)}
        if vec_max_norm(eta) > 1e4:
            return None
    return None


def build_nerve(
    alg,
    seeds,
    tol=1e-10,
    dedup_radius=DEDUP_RADIUS,
    flow_step=0.02,
    edge_tol=1e-6,
    max_iter=50,
):
    """Vertices from deduplicated MC solves, edges from constant-parameter
    flow shooting between vertex pairs."""
    algf = to_float_algebra(alg)
    vertices = []
    failures = 0
    for seed in seeds:
        m = solve_mc(algf, seed, tol=tol, max_iter=max_iter)
        if not m.converged:
            failures += 1
            continue
        if any(vec_dist(m.vector, v.vector) <= dedup_radius for v in vertices):
            continue
        vertices.append(m)
    edges = []
    if algf.space.dim(0):
        for i in range(len(vertices)):
            for j in range(len(vertices)):
                if i == j:
                    continue
                path = _shoot_edge(
                    algf, vertices[i].vector, vertices[j].vector, flow_step, tol=edge_tol
                )
                if path is not None:
                    edges.append((i, j, path))
    return NerveGraph(algf, vertices, edges, len(seeds), failures)


# ------------------------------------------------- homotopy gauge action

def twist_morphism(F, b, flat_check=False):
    """Morphism between twisted algebras: components
    f_k^b = sum_j 1/j! f_{k+j}(b, ..., b, -), from the twist at b to the
    twist at the pushforward of b."""
    field = F.field
    src = F.source.twist(b).algebra(check_flat=flat_check)
    tgt = F.target.twist(F.apply_point(b)).algebra(check_flat=flat_check)
    comps = {}
    for k in range(1, F.max_arity + 1):
        acc = MultiLinearOp(src.shifted_space, tgt.shifted_space, k, 0, "sym")
        for m, f in F.components.items():
            j = m - k
            if j < 0:
                continue
            c = field.coerce(Fraction(1, W._factorial(j)))
            acc = acc + _partial_insert(f, b, j).scale(c)
        if not acc.is_zero():
            comps[k] = acc
    return LInftyMorphism(src, tgt, comps)


class OmegaModel:
    """An L-infinity model sitting inside a dgla via a retract (I, P),
    with the discrete gauge group acting on the dgla by
    g . x = ad(g)(x) + trans(g)."""

    def __init__(self, small, big, incl, proj, ad, trans):
        self.small = small
        self.big = big
        self.incl = incl
        self.proj = proj
        self.ad = ad  # g -> GradedMap, degree 0
        self.trans = trans  # g -> degree-1 vector (the inhomogeneous term)
        if any(k > 2 for k in big.sops):
            raise ValueError("the ambient model must be a dgla (no brackets above arity 2)")

    def group_action(self, g, x):
        out = self.ad(g).apply(x)
        for i, c in self.trans(g).items():
            out[i] = out.get(i, self.big.field.zero) + c
        return vec_clean(self.big.field, out)


def homotopy_gauge_action(model, g, mu, max_arity=None):
    """(g * mu, Phi): the transported point P(g . I(mu)) and the morphism
    of twisted algebras obtained by conjugating the retract with the
    group action."""
    big, field = model.big, model.big.field
    Imu = model.incl.apply_point(mu)
    gImu = model.group_action(g, Imu)
    star = model.proj.apply_point(gImu)

    I_tw = twist_morphism(model.incl, mu)
    # the group action is affine; between the twists at I(mu) and g.I(mu)
    # its derivative ad(g) is a strict morphism
    ad_map = model.ad(g).shifted(1, big.shifted_space, big.shifted_space)
    f1 = MultiLinearOp(big.shifted_space, big.shifted_space, 1, 0, "sym")
    for (win, o), c in ad_map_entries(ad_map).items():
        f1.entries[(win, o)] = c
    src_tw = big.twist(Imu).algebra(check_flat=False)
    tgt_tw = big.twist(gImu).algebra(check_flat=False)
    G = LInftyMorphism(src_tw, tgt_tw, {1: f1})
    P_tw = twist_morphism(model.proj, gImu)
    Phi = P_tw.compose(G.compose(I_tw, max_arity), max_arity)
    return star, Phi


def ad_map_entries(gmap):
    out = {}
    sp = gmap.source
    for i in range(sp.total_dim):
        for o, c in gmap.apply({i: gmap.field.one}).items():
            out[((i,), o)] = c
    return out
