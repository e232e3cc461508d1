"""Homotopy BV data and verification: the action/bundle-map triangle,
gauge invariance, tangent-cotangent quasi-isomorphisms, shifted
symplectic checks, pullbacks, effective actions, metric structures,
volume forms and BV orientability as a sign-consistency problem on the
nerve graph.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from . import linalg
from .polynomial import MultiPoly, jacobian, eval_matrix


# ------------------------------------------- polynomial views of a tower

def mc_polynomials(alg):
    """The Maurer-Cartan function of a tower as polynomials: one
    polynomial in the degree-1 coordinates per degree-2 generator."""
    field = alg.field
    V = alg.space
    deg1 = V.indices_of_degree(1)
    deg2 = V.indices_of_degree(2)
    n = len(deg1)
    col = {idx: i for i, idx in enumerate(deg1)}
    out = [MultiPoly.zero(n, field) for _ in deg2]
    row = {idx: a for a, idx in enumerate(deg2)}
    for k, op in alg.sops.items():
        for (word, o), c in op.entries.items():
            if o not in row or any(w not in col for w in word):
                continue
            e = [0] * n
            aut = 1
            for w in word:
                e[col[w]] += 1
            for m in e:
                for t in range(2, m + 1):
                    aut *= t
            key = tuple(e)
            p = out[row[o]]
            p.terms[key] = p.terms.get(key, field.zero) + c / field.coerce(aut)
    for p in out:
        p.terms = {e: c for e, c in p.terms.items() if not field.is_zero(c)}
    return out


def anchor_polynomials(alg):
    """For each degree-0 generator, the polynomial vector field on the
    degree-1 coordinates given by the infinitesimal gauge action."""
    field = alg.field
    V = alg.space
    deg0 = V.indices_of_degree(0)
    deg1 = V.indices_of_degree(1)
    n = len(deg1)
    col = {idx: i for i, idx in enumerate(deg1)}
    out = {}
    for g in deg0:
        out[g] = [MultiPoly.zero(n, field) for _ in deg1]
    rowix = {idx: i for i, idx in enumerate(deg1)}
    for k, op in alg.sops.items():
        for (word, o), c in op.entries.items():
            if o not in rowix:
                continue
            gs = [w for w in word if w in out]
            rest = [w for w in word if w not in out]
            if len(gs) != 1 or any(w not in col for w in rest):
                continue
            g = gs[0]
            e = [0] * n
            aut = 1
            for w in rest:
                e[col[w]] += 1
            for m in e:
                for t in range(2, m + 1):
                    aut *= t
            p = out[g][rowix[o]]
            p.terms[tuple(e)] = p.terms.get(tuple(e), field.zero) + c / field.coerce(aut)
    for g in out:
        for p in out[g]:
            p.terms = {e: c for e, c in p.terms.items() if not field.is_zero(c)}
    return out


# --------------------------------------------------------------- BV data

class BVData:
    """(tower, S, sigma): an action S on the degree-1 coordinates and a
    bundle map sigma with degree-2 rows and degree-1-dual columns, so
    that sigma applied to the MC section gives the exterior derivative
    of S."""

    def __init__(self, algebra, S, sigma):
        self.algebra = algebra
        self.field = algebra.field
        self.S = S
        self.sigma = [list(row) for row in sigma]
        self.n = algebra.space.dim(1)
        self.r = algebra.space.dim(2)
        assert len(self.sigma) == self.r
        assert all(len(row) == self.n for row in self.sigma)


class BVReport:
    def __init__(self, ok, checks, witness=None):
        self.ok = ok
        self.checks = checks
        self.witness = witness  # (class, detail)

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "BVReport(ok)"
        return "BVReport(FAIL %s: %r)" % (self.witness[0], self.witness[1])


def _quasi_iso_square(field, J, sigma_pt, n, r):
    """Cone-rank test for the vertical map (sigma^T, sigma) between the
    tangent complex and its shifted dual at one point."""
    # cone: L1 --(J, sigma^T)--> L2 + (L2)* --(sigma | -J^T)--> (L1)*
    M1 = []
    for a in range(r):
        M1.append([J[a][i] for i in range(n)])
    for a in range(r):
        M1.append([sigma_pt[a][i] for i in range(n)])
    M2 = []
    for i in range(n):
        row = [sigma_pt[a][i] for a in range(r)]
        row += [-J[a][i] for a in range(r)]
        M2.append(row)
    rk1 = linalg.rank(field, M1) if n else 0
    rk2 = linalg.rank(field, M2) if r else 0
    if rk1 != n:
        return False, ("kernel in degree 1", n - rk1)
    if rk2 != n:
        return False, ("cokernel in degree 2", n - rk2)
    if rk1 + rk2 != 2 * r:
        return False, ("middle cohomology", 2 * r - rk1 - rk2)
    return True, None


def validate_bv(bv, points=None, window=(1, 2), tol=None):
    """The three BV axioms plus the quasi-smoothness precondition.
    Triangle and gauge invariance are exact polynomial identities; the
    tangent-cotangent quasi-isomorphism is checked pointwise."""
    alg, field = bv.algebra, bv.field
    n, r = bv.n, bv.r
    checks = {}
    witness = None

    lam = mc_polynomials(alg)

    pts = [[field.zero] * n]
    if points is not None:
        pts += [list(p) for p in points]

    # precondition: quasi-smooth in the window at the sampled points
    ok_qs = True
    V = alg.space
    deg1 = V.indices_of_degree(1)
    for p in pts:
        mu = {idx: c for idx, c in zip(deg1, p) if not field.is_zero(c)}
        if not alg.is_quasi_smooth(mu, window=window):
            ok_qs = False
            if witness is None:
                witness = ("precondition", p)
            break
    checks["quasi-smooth"] = ok_qs

    # triangle: sigma . lambda = d S, exactly
    ok_tri = True
    grad = bv.S.gradient()
    for i in range(n):
        acc = MultiPoly.zero(n, field)
        for a in range(r):
            acc = acc + bv.sigma[a][i] * lam[a]
        if not (acc - grad[i]).is_zero():
            ok_tri = False
            if witness is None:
                witness = ("triangle", (i, acc - grad[i]))
            break
    checks["triangle"] = ok_tri

    # gauge invariance: contraction of d S with every anchor field is zero
    ok_gauge = True
    anchors = anchor_polynomials(alg)
    for g, vf in anchors.items():
        acc = MultiPoly.zero(n, field)
        for i in range(n):
            acc = acc + grad[i] * vf[i]
        if not acc.is_zero():
            ok_gauge = False
            if witness is None:
                witness = ("gauge", (g, acc))
            break
    checks["gauge"] = ok_gauge

    # quasi-iso of (sigma^T, sigma) at the sampled MC points
    ok_qi = True
    Jpolys = jacobian(lam, n)
    for p in pts:
        vals = [q.evaluate(p) for q in lam]
        if any(not field.is_zero(v) for v in vals):
            continue  # only MC points constrain the square
        J = eval_matrix(field, Jpolys, p)
        sig = eval_matrix(field, bv.sigma, p)
        good, detail = _quasi_iso_square(field, J, sig, n, r)
        if not good:
            ok_qi = False
            if witness is None:
                witness = ("quasi-iso", (p, detail))
            break
    checks["quasi-iso"] = ok_qi

    ok = all(checks.values())
    return BVReport(ok, checks, witness)


def canonical_dcrit_bv(S):
    """dCrit(S) with the identity bundle map: always homotopy BV data."""
    from .qs import dcrit

    qs = dcrit(S)
    alg = qs.to_linfty()
    field = qs.field
    n = qs.nvars
    sigma = [
        [
            MultiPoly.constant(n, field.one if a == i else field.zero, field)
            for i in range(n)
        ]
        for a in range(n)
    ]
    return BVData(alg, S, sigma)


def extend_by_contractible_bv(S, m):
    """dCrit(S) times a contractible factor: variables extended by m,
    section extended by the new coordinates themselves, action pulled
    back, bundle map extended by zero on the contractible block."""
    from .qs import QsSpace

    field = S.field
    n = S.nvars
    nn = n + m
    pad = [MultiPoly.variable(nn, i, field) for i in range(n)]
    section = [g.substitute(pad) for g in S.gradient()]
    section += [MultiPoly.variable(nn, n + j, field) for j in range(m)]
    qs = QsSpace(nn, nn, section, field)
    alg = qs.to_linfty()
    S_big = S.substitute(pad)
    sigma = []
    for a in range(nn):
        row = []
        for i in range(nn):
            one = a == i and a < n
            row.append(MultiPoly.constant(nn, field.one if one else field.zero, field))
        sigma.append(row)
    return BVData(alg, S_big, sigma), qs


# ------------------------------------------------------ symplectic forms

def check_shifted_symplectic(alg, omega, points=None):
    """omega: r x n matrix of polynomials, the pairing of the degree-2
    fiber directions against the degree-1 base one-forms (the only block
    a (-1)-shifted two-form has here).  Closedness is a polynomial
    identity; nondegeneracy is the cone-rank test per sampled MC point."""
    field = alg.field
    n = alg.space.dim(1)
    r = alg.space.dim(2)
    for a in range(r):
        for i in range(n):
            for j in range(i + 1, n):
                if not (omega[a][i].diff(j) - omega[a][j].diff(i)).is_zero():
                    return False, ("not closed", (a, i, j))
    lam = mc_polynomials(alg)
    Jpolys = jacobian(lam, n)
    pts = [[field.zero] * n] + ([list(p) for p in points] if points else [])
    for p in pts:
        if any(not field.is_zero(q.evaluate(p)) for q in lam):
            continue
        J = eval_matrix(field, Jpolys, p)
        W = eval_matrix(field, omega, p)
        good, detail = _quasi_iso_square(field, J, W, n, r)
        if not good:
            return False, ("degenerate", (p, detail))
    return True, None


def potential_from_symplectic(alg, omega, cutoff=None):
    """A potential (S, sigma) for a closed split two-form: sigma is the
    form itself and S integrates the one-form sigma applied to the MC
    section, when that one-form is closed up to the cutoff."""
    field = alg.field
    n = alg.space.dim(1)
    r = alg.space.dim(2)
    lam = mc_polynomials(alg)
    theta = []
    for i in range(n):
        acc = MultiPoly.zero(n, field)
        for a in range(r):
            acc = acc + omega[a][i] * lam[a]
        theta.append(acc)
    if cutoff is not None:
        theta = [t.truncate(cutoff) for t in theta]
    for i in range(n):
        for j in range(i + 1, n):
            if not (theta[i].diff(j) - theta[j].diff(i)).is_zero():
                return None
    # Euler/Poincare integration of a closed polynomial one-form
    S = MultiPoly.zero(n, field)
    for i in range(n):
        for e, c in theta[i].terms.items():
            tot = sum(e) + 1
            key = tuple(m + (1 if k == i else 0) for k, m in enumerate(e))
            S.terms[key] = S.terms.get(key, field.zero) + c / field.coerce(tot)
    S.terms = {e: c for e, c in S.terms.items() if not field.is_zero(c)}
    grad = S.gradient()
    for i in range(n):
        d = grad[i] - theta[i]
        if not d.is_zero():
            return None
    return S, [list(row) for row in omega]


def pullback_bv(phi, bv_target, source_alg=None):
    """Transport BV data along a morphism of local models (base map with
    a bundle map intertwining the sections)."""
    field = bv_target.field
    n_src = phi.source.nvars
    S_src = bv_target.S.substitute(phi.base)
    J = jacobian(phi.base, n_src)
    sigma_src = []
    for b in range(phi.source.rank):
        row = []
        for j in range(n_src):
            acc = MultiPoly.zero(n_src, field)
            for a in range(phi.target.rank):
                Bab = phi.bundle[a][b]
                for i in range(phi.target.nvars):
                    sig = bv_target.sigma[a][i].substitute(phi.base)
                    acc = acc + Bab * sig * J[i][j]
            row.append(acc)
        sigma_src.append(row)
    alg = source_alg if source_alg is not None else phi.source.to_linfty()
    return BVData(alg, S_src, sigma_src)


def effective_action(split):
    """Quadratic part boxplus minimal part of a Morse-Thom split, as one
    polynomial in the split coordinates."""
    field = split.original.field
    n = split.original.nvars
    quad = MultiPoly.zero(n, field)
    for i, c in enumerate(split.quad_coeffs):
        v = MultiPoly.variable(n, i, field)
        quad = quad + (v * v).scale(c)
    return quad + split.residual


def check_effective_compat(phi_polys, S_source, S_target, cutoff):
    """d of (pullback of the target effective action minus the source
    one) vanishes below the cutoff."""
    pulled = S_target.substitute(phi_polys)
    diff = pulled - S_source
    for g in diff.gradient():
        if not g.truncate(cutoff - 1).is_zero():
            return False
    return True


# ------------------------------------------------------ metric structures

class MetricStructure:
    """A symmetric nondegenerate scalar pairing on the degree-1 slot,
    with a chosen sign of the square root of its determinants."""

    def __init__(self, field, Q, sqrt_sign=1):
        self.field = field
        self.Q = [list(row) for row in Q]
        n = len(Q)
        for i in range(n):
            for j in range(n):
                assert field.eq(Q[i][j], Q[j][i]), "pairing must be symmetric"
        if field.is_zero(linalg.det(field, self.Q)):
            raise ValueError("degenerate pairing")
        self.sqrt_sign = sqrt_sign


class VolumeForm:
    def __init__(self, chart, density, exact):
        self.chart = chart
        self.density = density
        self.exact = exact


def metric_vanishes_on_gauge_directions(ms, alg, points=None):
    """Item: the pairing restricted to the tangent of the MC locus is
    zero; tested on the kernel of the linearized section at MC points."""
    field = alg.field
    lam = mc_polynomials(alg)
    n = alg.space.dim(1)
    Jp = jacobian(lam, n)
    pts = [[field.zero] * n] + ([list(p) for p in points] if points else [])
    for p in pts:
        if any(not field.is_zero(q.evaluate(p)) for q in lam):
            continue
        J = eval_matrix(field, Jp, p)
        kern = linalg.kernel_basis(field, J, n)
        for u in kern:
            for v in kern:
                s = field.zero
                for i in range(n):
                    for j in range(n):
                        s = s + u[i] * ms.Q[i][j] * v[j]
                if not field.is_zero(s):
                    return False, (p, u, v)
    return True, None


def _scalar_sqrt(field, x):
    """Exact square root when the field provides one; float fallback with
    a warning otherwise."""
    if field.exact:
        root = field.sqrt(x)
        if root is not None:
            return root, True
        warnings.warn("determinant has no exact square root; degrading to float")
    import cmath

    return cmath.sqrt(complex(field.to_float(x))), False


def restrict_metric(ms, basis):
    """Restriction of the pairing to the span of `basis` (columns), with
    the metric volume density sqrt_sign * sqrt(det)."""
    field = ms.field
    n = len(ms.Q)
    k = len(basis)
    Qr = [[field.zero] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            s = field.zero
            for i in range(n):
                for j in range(n):
                    s = s + basis[a][i] * ms.Q[i][j] * basis[b][j]
            Qr[a][b] = s
    d = linalg.det(field, Qr) if k else field.one
    if field.is_zero(d):
        raise ValueError("restricted pairing is degenerate")
    root, exact = _scalar_sqrt(field, d)
    sign = field.coerce(ms.sqrt_sign) if exact else complex(ms.sqrt_sign)
    return Qr, VolumeForm(basis, sign * root, exact)


def check_volume_pullback(field, det_J, vol_total, vol_fiber, vol_base, tol=1e-10):
    """det(J) . density_total = density_fiber . density_base, exactly in
    exact modes, to tolerance otherwise."""
    lhs = det_J * vol_total.density
    rhs = vol_fiber.density * vol_base.density
    if vol_total.exact and vol_fiber.exact and vol_base.exact and field.exact:
        return field.eq(lhs, rhs)
    return abs(complex(lhs) - complex(rhs)) <= tol


# ---------------------------------------------------------- orientability

class OrientationCocycle:
    """Per-vertex determinant line values and per-edge transitions on a
    graph of charts."""

    def __init__(self, n_vertices, fiber_values, transitions):
        self.n_vertices = n_vertices
        self.fiber_values = list(fiber_values)
        self.transitions = dict(transitions)  # (i, j) -> scalar


def check_bv_orientable(oc, tol=1e-9):
    """Search for per-vertex square roots s_v with s_v^2 = fiber value
    and s_j = t_ij s_i along every edge.  Returns (True, section) or
    (False, violating cycle as a vertex list)."""
    import cmath

    n = oc.n_vertices
    roots = [cmath.sqrt(complex(v)) for v in oc.fiber_values]
    adj = {}
    for (i, j), t in oc.transitions.items():
        adj.setdefault(i, []).append((j, complex(t)))
        adj.setdefault(j, []).append((i, 1.0 / complex(t)))

    def edge_sign(i, j, t):
        """The sign forced on eps_i * eps_j, or None if the data is not
        even a cocycle candidate on this edge."""
        if abs(roots[j]) < tol or abs(roots[i]) < tol:
            return None
        q = t * roots[i] / roots[j]
        if abs(q - 1) <= tol:
            return 1
        if abs(q + 1) <= tol:
            return -1
        return None

    eps = [None] * n
    parent = {}
    for start in range(n):
        if eps[start] is not None:
            continue
        eps[start] = 1
        stack = [start]
        while stack:
            v = stack.pop()
            for w, t in adj.get(v, []):
                s = edge_sign(v, w, t)
                if s is None:
                    return False, _cycle_to(parent, start, v) + [w]
                if eps[w] is None:
                    eps[w] = eps[v] * s
                    parent[w] = v
                    stack.append(w)
                elif eps[w] != eps[v] * s:
                    # violating cycle: tree path v -> root -> w plus edge
                    pv = _path_to_root(parent, v)
                    pw = _path_to_root(parent, w)
                    common = set(pv) & set(pw)
                    cyc = []
                    for x in pv:
                        cyc.append(x)
                        if x in common:
                            break
                    tail = []
                    for x in pw:
                        if x in common:
                            break
                        tail.append(x)
                    return False, cyc + list(reversed(tail))
    section = [eps[v] * roots[v] for v in range(n)]
    return True, section


def _path_to_root(parent, v):
    out = [v]
    while out[-1] in parent:
        out.append(parent[out[-1]])
    return out


def _cycle_to(parent, start, v):
    return list(reversed(_path_to_root(parent, v)))
