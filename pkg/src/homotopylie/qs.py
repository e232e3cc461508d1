"""Quasi-smooth local models: a polynomial section of a trivial bundle
over a polydisc, its two-term tangent complexes, minimal model
decompositions and Morse-type quadratic splittings.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from . import linalg
from .graded import GradedSpace, GradedMap, ChainComplex
from .multilinear import MultiLinearOp
from .linfty import LInftyAlgebra
from .polynomial import MultiPoly, jacobian, eval_matrix, hadamard_factor


class QsSpace:
    """(C^n, trivial rank-r bundle, polynomial section) based at the
    origin; the section must vanish there."""

    def __init__(self, nvars, rank, section, field=None, check=True):
        from .scalars import QQ

        self.nvars = nvars
        self.rank = rank
        self.field = field if field is not None else QQ
        self.section = list(section)
        assert len(self.section) == rank
        if check:
            for p in self.section:
                if not self.field.is_zero(p.constant_term()):
                    raise ValueError("section does not vanish at the basepoint")

    def linear_part(self):
        """r x n matrix of the linearization at the origin."""
        return [p.linear_part_vector() for p in self.section]

    def evaluate(self, point):
        return [p.evaluate(point) for p in self.section]

    def jacobian_at(self, point):
        J = jacobian(self.section, self.nvars)
        return eval_matrix(self.field, J, point)

    def dg_tangent(self, point=None):
        """Two-term tangent complex (degrees 1 -> 2) at a classical point."""
        if point is None:
            point = [self.field.zero] * self.nvars
        V = GradedSpace({1: self.nvars, 2: self.rank}, field=self.field)
        d = GradedMap(V, V, 1)
        J = self.jacobian_at(point)
        for a in range(self.rank):
            for i in range(self.nvars):
                if not self.field.is_zero(J[a][i]):
                    d.set_entry(V.index(2, a), V.index(1, i), J[a][i])
        return ChainComplex(V, d, check=False)

    def tangent_cohomology(self, point=None):
        return self.dg_tangent(point).cohomology_ranks()

    def is_minimal(self):
        return all(self.field.is_zero(c) for row in self.linear_part() for c in row)

    def to_linfty(self):
        """The structure tower: L^1 = variables, L^2 = bundle, with
        l_k the k-th Taylor coefficients, so that the Maurer-Cartan
        function reproduces the section exactly."""
        field = self.field
        V = GradedSpace({1: self.nvars, 2: self.rank}, field=field)
        sp = V.shifted(1)
        ops = {}
        fact = {}
        for a, p in enumerate(self.section):
            out = V.index(2, a)
            for e, c in p.terms.items():
                k = sum(e)
                word = []
                alpha_fact = 1
                for i, m in enumerate(e):
                    word.extend([V.index(1, i)] * m)
                    for t in range(2, m + 1):
                        alpha_fact *= t
                op = ops.setdefault(k, MultiLinearOp(sp, sp, k, 1, "sym"))
                op.add_entry(tuple(word), out, c * field.coerce(alpha_fact))
        return LInftyAlgebra(V, {k: op for k, op in ops.items() if not op.is_zero()})

    def __repr__(self):
        return "QsSpace(n=%d, r=%d)" % (self.nvars, self.rank)


def dcrit(S):
    """Derived critical locus tower of a potential: section = gradient."""
    return QsSpace(S.nvars, S.nvars, S.gradient(), S.field)


class QsMorphism:
    """(base, bundle): base is a list of target.nvars polynomials in the
    source variables; bundle is a target.rank x source.rank matrix of
    polynomials in the source variables, with
    bundle(x) . section_src(x) = section_tgt(base(x))."""

    def __init__(self, source, target, base, bundle, check=True):
        self.source = source
        self.target = target
        self.field = source.field
        self.base = list(base)
        self.bundle = [list(row) for row in bundle]
        if check:
            ok, witness = self.compat_defect()
            if not ok:
                raise ValueError("bundle map does not intertwine sections: %r" % (witness,))

    def compat_defect(self):
        lam_src = self.source.section
        for a in range(self.target.rank):
            lhs = MultiPoly.zero(self.source.nvars, self.field)
            for b in range(self.source.rank):
                lhs = lhs + self.bundle[a][b] * lam_src[b]
            rhs = self.target.section[a].substitute(self.base)
            if not (lhs - rhs).is_zero():
                return False, (a, lhs - rhs)
        return True, None

    def base_jacobian_at(self, point):
        J = jacobian(self.base, self.source.nvars)
        return eval_matrix(self.field, J, point)

    def bundle_at(self, point):
        return eval_matrix(self.field, self.bundle, point)

    def push_point(self, point):
        return [p.evaluate(point) for p in self.base]

    def compose(self, other):
        """self after other."""
        base = [p.substitute(other.base) for p in self.base]
        outer = [[q.substitute(other.base) for q in row] for row in self.bundle]
        bundle = []
        for a in range(self.target.rank):
            row = []
            for c in range(other.source.rank):
                acc = MultiPoly.zero(other.source.nvars, self.field)
                for b in range(self.source.rank):
                    acc = acc + outer[a][b] * other.bundle[b][c]
                row.append(acc)
            bundle.append(row)
        return QsMorphism(other.source, self.target, base, bundle, check=False)

    def is_identity(self):
        if self.source.nvars != self.target.nvars or self.source.rank != self.target.rank:
            return False
        for i, p in enumerate(self.base):
            if not (p - MultiPoly.variable(self.source.nvars, i, self.field)).is_zero():
                return False
        for a, row in enumerate(self.bundle):
            for b, q in enumerate(row):
                want = self.field.one if a == b else self.field.zero
                if not (q - MultiPoly.constant(self.source.nvars, want, self.field)).is_zero():
                    return False
        return True

    def eq(self, other):
        for p, q in zip(self.base, other.base):
            if not (p - q).is_zero():
                return False
        for ra, rb in zip(self.bundle, other.bundle):
            for p, q in zip(ra, rb):
                if not (p - q).is_zero():
                    return False
        return True

    def __repr__(self):
        return "QsMorphism(%r -> %r)" % (self.source, self.target)


def identity_morphism(qs):
    base = [MultiPoly.variable(qs.nvars, i, qs.field) for i in range(qs.nvars)]
    bundle = [
        [
            MultiPoly.constant(qs.nvars, qs.field.one if a == b else qs.field.zero, qs.field)
            for b in range(qs.rank)
        ]
        for a in range(qs.rank)
    ]
    return QsMorphism(qs, qs, base, bundle, check=False)


def is_quasi_iso(morph, points):
    """Quasi-isomorphism of two-term tangent complexes at each point,
    decided through mapping-cone ranks."""
    field = morph.field
    for x in points:
        y = morph.push_point(x)
        J1 = morph.source.jacobian_at(x)
        J2 = morph.target.jacobian_at(y)
        A = morph.base_jacobian_at(x)
        B = morph.bundle_at(x)
        n1, r1 = morph.source.nvars, morph.source.rank
        n2, r2 = morph.target.nvars, morph.target.rank
        # cone: C^n1 -> C^r1 + C^n2 -> C^r2
        M1 = [J1[a][:] for a in range(r1)] + [A[i][:] for i in range(n2)]
        M2 = []
        for a in range(r2):
            row = [B[a][b] for b in range(r1)] + [-J2[a][i] for i in range(n2)]
            M2.append(row)
        rk1 = linalg.rank(field, M1) if M1 else 0
        rk2 = linalg.rank(field, M2) if M2 else 0
        if rk1 != n1:
            return False
        if rk1 + rk2 != r1 + n2:
            return False
        if rk2 != r2:
            return False
    return True


# ------------------------------------------------ minimal decomposition

class MinimalDecomposition:
    """Exact splitting of a quasi-smooth model into a minimal part and a
    linear contractible part, in adapted coordinates (z, n):

      adapted section = (lam_tilde(z, n), n)
      minimal section = lam_tilde(z, 0)

    T is the linear source change (rows: z then n coordinates as linear
    forms in the original variables); Theta is the polynomial bundle
    change applied to the original section."""

    def __init__(self, original, adapted, minimal, T, Theta, M_rows, n_min, n_con, exact=True):
        self.original = original
        self.adapted = adapted
        self.minimal = minimal
        self.T = T
        self.Theta = Theta
        self.M_rows = M_rows  # Hadamard remainders: n . M = lam_tilde(z,n) - lam_tilde(z,0)
        self.n_min = n_min
        self.n_con = n_con
        self.exact = exact
        self.field = original.field

    # morphisms of the decomposition -------------------------------------

    def inclusion(self):
        nv, f = self.adapted.nvars, self.field
        base = [MultiPoly.variable(self.n_min, i, f) for i in range(self.n_min)] + [
            MultiPoly.zero(self.n_min, f) for _ in range(self.n_con)
        ]
        bundle = []
        rp = self.minimal.rank
        for a in range(self.adapted.rank):
            bundle.append(
                [
                    MultiPoly.constant(self.n_min, f.one if a == b else f.zero, f)
                    for b in range(rp)
                ]
            )
        return QsMorphism(self.minimal, self.adapted, base, bundle)

    def projection(self):
        nv, f = self.adapted.nvars, self.field
        base = [MultiPoly.variable(nv, i, f) for i in range(self.n_min)]
        rp = self.minimal.rank
        bundle = []
        for a in range(rp):
            row = []
            for b in range(rp):
                row.append(MultiPoly.constant(nv, f.one if a == b else f.zero, f))
            for i in range(self.n_con):
                row.append(-self.M_rows[i][a])
            bundle.append(row)
        return QsMorphism(self.adapted, self.minimal, base, bundle)

    def homotopy_at(self, t):
        """The contraction at parameter value t, as an endomorphism of the
        adapted model: base (z, t n), bundle mixing in the Hadamard rows."""
        f = self.field
        t = f.coerce(t)
        nv = self.adapted.nvars
        rp = self.minimal.rank
        base = [MultiPoly.variable(nv, i, f) for i in range(self.n_min)] + [
            MultiPoly.variable(nv, self.n_min + i, f).scale(t) for i in range(self.n_con)
        ]
        sub_t = [MultiPoly.variable(nv, i, f) for i in range(self.n_min)] + [
            MultiPoly.variable(nv, self.n_min + i, f).scale(t) for i in range(self.n_con)
        ]
        bundle = []
        for a in range(rp):
            row = []
            for b in range(rp):
                row.append(MultiPoly.constant(nv, f.one if a == b else f.zero, f))
            for i in range(self.n_con):
                Mt = self.M_rows[i][a].substitute(sub_t).scale(t)
                row.append(-self.M_rows[i][a] + Mt)
            bundle.append(row)
        for i in range(self.n_con):
            row = [MultiPoly.zero(nv, f) for _ in range(rp)]
            for j in range(self.n_con):
                row.append(
                    MultiPoly.constant(nv, t if i == j else f.zero, f)
                )
            bundle.append(row)
        return QsMorphism(self.adapted, self.adapted, base, bundle)

    def verify(self, t_samples=(0, 1, Fraction(1, 2), 2, -1, 3)):
        """All decomposition identities, exactly.  The homotopy identities
        are polynomial in t of bounded degree, so checking them at more
        sample values than the degree is an exact verification."""
        out = {}
        I, P = self.inclusion(), self.projection()
        out["inclusion compat"] = I.compat_defect()[0]
        out["projection compat"] = P.compat_defect()[0]
        out["P I = id"] = P.compose(I).is_identity()
        out["H_1 = id"] = self.homotopy_at(1).is_identity()
        out["H_0 = I P"] = self.homotopy_at(0).eq(I.compose(P))
        ok = True
        for t in t_samples:
            Ht = self.homotopy_at(t)
            if not Ht.compat_defect()[0]:
                ok = False
                break
            if not Ht.compose(I).eq(I):
                ok = False
                break
        out["H_t I = I"] = ok
        return out


def _monomials_upto(nvars, deg):
    out = []
    for d in range(deg + 1):
        for c in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in c:
                e[i] += 1
            out.append(tuple(e))
    return out


def _polynomial_linearizers(qs, deg_bound):
    """Rows theta (vectors of polynomials) with theta . section exactly a
    linear form; returns list of (theta, linear coefficient vector)."""
    field = qs.field
    n, r = qs.nvars, qs.rank
    monos = _monomials_upto(n, deg_bound)
    nm = len(monos)
    # unknowns: coefficient of mono m in theta_a -> index a*nm + j
    # constraints: all non-linear coefficients of sum_a theta_a lam_a vanish
    rows_by_mono = {}
    for a in range(r):
        lam = qs.section[a]
        for j, m in enumerate(monos):
            col = a * nm + j
            for e, c in lam.terms.items():
                tot = tuple(x + y for x, y in zip(e, m))
                if sum(tot) == 1:
                    continue  # linear output is allowed
                rows_by_mono.setdefault(tot, {})[col] = (
                    rows_by_mono.setdefault(tot, {}).get(col, field.zero) + c
                )
    nunk = r * nm
    A = []
    for tot in sorted(rows_by_mono):
        row = [field.zero] * nunk
        for col, c in rows_by_mono[tot].items():
            row[col] = c
        A.append(row)
    kern = linalg.kernel_basis(field, A, nunk) if A else linalg.kernel_basis(field, [], nunk)
    out = []
    for v in kern:
        theta = []
        for a in range(r):
            p = MultiPoly(n, field)
            for j, m in enumerate(monos):
                c = v[a * nm + j]
                if not field.is_zero(c):
                    p.terms[m] = c
            theta.append(p)
        # linear part of theta . lam
        mu = [field.zero] * n
        for a in range(r):
            prod = theta[a] * qs.section[a]
            lv = prod.linear_part_vector()
            mu = [x + y for x, y in zip(mu, lv)]
        out.append((theta, mu))
    return out


def minimal_decomposition(qs, deg_bound=None, strict=True):
    """Adapt coordinates so the section splits as (lam_tilde(z,n), n) and
    return the associated minimal model decomposition.

    The fiber coordinates n are linear forms that lie in the polynomial
    row span of the section; for sections where only a truncated row
    reduction exists this raises (strict) or is not attempted."""
    field = qs.field
    n, r = qs.nvars, qs.rank
    D = qs.linear_part()
    r2 = linalg.rank(field, D) if D and D[0] else 0
    if deg_bound is None:
        deg_bound = max(p.degree() for p in qs.section)
    if r2 == 0:
        zero_rows = []
        adapted = qs
        return MinimalDecomposition(qs, qs, qs, linalg.identity(field, n),
                                    None, zero_rows, n, 0, exact=True)

    # low degree bounds usually suffice, so escalate instead of solving
    # the full-degree linearizer system outright
    chosen = []
    for db in range(1, deg_bound + 1):
        sols = _polynomial_linearizers(qs, db)
        chosen = []
        mu_rows = []
        for theta, mu in sols:
            if all(field.is_zero(c) for c in mu):
                continue
            if linalg.rank(field, mu_rows + [mu]) > len(mu_rows):
                chosen.append((theta, mu))
                mu_rows.append(mu)
            if len(chosen) == r2:
                break
        if len(chosen) == r2:
            break
    if len(chosen) < r2:
        raise ValueError(
            "no exact polynomial adaptation at degree bound %d "
            "(found %d of %d fiber coordinates)" % (deg_bound, len(chosen), r2)
        )

    # source change: z = standard coordinates completing ker of the mu rows
    z_idx = []
    cur = [list(row) for row in mu_rows]
    for i in range(n):
        e = [field.zero] * n
        e[i] = field.one
        if linalg.rank(field, cur + [e]) > linalg.rank(field, cur):
            cur.append(e)
            z_idx.append(i)
    n1 = n - r2
    assert len(z_idx) == n1
    T = []
    for i in z_idx:
        e = [field.zero] * n
        e[i] = field.one
        T.append(e)
    T.extend(mu_rows)
    Tinv = linalg.inverse(field, T)

    # target rows: constant rows completing theta(0)
    theta0 = [[t.constant_term() for t in theta] for theta, _ in chosen]
    kappa_idx = linalg.complement_pivots(
        field, [list(row) for row in theta0], r
    ) if r2 < r else []
    # fall back to full scan if needed
    if len(kappa_idx) != r - r2:
        kappa_idx = []
        cur = [list(row) for row in theta0]
        for a in range(r):
            e = [field.zero] * r
            e[a] = field.one
            if linalg.rank(field, cur + [e]) > linalg.rank(field, cur):
                cur.append(e)
                kappa_idx.append(a)
    assert len(kappa_idx) == r - r2

    # substitution x = Tinv . y
    yvars = [MultiPoly.variable(n, j, field) for j in range(n)]
    x_of_y = []
    for i in range(n):
        p = MultiPoly.zero(n, field)
        for j in range(n):
            if not field.is_zero(Tinv[i][j]):
                p = p + yvars[j].scale(Tinv[i][j])
        x_of_y.append(p)
    lam_y = [p.substitute(x_of_y) for p in qs.section]

    new_section = []
    Theta = []
    for a in kappa_idx:
        row = [
            MultiPoly.constant(n, field.one if b == a else field.zero, field)
            for b in range(r)
        ]
        Theta.append(row)
        new_section.append(lam_y[a])
    for theta, _mu in chosen:
        theta_y = [t.substitute(x_of_y) for t in theta]
        Theta.append(theta_y)
        acc = MultiPoly.zero(n, field)
        for b in range(r):
            acc = acc + theta_y[b] * lam_y[b]
        new_section.append(acc)

    # sanity: the last r2 components are exactly the n coordinates
    for i in range(r2):
        want = MultiPoly.variable(n, n1 + i, field)
        if not (new_section[r - r2 + i] - want).is_zero():
            raise AssertionError("adaptation failed to produce exact fiber coordinates")

    adapted = QsSpace(n, r, new_section, field)
    rp = r - r2
    lam_tilde = new_section[:rp]

    # minimal section: z variables only
    proj_z = [MultiPoly.variable(n1, i, field) for i in range(n1)] + [
        MultiPoly.zero(n1, field) for _ in range(r2)
    ]
    minimal = QsSpace(n1, rp, [p.substitute(proj_z) for p in lam_tilde], field)

    # Hadamard rows: lam_tilde(z,n) - lam_tilde(z,0) = sum_i n_i M_i
    M_rows = []
    partials = []
    for i in range(r2 + 1):
        sub = [MultiPoly.variable(n, j, field) for j in range(n1 + i)] + [
            MultiPoly.zero(n, field) for _ in range(r2 - i)
        ]
        partials.append([p.substitute(sub) for p in lam_tilde])
    for i in range(r2):
        row = []
        for a in range(rp):
            diff = partials[i + 1][a] - partials[i][a]
            row.append(hadamard_factor(diff, n1 + i))
        M_rows.append(row)

    return MinimalDecomposition(qs, adapted, minimal, T, Theta, M_rows, n1, r2, exact=True)


# --------------------------------------------------- quadratic splitting

class MorseThomSplit:
    def __init__(self, original, change, quad_coeffs, residual, cutoff, exact):
        self.original = original
        self.change = change  # substitution: new vars -> old expression of S
        self.quad_coeffs = quad_coeffs  # c_i for the sum c_i z_i^2 part
        self.residual = residual  # polynomial in the remaining variables
        self.cutoff = cutoff
        self.exact = exact

    @property
    def split_rank(self):
        return len(self.quad_coeffs)

    def reconstructed(self):
        """S(change(z)) as a polynomial (truncated at the cutoff when the
        split is not exact)."""
        return self.original.substitute(self.change)


def _congruence_diagonalize(field, H):
    """P with P^T H P diagonal; returns (P, diagonal entries)."""
    n = len(H)
    A = [list(row) for row in H]
    P = linalg.identity(field, n)

    def add_col(dst, src, c):
        for r in range(n):
            A[r][dst] = A[r][dst] + c * A[r][src]
        for r in range(n):
            A[dst][r] = A[dst][r] + c * A[src][r]
        for r in range(n):
            P[r][dst] = P[r][dst] + c * P[r][src]

    def swap_cols(a, b):
        for r in range(n):
            A[r][a], A[r][b] = A[r][b], A[r][a]
        A[a], A[b] = A[b], A[a]
        for r in range(n):
            P[r][a], P[r][b] = P[r][b], P[r][a]

    k = 0
    for k in range(n):
        if field.is_zero(A[k][k]):
            # find a nonzero diagonal below, or create one
            done = False
            for j in range(k + 1, n):
                if not field.is_zero(A[j][j]):
                    swap_cols(k, j)
                    done = True
                    break
            if not done:
                for j in range(k + 1, n):
                    if not field.is_zero(A[k][j]):
                        add_col(k, j, field.one)
                        done = True
                        break
            if not done:
                continue
        piv = A[k][k]
        for j in range(k + 1, n):
            if not field.is_zero(A[k][j]):
                add_col(j, k, -A[k][j] / piv)
    diag = [A[i][i] for i in range(n)]
    return P, diag


def morse_thom_split(S, cutoff=None):
    """Split off the nondegenerate quadratic part of a potential by a
    degree-by-degree polynomial change of coordinates:
    S(change(z)) = sum c_i z_i^2 + p(z_rest) below the cutoff."""
    field = S.field
    n = S.nvars
    if cutoff is None:
        cutoff = max(S.degree() + 2, 6)
    S2 = S.homogeneous_part(2)
    H = [[field.zero] * n for _ in range(n)]
    for e, c in S2.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx[0], idx[1]
        if i == j:
            H[i][i] = H[i][i] + c
        else:
            half = c / field.coerce(2)
            H[i][j] = H[i][j] + half
            H[j][i] = H[j][i] + half
    P, diag = _congruence_diagonalize(field, H)
    # order: nonzero diagonal entries first
    order = [i for i in range(n) if not field.is_zero(diag[i])] + [
        i for i in range(n) if field.is_zero(diag[i])
    ]
    d_split = sum(1 for i in range(n) if not field.is_zero(diag[i]))
    coeffs = [diag[i] for i in order[:d_split]]
    # linear change: old x = P . (reordered z)
    zvars = [MultiPoly.variable(n, j, field) for j in range(n)]
    change = []
    for i in range(n):
        p = MultiPoly.zero(n, field)
        for jz, jorig in enumerate(order):
            c = P[i][jorig]
            if not field.is_zero(c):
                p = p + zvars[jz].scale(c)
        change.append(p)
    cur = S.substitute(change)

    for m in range(3, cutoff + 1):
        Rm = cur.homogeneous_part(m)
        # part of Rm involving the split variables
        shift = [MultiPoly.zero(n, field) for _ in range(d_split)] + zvars[d_split:]
        Rm_rest = Rm.substitute(shift)
        R = Rm - Rm_rest
        if R.is_zero():
            continue
        # write R = sum_i z_i h_i greedily and absorb via z_i -> z_i - h_i/(2 c_i)
        subs = list(zvars)
        work = R
        for i in range(d_split):
            hi = hadamard_factor(work, i)
            rest = work - MultiPoly.variable(n, i, field) * hi
            work = rest
            if hi.is_zero():
                continue
            subs[i] = subs[i] - hi.scale(field.one / (field.coerce(2) * coeffs[i]))
        # truncating here keeps the coordinate change from compounding in
        # degree; anything dropped sits above the cutoff
        change = [p.substitute(subs).truncate(cutoff) for p in change]
        cur = S.substitute(change).truncate(cutoff)

    quad = MultiPoly.zero(n, field)
    for i, c in enumerate(coeffs):
        quad = quad + (zvars[i] * zvars[i]).scale(c)
    shift = [MultiPoly.zero(n, field) for _ in range(d_split)] + zvars[d_split:]
    residual_full = cur - quad
    residual = residual_full.substitute(shift)
    exact_res = S.substitute(change) - quad - residual
    exact = exact_res.is_zero()
    return MorseThomSplit(S, change, coeffs, residual, cutoff, exact)
