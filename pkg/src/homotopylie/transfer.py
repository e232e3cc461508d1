"""Homotopy transfer: retracts, perturbation series, word-space transfer,
minimal models and strong decompositions.

The perturbation series acts on anything map-like (graded maps or sparse
word maps); in exact modes the Neumann series must terminate, in float
mode it is truncated once terms fall below a relative tolerance.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .graded import GradedSpace, GradedMap, ChainComplex
from .multilinear import MultiLinearOp
from .linfty import LInftyAlgebra, LInftyMorphism
from . import words as W

MAX_NEUMANN_TERMS = 64
FLOAT_SERIES_TOL = 1e-14


class RetractContext:
    """Strong deformation retract of (V, d_V) onto (W, d_W):
    i includes, p projects, h is the homotopy on V with
    p i = id, 1 - i p = d h + h d, and the side conditions
    h i = 0, p h = 0, h h = 0."""

    def __init__(self, small, big, i, p, h, check=True):
        self.small = small
        self.big = big
        self.i = i
        self.p = p
        self.h = h
        self.field = big.field
        if check:
            errs = self.identity_defects()
            bad = [k for k, v in errs.items() if not v]
            if bad:
                raise ValueError("retract identities fail: %s" % ", ".join(bad))

    def identity_defects(self):
        i, p, h = self.i, self.p, self.h
        dV, dW = self.big.d, self.small.d
        idW = GradedMap.identity(self.small.space)
        idV = GradedMap.identity(self.big.space)
        return {
            "p i = id": (p @ i).eq(idW),
            "chain map i": (dV @ i).eq(i @ dW),
            "chain map p": (p @ dV).eq(dW @ p),
            "homotopy": (idV - i @ p).eq(dV @ h + h @ dV),
            "h i = 0": (h @ i).is_zero(),
            "p h = 0": (p @ h).is_zero(),
            "h h = 0": (h @ h).is_zero(),
        }


class PerturbedRetract:
    def __init__(self, d_small, d_big, i, p, h):
        self.d_small = d_small
        self.d_big = d_big
        self.i = i
        self.p = p
        self.h = h


def _series(field, first, step, max_terms=MAX_NEUMANN_TERMS):
    """first + step(first) + step(step(first)) + ...  Terminates on exact
    zero (exact fields) or relative smallness (float)."""
    acc = first
    term = first
    base = first.norm() if not field.exact else None
    for _ in range(max_terms):
        term = step(term)
        if field.exact:
            if term.is_zero():
                return acc
        else:
            if term.norm() <= FLOAT_SERIES_TOL * max(1.0, base):
                return acc
        acc = acc + term
    if field.exact:
        raise ValueError("perturbation series did not terminate (perturbation not nilpotent)")
    return acc


def hpl_perturb(field, d_small, d_big, i, p, h, mu, check_square=False):
    """Homological perturbation lemma.  mu is a degree +1 perturbation of
    d_big with (d_big + mu)^2 = 0.  Returns the perturbed retract."""
    if check_square:
        dd = d_big + mu
        if not (dd @ dd).is_zero():
            raise ValueError("(d + mu)^2 != 0")
    hm = h @ mu
    mh = mu @ h
    i_new = _series(field, i, lambda t: -(hm @ t))
    p_new = _series(field, p, lambda t: -(t @ mh))
    h_new = _series(field, h, lambda t: -(hm @ t))
    # d_small' = d_small + sum_n p (-mu h)^n mu i
    u = mu @ i
    acc = p @ u
    term = u
    for _ in range(MAX_NEUMANN_TERMS):
        term = -(mh @ term)
        if field.exact:
            if term.is_zero():
                break
        else:
            if term.norm() <= FLOAT_SERIES_TOL * max(1.0, u.norm()):
                break
        acc = acc + (p @ term)
    else:
        if field.exact:
            raise ValueError("perturbation series did not terminate")
    d_small_new = d_small + acc
    return PerturbedRetract(d_small_new, d_big + mu, i_new, p_new, h_new)


def perturb_retract(ctx, mu, check_square=True):
    """hpl_perturb applied to a RetractContext of chain complexes."""
    pr = hpl_perturb(
        ctx.field, ctx.small.d, ctx.big.d, ctx.i, ctx.p, ctx.h, mu, check_square=check_square
    )
    return pr


# ------------------------------------------------------------- splittings

class Splitting:
    """h with h^2 = 0, h d h = h, d h d = d on a complex (V, d)."""

    def __init__(self, space, d, h, check=True):
        self.space = space
        self.d = d
        self.h = h
        self.field = space.field
        if check:
            if not (h @ h).is_zero():
                raise ValueError("h^2 != 0")
            if not (h @ d @ h).eq(h):
                raise ValueError("h d h != h")
            if not (d @ h @ d).eq(d):
                raise ValueError("d h d != d")

    def laplacian(self):
        return self.d @ self.h + self.h @ self.d

    def harmonic_space_basis(self):
        """Per-degree basis of ker(laplacian) as columns."""
        lap = self.laplacian()
        out = {}
        for deg in self.space.degrees():
            M = lap.block(deg)
            out[deg] = linalg.kernel_basis(self.field, M, self.space.dim(deg))
        return out


def standard_splitting(cc):
    """A splitting homotopy for a chain complex from exact elimination:
    transfers onto cohomology (ker of the Laplacian)."""
    field = cc.field
    V = cc.space
    h = GradedMap(V, V, -1)
    for deg in V.degrees():
        tdeg = deg + 1
        B = cc.d.block(deg)  # V^deg -> V^{deg+1}
        if not B or not B[0] or V.dim(tdeg) == 0:
            continue
        piv_cols = linalg.column_space_pivots(field, B)
        if not piv_cols:
            continue
        im_cols = [[row[j] for j in piv_cols] for row in B]  # basis of im d
        # complement of im d in V^{deg+1} by standard vectors
        cols_list = [[r[j] for r in im_cols] for j in range(len(piv_cols))]
        comp = linalg.complement_pivots(field, cols_list, V.dim(tdeg))
        n_t = V.dim(tdeg)
        Mcols = cols_list + [
            [field.one if r == c else field.zero for r in range(n_t)] for c in comp
        ]
        Minv = linalg.inverse(field, linalg.transpose(Mcols))
        # h(B e_j) = e_j for pivot columns, h = 0 on the complement
        for r in range(n_t):
            for a, j in enumerate(piv_cols):
                coeff = Minv[a][r]
                if not field.is_zero(coeff):
                    cur = h.blocks[tdeg][j][r]
                    h.blocks[tdeg][j][r] = cur + coeff
    return Splitting(V, cc.d, h)


def splitting_to_retract(split):
    """Retract of (V, d) onto the harmonic space ker(d h + h d)."""
    field = split.field
    V = split.space
    lap = split.laplacian()
    kernels = split.harmonic_space_basis()
    dims = {deg: len(kernels[deg]) for deg in V.degrees() if kernels[deg]}
    labels = {deg: ["h%d_%d" % (deg, t) for t in range(n)] for deg, n in dims.items()}
    Hsp = GradedSpace(dims, labels, field)
    i = GradedMap(Hsp, V, 0)
    p = GradedMap(V, Hsp, 0)
    for deg in Hsp.degrees():
        K = linalg.transpose(kernels[deg])  # columns = kernel basis
        i.blocks[deg] = K
        n = V.dim(deg)
        ImLap = linalg.mat_sub(linalg.identity(field, n), lap.block(deg))
        X = linalg.solve_matrix(field, K, ImLap)
        if X is None:
            raise ValueError("projection onto harmonics failed")
        p.blocks[deg] = X
    # induced differential on H (zero when ker(Lap) <= ker d, the usual case)
    dH = p @ split.d @ i
    small = ChainComplex(Hsp, dH, check=True)
    big = ChainComplex(V, split.d, check=False)
    return RetractContext(small, big, i, p, h=split.h)


class Gauge:
    """eta with eta^2 = 0 on (V, d); yields a Green operator and a
    splitting homotopy eta G."""

    def __init__(self, space, d, eta, check=True):
        self.space = space
        self.d = d
        self.eta = eta
        self.field = space.field
        if check and not (eta @ eta).is_zero():
            raise ValueError("eta^2 != 0")

    def day_laplacian(self):
        return self.d @ self.eta + self.eta @ self.d

    def green_operator(self):
        """G: inverse of [d, eta] on its image, zero on its kernel.
        Requires V = ker + im (checked)."""
        field = self.field
        A = self.day_laplacian()
        G = GradedMap(self.space, self.space, 0)
        for deg in self.space.degrees():
            M = A.block(deg)
            n = self.space.dim(deg)
            if n == 0:
                continue
            ker = linalg.kernel_basis(field, M, n)
            piv = linalg.column_space_pivots(field, M)
            im_cols = [[M[r][j] for r in range(n)] for j in piv]
            basis_cols = im_cols + ker
            if linalg.rank(field, basis_cols) != n:
                raise ValueError("gauge Laplacian kernel meets its image")
            Bmat = linalg.transpose(basis_cols)  # columns = (im | ker) basis
            Binv = linalg.inverse(field, Bmat)
            # G on the basis: an image vector v maps to the unique preimage
            # of v under A that lies in im A; zero on the kernel part
            r_im = len(piv)
            pre = []
            for a in range(r_im):
                x = linalg.solve(field, M, im_cols[a])
                coords = linalg.mat_vec(field, Binv, x)
                for t in range(r_im, n):
                    coords[t] = field.zero
                pre.append(linalg.mat_vec(field, Bmat, coords))
            Gcols = pre + [[field.zero] * n for _ in ker]
            Gmat = linalg.mat_mul(field, linalg.transpose(Gcols), Binv)
            G.blocks[deg] = Gmat
        return G

    def splitting(self):
        G = self.green_operator()
        h = self.eta @ G
        return Splitting(self.space, self.d, h)


# --------------------------------------------------------- word transfer

class TransferResult:
    def __init__(self, small, inclusion, projection, context):
        self.small = small  # transferred LInftyAlgebra
        self.inclusion = inclusion  # LInftyMorphism small -> big
        self.projection = projection  # LInftyMorphism big -> small
        self.context = context


def homotopy_transfer(alg, ctx, arity_out=3, max_word_len=None):
    """Transfer the structure of `alg` along a retract of its underlying
    complex (big side must be (alg.space, l_1))."""
    field = alg.field
    Vs = alg.shifted_space
    Ws = ctx.small.space.shifted(1)
    N = max_word_len if max_word_len is not None else arity_out
    dv = W.enumerate_words(Vs, N)
    dw = W.enumerate_words(Ws, N)
    degV = Vs.degree_of
    degW = Ws.degree_of

    q1 = alg.sops.get(1)
    Q1V = (
        W.coderivation(field, {1: q1}, dv, degV) if q1 is not None else W.WordMap(field)
    )
    dW_op = _map_to_op(ctx.small.d, Ws)
    Q1W = (
        W.coderivation(field, {1: dW_op}, dw, degW)
        if not ctx.small.d.is_zero()
        else W.WordMap(field)
    )
    higher = {k: op for k, op in alg.sops.items() if k >= 2}
    mu = W.coderivation(field, higher, dv, degV)

    i_s = ctx.i.shifted(1, Ws, Vs)
    p_s = ctx.p.shifted(1, Vs, Ws)
    h_s = ctx.h.shifted(1, Vs, Vs)
    ip = i_s @ p_s

    def one(m):
        def f(idx):
            return m.apply({idx: field.one})

        return f

    Si = W.word_power(field, one(i_s), dw, degW, degV)
    Sp = W.word_power(field, one(p_s), dv, degV, degW)
    Sh = W.symmetrized_homotopy(field, one(h_s), one(ip), dv, degV)

    pr = hpl_perturb(field, Q1W, Q1V, Si, Sp, Sh, mu)

    sops = _extract_ops(field, pr.d_small, Ws, arity_out)
    small = LInftyAlgebra(ctx.small.space, sops)
    inc = LInftyMorphism(small, alg, _extract_morphism(field, pr.i, Ws, Vs, arity_out))
    prj = LInftyMorphism(alg, small, _extract_morphism(field, pr.p, Vs, Ws, arity_out))
    return TransferResult(small, inc, prj, ctx)


def _map_to_op(gmap, shifted_space):
    """Arity-1 graded map (degree +1 on the unshifted space) as a shifted
    symmetric operation."""
    field = gmap.field
    op = MultiLinearOp(shifted_space, shifted_space, 1, 1, "sym")
    src = gmap.source
    for idx in range(src.total_dim):
        v = gmap.apply({idx: field.one})
        for o, c in v.items():
            op.add_entry((idx,), o, c)
    return op


def _extract_ops(field, d_word, shifted_space, arity_out):
    out = {}
    for (w_in), col in d_word.cols.items():
        k = len(w_in)
        if k > arity_out:
            continue
        for w_out, c in col.items():
            if len(w_out) != 1:
                continue
            op = out.setdefault(
                k, MultiLinearOp(shifted_space, shifted_space, k, 1, "sym")
            )
            op.add_entry(w_in, w_out[0], c)
    return {k: op for k, op in out.items() if not op.is_zero()}


def _extract_morphism(field, word_map, src_shifted, tgt_shifted, arity_out):
    comps = {}
    for w_in, col in word_map.cols.items():
        k = len(w_in)
        if k > arity_out:
            continue
        for w_out, c in col.items():
            if len(w_out) != 1:
                continue
            f = comps.setdefault(
                k, MultiLinearOp(src_shifted, tgt_shifted, k, 0, "sym")
            )
            f.add_entry(w_in, w_out[0], c)
    return {k: f for k, f in comps.items() if not f.is_zero()}


def minimal_model(alg, arity_out=3):
    """Transfer onto harmonic representatives of the cohomology of
    (L, l_1) via an elimination splitting."""
    cc = ChainComplex(alg.space, alg.twisted_differential({}), check=False)
    split = standard_splitting(cc)
    ctx = splitting_to_retract(split)
    return homotopy_transfer(alg, ctx, arity_out=arity_out)


# ------------------------------------------------- dgla tree recursion

def dgla_tree_transfer(alg, ctx, arity_out=3):
    """Independent route for dgla inputs: the binary-tree recursion
    theta_n = sum over splits q2(I_a, I_b), I_n = -h theta_n, with
    transferred operation p theta_n."""
    assert alg.max_arity <= 2, "tree recursion needs a dgla"
    field = alg.field
    Vs = alg.shifted_space
    Ws = ctx.small.space.shifted(1)
    degW = Ws.degree_of
    q2 = alg.sops.get(2)
    i_s = ctx.i.shifted(1, Ws, Vs)
    p_s = ctx.p.shifted(1, Vs, Ws)
    h_s = ctx.h.shifted(1, Vs, Vs)

    Icomp = {}  # word over W -> sparse vector over V[1]

    def I(word):
        if word in Icomp:
            return Icomp[word]
        n = len(word)
        if n == 1:
            v = i_s.apply({word[0]: field.one})
        else:
            v = _neg(field, h_s.apply(theta(word)))
        Icomp[word] = v
        return v

    def theta(word):
        n = len(word)
        out = {}
        if q2 is None:
            return out
        from itertools import combinations as combs

        for r in range(1, n):
            for positions in combs(range(1, n), r):
                Bpos = positions
                Apos = tuple(p for p in range(n) if p not in Bpos)
                # position 0 always in A: each unordered split counted once
                sgnA = W._select_sign(word, Apos, degW)
                A = tuple(word[p] for p in Apos)
                B = tuple(word[p] for p in Bpos)
                vA = I(A)
                vB = I(B)
                val = q2.evaluate([vA, vB])
                # sign from moving B-letters out is already in sgnA; the
                # q2 evaluation handles internal Koszul ordering
                for o, c in val.items():
                    out[o] = out.get(o, field.zero) + c * field.coerce(sgnA)
        return {k: v for k, v in out.items() if not field.is_zero(v)}

    ops = {}
    for k in range(2, arity_out + 1):
        op = MultiLinearOp(Ws, Ws, k, 1, "sym")
        for w in W.enumerate_words(Ws, k, k):
            val = p_s.apply(theta(w))
            for o, c in val.items():
                op.add_entry(w, o, c)
        if not op.is_zero():
            ops[k] = op
    return ops


def _neg(field, v):
    return {k: -c for k, c in v.items()}


# ------------------------------------------------- strong decomposition

class StrongDecomposition:
    def __init__(self, minimal, contractible_dims, morphism, source):
        self.minimal = minimal  # minimal LInftyAlgebra on H
        self.contractible_dims = contractible_dims
        self.morphism = morphism  # L-infinity iso (H x N) -> L
        self.source = source  # product algebra on H x N


def strong_decomposition(alg, arity_out=3):
    """Split L as (minimal model) x (linear contractible) through an
    L-infinity isomorphism, solved order by order."""
    field = alg.field
    cc = ChainComplex(alg.space, alg.twisted_differential({}), check=False)
    split = standard_splitting(cc)
    ctx = splitting_to_retract(split)
    tr = homotopy_transfer(alg, ctx, arity_out=arity_out)
    H = tr.small.space

    # source space: H x N with N = a complement of H carrying d
    lap = split.laplacian()
    Ndims = {}
    Ncols = {}
    for deg in alg.space.degrees():
        M = lap.block(deg)
        piv = linalg.column_space_pivots(field, M)
        cols = [[M[r][j] for r in range(alg.space.dim(deg))] for j in piv]
        if cols:
            Ndims[deg] = len(cols)
            Ncols[deg] = cols
    labels = {}
    dims = {}
    for deg in sorted(set(H.degrees()) | set(Ndims)):
        nH = H.dim(deg)
        nN = Ndims.get(deg, 0)
        dims[deg] = nH + nN
        labels[deg] = ["h%d_%d" % (deg, t) for t in range(nH)] + [
            "n%d_%d" % (deg, t) for t in range(nN)
        ]
    S = GradedSpace(dims, labels, field)

    # linear part of the iso: harmonics via i, N part via the image columns
    f1 = MultiLinearOp(S.shifted(1), alg.shifted_space, 1, 0, "sym")
    dS = GradedMap(S, S, 1)
    for deg in S.degrees():
        nH = H.dim(deg)
        for t in range(nH):
            src = S.index(deg, t)
            v = ctx.i.apply({H.index(deg, t): field.one})
            for o, c in v.items():
                f1.add_entry((src,), o, c)
        for t in range(Ndims.get(deg, 0)):
            src = S.index(deg, nH + t)
            col = Ncols[deg][t]
            for r, c in enumerate(col):
                if not field.is_zero(c):
                    f1.add_entry((src,), alg.space.index(deg, r), c)

    # differential on the source: transferred d on H (usually 0) plus the
    # restriction of d to N, expressed back in the N basis
    for deg in S.degrees():
        nH = H.dim(deg)
        # d on N part: d(N_col) lies in V; rewrite in H+N coordinates of S
        for t in range(Ndims.get(deg, 0)):
            src = S.index(deg, nH + t)
            v = ChainComplex(alg.space, split.d, check=False).d.apply(
                {alg.space.index(deg, r): c for r, c in enumerate(Ncols[deg][t])}
            )
            coords = _coords_in_f1(field, f1, S, alg.space, v, deg + 1)
            for o, c in coords.items():
                dS.set_entry(o, src, c)
    srcops = {1: _map_to_op(dS, S.shifted(1))}
    # higher operations: the minimal ones, living on the H part
    for k, op in tr.small.sops.items():
        new = MultiLinearOp(S.shifted(1), S.shifted(1), k, 1, "sym")
        for (w, o), c in op.entries.items():
            wS = tuple(S.index(H.degree_of(x), H.position_of(x)) for x in w)
            od = H.degree_of(o)
            new.add_entry(wS, S.index(od, H.position_of(o)), c)
        srcops[k] = new
    source = LInftyAlgebra(S, {k: v for k, v in srcops.items() if not v.is_zero()})

    comps = _solve_morphism_components(source, alg, f1, arity_out)
    phi = LInftyMorphism(source, alg, comps)
    return StrongDecomposition(tr.small, Ndims, phi, source)


def _coords_in_f1(field, f1, S, V, v, deg):
    """Solve f1(x) = v within a single degree."""
    idxs = S.indices_of_degree(deg)
    vidx = V.indices_of_degree(deg)
    cols = []
    for s in idxs:
        val = f1.eval_basis((s,))
        cols.append([val.get(t, field.zero) for t in vidx])
    A = linalg.transpose(cols)
    b = [v.get(t, field.zero) for t in vidx]
    x = linalg.solve(field, A, b)
    if x is None:
        raise ValueError("vector not in the linear image")
    return {s: c for s, c in zip(idxs, x) if not field.is_zero(c)}


def _solve_morphism_components(source, target, f1, arity_out):
    """Order-by-order solve of the morphism equation with prescribed
    linear part f1."""
    field = source.field
    Ss = source.shifted_space
    Ts = target.shifted_space
    comps = {1: f1}
    for k in range(2, arity_out + 1):
        comps[k] = _solve_arity(source, target, comps, k)
    return {k: f for k, f in comps.items() if not f.is_zero()}


def _solve_arity(source, target, comps, k):
    """Find f_k so that the morphism defect vanishes on words of length k."""
    field = source.field
    Ss = source.shifted_space
    Ts = target.shifted_space
    ws = W.enumerate_words(Ss, k)
    wt = W.enumerate_words(Ts, k)
    degS = Ss.degree_of
    degT = Ts.degree_of

    # defect with f_k = 0
    partial = LInftyMorphism(source, target, {a: f for a, f in comps.items() if a < k})
    F = W.morphism_lift(field, partial.components, ws, degS)
    Qs = W.coderivation(field, source.sops, ws, degS)
    Qt = W.coderivation(field, target.sops, wt, degT)
    D = (Qt @ F) - (F @ Qs)

    # unknown f_k contributes  q1_t f_k(w) - f_k(Q1_s-part of w)  on
    # length-k words; assemble one global linear system
    kwords = [w for w in ws if len(w) == k]
    unknown_index = {}
    cells = []  # (word, output index)
    for w in kwords:
        wdeg = W.word_degree(w, degS)
        for o in range(Ts.total_dim):
            if degT(o) == wdeg:
                unknown_index[(w, o)] = len(cells)
                cells.append((w, o))
    nunk = len(cells)
    rows = []
    rhs = []
    q1t = target.sops.get(1)
    Q1s = W.coderivation(
        field, {1: source.sops[1]} if 1 in source.sops else {}, kwords, degS
    ) if 1 in source.sops else None

    for w in kwords:
        dcol = D.cols.get(w, {})
        # outputs live in length-1 words of degree wdeg+1
        wdeg = W.word_degree(w, degS)
        for o in range(Ts.total_dim):
            if degT(o) != wdeg + 1:
                continue
            row = [field.zero] * nunk
            # q1_t f_k(w): sum over e with q1(e) having o-component
            if q1t is not None:
                for (win, oo), c in q1t.entries.items():
                    if oo == o:
                        key = (w, win[0])
                        if key in unknown_index:
                            row[unknown_index[key]] = row[unknown_index[key]] + c
            # - f_k(Q1_s w)
            if Q1s is not None:
                col = Q1s.cols.get(w, {})
                for w2, c in col.items():
                    if len(w2) == k:
                        key = (w2, o)
                        if key in unknown_index:
                            row[unknown_index[key]] = row[unknown_index[key]] - c
            b = dcol.get((o,), field.zero)
            rows.append(row)
            rhs.append(-b)
    if not cells:
        return MultiLinearOp(Ss, Ts, k, 0, "sym")
    sol = linalg.solve(field, rows, rhs)
    if sol is None:
        raise ValueError("no exact solution at arity %d" % k)
    f = MultiLinearOp(Ss, Ts, k, 0, "sym")
    for (w, o), t in unknown_index.items():
        if not field.is_zero(sol[t]):
            f.add_entry(w, o, sol[t])
    return f
