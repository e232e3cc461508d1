"""Finite-dimensional homotopy Lie algebras.

Operations are stored in the shifted symmetric convention: a family of
graded symmetric operations q_k of degree +1 on L[1].  The antisymmetric
picture on L is available through the conversion helpers in
`multilinear`.  Structure validation squares the induced coderivation on
symmetric words up to a configurable length.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import GradedMap, ChainComplex, vec_clean, vec_add, vec_scale
from .multilinear import MultiLinearOp, to_shifted, to_unshifted
from . import words as W


class ValidationReport:
    def __init__(self, ok, witness=None, max_length=None):
        self.ok = ok
        self.witness = witness  # (input word, output word, coefficient)
        self.max_length = max_length

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok, words <= %s)" % self.max_length
        return "ValidationReport(FAIL at %r -> %r, coeff %r)" % self.witness


class LInftyAlgebra:
    def __init__(self, space, sops, check=False, n_check=3):
        """space: unshifted graded space; sops: {arity: symmetric degree +1
        operation on space.shifted(1)}."""
        self.space = space
        self.field = space.field
        self.shifted_space = space.shifted(1)
        self.sops = {k: op for k, op in sops.items() if not op.is_zero()}
        for k, op in self.sops.items():
            assert op.arity == k and op.degree == 1 and op.symmetry == "sym"
        if check:
            rep = self.validate(n_check)
            if not rep.ok:
                raise ValueError("structure maps fail Jacobi: %r" % rep)

    @classmethod
    def from_unshifted_ops(cls, space, ops, **kw):
        """ops: {k: antisymmetric arity-k operation of degree 2-k on L}."""
        ssp = space.shifted(1)
        sops = {k: to_shifted(op, ssp, ssp) for k, op in ops.items()}
        return cls(space, sops, **kw)

    @property
    def max_arity(self):
        return max(self.sops) if self.sops else 0

    def unshifted_op(self, k):
        if k not in self.sops:
            sym = "antisym" if k > 1 else "none"
            return MultiLinearOp(self.space, self.space, k, 2 - k, sym)
        return to_unshifted(self.sops[k], self.space, self.space)

    # ---------------------------------------------------------- validation

    def validate(self, n_check=3):
        """Check that the coderivation induced by the operations squares to
        zero on all words of length <= n_check."""
        sp = self.shifted_space
        if not self.sops:
            return ValidationReport(True, max_length=n_check)
        ws = W.enumerate_words(sp, n_check)
        Q = W.coderivation(self.field, self.sops, ws, sp.degree_of)
        Q2 = Q @ Q
        bad = W.first_violation(self.field, Q2, ws)
        if bad is None:
            return ValidationReport(True, max_length=n_check)
        return ValidationReport(False, witness=bad, max_length=n_check)

    # ------------------------------------------------------------- tower

    def _check_shifted_zero(self, x):
        for idx in x:
            if self.shifted_space.degree_of(idx) != 0:
                raise ValueError("element must be concentrated in degree 1")

    def mc_function(self, x):
        """F(x) = sum_k 1/k! l_k(x,...,x) for x of degree 1."""
        self._check_shifted_zero(x)
        field = self.field
        out = {}
        for k, op in self.sops.items():
            c = field.coerce(Fraction(1, W._factorial(k)))
            val = op.evaluate([x] * k)
            for o, v in val.items():
                out[o] = out.get(o, field.zero) + c * v
        return vec_clean(field, out)

    def mc_residual(self, x):
        from .graded import vec_norm

        return vec_norm(self.field, self.mc_function(x))

    def twisted_ops(self, b):
        """Operations of the algebra twisted by a degree-1 element b:
        l_k^b(...) = sum_j 1/j! l_{j+k}(b,...,b, ...)."""
        self._check_shifted_zero(b)
        field = self.field
        sp = self.shifted_space
        out = {}
        for k in range(1, self.max_arity + 1):
            acc = MultiLinearOp(sp, sp, k, 1, "sym")
            for m, op in self.sops.items():
                j = m - k
                if j < 0:
                    continue
                c = field.coerce(Fraction(1, W._factorial(j)))
                # b sits in shifted degree 0, so insertion needs no signs
                acc = acc + _partial_insert(op, b, j).scale(c)
            if not acc.is_zero():
                out[k] = acc
        return out

    def twist(self, b):
        """Twist by b; returns a Twist (curved unless b is Maurer-Cartan)."""
        curv = self.mc_function(b)
        ops = self.twisted_ops(b)
        return Twist(self, b, curv, ops)

    def twisted_differential(self, b):
        """l_1^b as a graded map of degree +1 on the unshifted space."""
        ops = self.twisted_ops(b)
        d = GradedMap(self.space, self.space, 1)
        op1 = ops.get(1)
        if op1 is not None:
            for (win, o), c in op1.entries.items():
                d.set_entry(o, win[0], c)
        return d

    def tangent_complex(self, mu, check_flat=True):
        tw = self.twist(mu)
        if check_flat and not tw.is_flat:
            raise ValueError("twist is curved: element is not Maurer-Cartan")
        return ChainComplex(self.space, self.twisted_differential(mu), check=False)

    def anchor(self, mu):
        """Infinitesimal gauge action at mu: the degree-0 block of the
        twisted differential, as {column index: sparse vector}."""
        d = self.twisted_differential(mu)
        out = {}
        for idx in self.space.indices_of_degree(0):
            out[idx] = d.apply({idx: self.field.one})
        return out

    def is_quasi_smooth(self, mu=None, window=(1, 2)):
        mu = mu or {}
        cc = self.tangent_complex(mu)
        ranks = cc.cohomology_ranks()
        lo, hi = window
        return all(r == 0 for d, r in ranks.items() if d < lo or d > hi)

    def analytic_bound(self):
        """(C, r): max-norm growth constant with ||l_k|| <= k! C^k and a
        radius r with C*r < 1.  Returns (0.0, inf) for abelian towers."""
        field = self.field
        C = 0.0
        for k, op in self.sops.items():
            nk = field.mag(field.zero) if op.is_zero() else op.norm()
            nk = float(nk) if not isinstance(nk, complex) else abs(nk)
            if field.name == "rational-complex":
                nk = nk ** 0.5  # mag is |.|^2 in that mode
            val = (nk / W._factorial(k)) ** (1.0 / k)
            C = max(C, val)
        if C == 0.0:
            return 0.0, float("inf")
        return C, 1.0 / (2.0 * C)

    def conjugate(self, g):
        """Transport the structure along an invertible degree-0 map g of
        the underlying space: l_k^g = g^{-1} l_k (g, ..., g)."""
        from . import linalg

        field = self.field
        sp = self.shifted_space
        ginv_blocks = {}
        for d in self.space.degrees():
            ginv_blocks[d] = linalg.inverse(field, g.block(d))
        ginv = GradedMap(self.space, self.space, 0, ginv_blocks)
        gs = g.shifted(1, sp, sp)
        ginvs = ginv.shifted(1, sp, sp)
        out = {}
        for k, op in self.sops.items():
            new = MultiLinearOp(sp, sp, k, 1, "sym")
            # l^g(e_i1..e_ik) = g^{-1} l(g e_i1, ..., g e_ik)
            ws = W.enumerate_words(sp, k, k)
            for w in ws:
                vecs = [gs.apply({i: field.one}) for i in w]
                val = op.evaluate(vecs)
                val = ginvs.apply(val)
                for o, c in val.items():
                    new.add_entry(w, o, c)
            if not new.is_zero():
                out[k] = new
        return LInftyAlgebra(self.space, out)


def _partial_insert(op, b, j):
    """New op of arity op.arity - j: first j slots filled with b (shifted
    degree 0, no signs)."""
    sp = op.source
    field = op.field
    k = op.arity - j
    out = MultiLinearOp(sp, op.target, k, op.degree, "sym")
    if j == 0:
        out.entries = dict(op.entries)
        return out
    ws = W.enumerate_words(sp, k, k)
    for w in ws:
        vecs = [b] * j + [{i: field.one} for i in w]
        val = op.evaluate(vecs)
        for o, c in val.items():
            out.add_entry(w, o, c)
    return out


class Twist:
    """Result of twisting by a degree-1 element.  Curved when the
    Maurer-Cartan value of the element is nonzero."""

    def __init__(self, base, element, curvature, ops):
        self.base = base
        self.element = element
        self.curvature = curvature
        self.ops = ops

    @property
    def is_flat(self):
        return all(self.base.field.is_zero(c) for c in self.curvature.values())

    def algebra(self, check_flat=True):
        if check_flat and not self.is_flat:
            raise ValueError("curved twist does not define a flat structure")
        return LInftyAlgebra(self.base.space, self.ops)

    def __repr__(self):
        return "Twist(flat=%s)" % self.is_flat


class LInftyMorphism:
    """Morphism given by symmetric degree-0 components f_k: S^k(L[1]) -> M[1]."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.field = source.field
        self.components = {k: f for k, f in components.items() if not f.is_zero()}
        for k, f in self.components.items():
            assert f.arity == k and f.degree == 0 and f.symmetry == "sym"

    @property
    def max_arity(self):
        return max(self.components) if self.components else 0

    def apply_point(self, mu):
        """Push a degree-1 element through: sum_k 1/k! f_k(mu,...,mu)."""
        field = self.field
        out = {}
        for k, f in self.components.items():
            c = field.coerce(Fraction(1, W._factorial(k)))
            for o, v in f.evaluate([mu] * k).items():
                out[o] = out.get(o, field.zero) + c * v
        return vec_clean(field, out)

    def tangent_at(self, mu):
        """Linearization at mu: x -> sum_j 1/j! f_{1+j}(x, mu, ..., mu)."""
        field = self.field

        def lin(x):
            out = {}
            for k, f in self.components.items():
                j = k - 1
                c = field.coerce(Fraction(1, W._factorial(j)))
                for o, v in f.evaluate([x] + [mu] * j).items():
                    out[o] = out.get(o, field.zero) + c * v
            return vec_clean(field, out)

        return lin

    def lift(self, max_len):
        sp = self.source.shifted_space
        tsp = self.target.shifted_space
        ws = W.enumerate_words(sp, max_len)
        return W.morphism_lift(self.field, self.components, ws, sp.degree_of, tsp.degree_of)

    def defect(self, n_check=3):
        """Word-level failure of the morphism equation, or None."""
        ssp = self.source.shifted_space
        tsp = self.target.shifted_space
        ws_s = W.enumerate_words(ssp, n_check)
        ws_t = W.enumerate_words(tsp, n_check)
        F = self.lift(n_check)
        Qs = W.coderivation(self.field, self.source.sops, ws_s, ssp.degree_of)
        Qt = W.coderivation(self.field, self.target.sops, ws_t, tsp.degree_of)
        D = (Qt @ F) - (F @ Qs)
        return W.first_violation(self.field, D, ws_s)

    def is_valid(self, n_check=3):
        return self.defect(n_check) is None

    def compose(self, other, max_arity=None):
        """self after other."""
        assert other.target is self.source or other.target.space.dims == self.source.space.dims
        if max_arity is None:
            max_arity = max(self.max_arity, other.max_arity, 1)
        field = self.field
        ssp = other.source.shifted_space
        tsp = self.target.shifted_space
        Fhat = other.lift(max_arity)
        comps = {}
        for k in range(1, max_arity + 1):
            comp = MultiLinearOp(ssp, tsp, k, 0, "sym")
            for w in W.enumerate_words(ssp, k, k):
                mid = Fhat.column(w)
                out = {}
                for wm, c in mid.items():
                    if len(wm) in self.components:
                        val = self.components[len(wm)].eval_basis(wm)
                        for o, v in val.items():
                            out[o] = out.get(o, field.zero) + c * v
                for o, v in out.items():
                    comp.add_entry(w, o, v)
            if not comp.is_zero():
                comps[k] = comp
        return LInftyMorphism(other.source, self.target, comps)

    def is_identity(self):
        if set(self.components) - {1} and any(
            not f.is_zero() for k, f in self.components.items() if k != 1
        ):
            return False
        f1 = self.components.get(1)
        if f1 is None:
            return self.source.space.total_dim == 0
        sp = self.source.shifted_space
        for i in range(sp.total_dim):
            val = f1.eval_basis((i,))
            if not (len(val) == 1 and i in val and self.field.eq(val[i], self.field.one)):
                return False
        return True

    def __repr__(self):
        return "LInftyMorphism(max arity %d)" % self.max_arity
