"""Graded symmetric word spaces over a (shifted) graded space.

A word is a sorted tuple of basis indices; words containing a repeated
generator of odd degree are zero and never appear as keys.  Linear maps
between word spaces are column-sparse dicts.  This is the engine behind
structure validation (coderivation squares) and homotopy transfer.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement, permutations
from fractions import Fraction

from .multilinear import koszul_sort, repeat_kills


def canon_word(idxs, deg_of):
    """Sort a tuple into a canonical word; (word, koszul sign) or (None, 0)."""
    word, sign = koszul_sort(idxs, deg_of)
    if repeat_kills(word, deg_of):
        return None, 0
    return word, sign


def word_degree(word, deg_of):
    return sum(deg_of(i) for i in word)


def enumerate_words(space, max_len, min_len=1):
    """All nonzero words of length min_len..max_len, sorted by (length,
    lexicographic)."""
    deg_of = space.degree_of
    out = []
    idxs = list(range(space.total_dim))
    for n in range(min_len, max_len + 1):
        for w in combinations_with_replacement(idxs, n):
            if not repeat_kills(w, deg_of):
                out.append(w)
    return out


class WordMap:
    """Column-sparse linear map between word bases."""

    def __init__(self, field, cols=None):
        self.field = field
        self.cols = {}
        if cols:
            for w, col in cols.items():
                c = {k: v for k, v in col.items() if not field.is_zero(v)}
                if c:
                    self.cols[w] = c

    def add_to(self, w_in, w_out, c):
        if self.field.is_zero(c):
            return
        col = self.cols.setdefault(w_in, {})
        new = col.get(w_out, self.field.zero) + c
        if self.field.is_zero(new):
            col.pop(w_out, None)
            if not col:
                del self.cols[w_in]
        else:
            col[w_out] = new

    def apply(self, vec):
        field = self.field
        out = {}
        for w, c in vec.items():
            col = self.cols.get(w)
            if col is None:
                continue
            for wo, a in col.items():
                out[wo] = out.get(wo, field.zero) + a * c
        return {k: v for k, v in out.items() if not field.is_zero(v)}

    def column(self, w):
        return dict(self.cols.get(w, {}))

    def compose(self, other):
        """self after other."""
        out = WordMap(self.field)
        for w, col in other.cols.items():
            acc = self.apply(col)
            if acc:
                out.cols[w] = acc
        return out

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        out = WordMap(self.field)
        for w, col in self.cols.items():
            for wo, c in col.items():
                out.add_to(w, wo, c)
        for w, col in other.cols.items():
            for wo, c in col.items():
                out.add_to(w, wo, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-self.field.one)

    def __neg__(self):
        return self.scale(-self.field.one)

    def scale(self, c):
        out = WordMap(self.field)
        for w, col in self.cols.items():
            for wo, x in col.items():
                out.add_to(w, wo, c * x)
        return out

    def is_zero(self):
        z = self.field.is_zero
        return all(z(c) for col in self.cols.values() for c in col.values())

    def norm(self):
        m = self.field.mag(self.field.zero)
        for col in self.cols.values():
            for c in col.values():
                a = self.field.mag(c)
                if a > m:
                    m = a
        return m

    @classmethod
    def identity(cls, field, words):
        out = cls(field)
        for w in words:
            out.cols[w] = {w: field.one}
        return out

    def restrict_outputs(self, keep):
        """Keep only output words for which keep(word) is true."""
        out = WordMap(self.field)
        for w, col in self.cols.items():
            c = {wo: v for wo, v in col.items() if keep(wo)}
            if c:
                out.cols[w] = c
        return out

    def eq(self, other):
        return (self - other).is_zero()


def _select_sign(word, positions, deg_of):
    """Koszul sign of moving the selected positions to the front (order
    preserved within each group)."""
    sel = set(positions)
    sign = 1
    unsel_par = 0  # parity of degree mass of unselected letters seen so far
    for p, idx in enumerate(word):
        if p in sel:
            if (deg_of(idx) % 2) and (unsel_par % 2):
                sign = -sign
        else:
            unsel_par += deg_of(idx) % 2
    return sign


def coderivation(field, ops, words, deg_of):
    """Extend a family {k: symmetric op of degree +1} to a coderivation on
    the span of `words`.  ops[k].eval_basis gives the corolla values."""
    Q = WordMap(field)
    ks = sorted(ops.keys())
    for w in words:
        n = len(w)
        for k in ks:
            if k > n:
                continue
            op = ops[k]
            for positions in combinations(range(n), k):
                sel = tuple(w[p] for p in positions)
                rest = tuple(w[p] for p in range(n) if p not in positions)
                sgn = _select_sign(w, positions, deg_of)
                val = op.eval_basis(sel)
                for o, c in val.items():
                    wo, s2 = canon_word((o,) + rest, deg_of)
                    if wo is None:
                        continue
                    Q.add_to(w, wo, c * field.coerce(sgn * s2))
    return Q


def _perm_sign(word, perm, deg_of):
    """Koszul sign of rearranging word into (word[perm[0]], word[perm[1]], ...)."""
    sign = 1
    n = len(perm)
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b]:
                if (deg_of(word[perm[a]]) % 2) and (deg_of(word[perm[b]]) % 2):
                    sign = -sign
    return sign


def _expand_product(field, vectors, deg_of):
    """Symmetric product of sparse vectors -> sparse word vector."""
    out = {}

    def rec(i, idxs, coeff):
        if i == len(vectors):
            w, s = canon_word(tuple(idxs), deg_of)
            if w is None:
                return
            c = coeff * field.coerce(s)
            out[w] = out.get(w, field.zero) + c
            return
        for idx, c in vectors[i].items():
            rec(i + 1, idxs + [idx], coeff * c)

    rec(0, [], field.one)
    return {k: v for k, v in out.items() if not field.is_zero(v)}


def word_power(field, apply_one, words, deg_of, deg_out=None):
    """S(f): apply a degree-0 linear map to every letter of every word.
    apply_one: basis index -> sparse vector (target indices, graded by
    deg_out when the map changes spaces)."""
    if deg_out is None:
        deg_out = deg_of
    out = WordMap(field)
    cache = {}
    for w in words:
        vecs = []
        for idx in w:
            if idx not in cache:
                cache[idx] = apply_one(idx)
            vecs.append(cache[idx])
        col = _expand_product(field, vecs, deg_out)
        if col:
            out.cols[w] = col
    return out


def symmetrized_homotopy(field, apply_h, apply_ip, words, deg_of):
    """The standard side-condition homotopy on word spaces:
    S(h) = sym of sum_k (ip)^{k-1} (x) h (x) id^{n-k}, normalized by 1/n!."""
    out = WordMap(field)
    hc, ipc = {}, {}

    def H(idx):
        if idx not in hc:
            hc[idx] = apply_h(idx)
        return hc[idx]

    def IP(idx):
        if idx not in ipc:
            ipc[idx] = apply_ip(idx)
        return ipc[idx]

    for w in words:
        n = len(w)
        inv_fact = field.coerce(Fraction(1, _factorial(n)))
        acc = {}
        for perm in permutations(range(n)):
            ps = _perm_sign(w, perm, deg_of)
            arranged = [w[p] for p in perm]
            for k in range(1, n + 1):
                vecs = []
                ok = True
                sgn = ps
                # h has degree -1: moving it past the first k-1 (ip x) slots
                # contributes no sign because ip preserves each letter's
                # degree and h acts in place, applied slotwise left to right
                for j, idx in enumerate(arranged):
                    if j < k - 1:
                        v = IP(idx)
                    elif j == k - 1:
                        v = H(idx)
                        # Koszul: h (odd) passes the letters before it
                        par = sum(deg_of(arranged[t]) for t in range(j)) % 2
                        if par:
                            sgn = -sgn
                    else:
                        v = {idx: field.one}
                    if not v:
                        ok = False
                        break
                    vecs.append(v)
                if not ok:
                    continue
                col = _expand_product(field, vecs, deg_of)
                for wo, c in col.items():
                    acc[wo] = acc.get(wo, field.zero) + c * field.coerce(sgn)
        col = {wo: c * inv_fact for wo, c in acc.items() if not field.is_zero(c)}
        if col:
            out.cols[w] = col
    return out


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _set_partitions(items):
    """All set partitions of a list, blocks ordered by smallest element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        # first joins an existing block
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        # first alone
        yield [[first]] + part


def morphism_lift(field, components, words, deg_of, deg_out=None):
    """Lift morphism components {k: symmetric degree-0 op} to the induced
    map of word spaces (sum over unordered set partitions)."""
    if deg_out is None:
        deg_out = deg_of
    F = WordMap(field)
    for w in words:
        n = len(w)
        acc = {}
        for part in _set_partitions(list(range(n))):
            if any(len(b) not in components for b in part):
                continue
            blocks = [sorted(b) for b in part]
            blocks.sort(key=lambda b: b[0])
            order = [p for b in blocks for p in b]
            sgn = _perm_sign(w, tuple(order), deg_of)
            vecs = []
            ok = True
            for b in blocks:
                val = components[len(b)].eval_basis(tuple(w[p] for p in b))
                if not val:
                    ok = False
                    break
                vecs.append(val)
            if not ok:
                continue
            col = _expand_product(field, vecs, deg_out)
            for wo, c in col.items():
                acc[wo] = acc.get(wo, field.zero) + c * field.coerce(sgn)
        col = {wo: c for wo, c in acc.items() if not field.is_zero(c)}
        if col:
            F.cols[w] = col
    return F


def first_violation(field, M, words):
    """First nonzero column of M scanning `words` in order; returns
    (input word, output word, coefficient) or None."""
    for w in words:
        col = M.cols.get(w)
        if not col:
            continue
        live = {wo: c for wo, c in col.items() if not field.is_zero(c)}
        if live:
            wo = min(live)
            return (w, wo, live[wo])
    return None
