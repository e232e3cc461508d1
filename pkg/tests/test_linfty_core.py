from fractions import Fraction

import pytest

from homotopylie import GradedSpace, LInftyAlgebra, MultiLinearOp, to_shifted, to_unshifted
from homotopylie.multilinear import koszul_sort
from homotopylie.scalars import QQ


def F(*a):
    return Fraction(*a)


# ------------------------------------------------------------------ signs

def test_koszul_sort_signs():
    degs = {0: 1, 1: 1, 2: 2}  # two odd, one even

    def d(i):
        return degs[i]

    assert koszul_sort((1, 0), d) == ((0, 1), -1)  # odd past odd
    assert koszul_sort((2, 0), d) == ((0, 2), 1)  # even past odd
    assert koszul_sort((1, 0), d, antisym=True) == ((0, 1), 1)


# ------------------------------------------------------- gl2 as a Lie algebra

def gl2():
    """gl_2 in degree 0 with the commutator bracket."""
    V = GradedSpace({0: 4}, labels={0: ["E11", "E12", "E21", "E22"]})
    mats = [
        ((0, 0),),  # E11: positions of ones
        ((0, 1),),
        ((1, 0),),
        ((1, 1),),
    ]

    def mat(i):
        M = [[0, 0], [0, 0]]
        for (r, c) in mats[i]:
            M[r][c] = 1
        return M

    def comm(a, b):
        A, B = mat(a), mat(b)
        C = [
            [
                sum(A[i][k] * B[k][j] - B[i][k] * A[k][j] for k in range(2))
                for j in range(2)
            ]
            for i in range(2)
        ]
        return C

    basis_pos = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}
    l2 = MultiLinearOp(V, V, 2, 0, "antisym")
    for a in range(4):
        for b in range(a + 1, 4):
            C = comm(a, b)
            for (r, c), out in basis_pos.items():
                if C[r][c]:
                    l2.add_entry((a, b), out, F(C[r][c]))
    return LInftyAlgebra.from_unshifted_ops(V, {2: l2})


def test_gl2_validates():
    rep = gl2().validate(3)
    assert rep.ok


def test_gl2_perturbed_fails_at_length_3():
    alg = gl2()
    bad = dict(alg.sops)
    op = bad[2]
    op2 = MultiLinearOp(op.source, op.target, 2, 1, "sym")
    op2.entries = dict(op.entries)
    op2.add_entry((0, 1), 0, F(1))  # corrupt one structure constant
    rep = LInftyAlgebra(alg.space, {2: op2}).validate(3)
    assert not rep.ok
    win, wout, coeff = rep.witness
    assert len(win) == 3
    assert coeff != 0


# ------------------------------------------------- suspension round trip

def test_shift_round_trip():
    alg = gl2()
    l2 = alg.unshifted_op(2)
    q2 = to_shifted(l2, alg.shifted_space, alg.shifted_space)
    back = to_unshifted(q2, alg.space, alg.space)
    assert back.eq(l2)


# ------------------------------------- cubic section tower x1^3 - x1 x2

def cubic_tower():
    """Tower with F(x) = x1^3 - x1 x2 in matrix-free form: L^1 = k^2,
    L^2 = k, l2(e1,e2) = -f, l3(e1,e1,e1) = 6 f (shifted storage)."""
    V = GradedSpace({1: 2, 2: 1}, labels={1: ["x1", "x2"], 2: ["f"]})
    sp = V.shifted(1)
    q2 = MultiLinearOp(sp, sp, 2, 1, "sym")
    q2.add_entry((0, 1), 2, F(-1))
    q3 = MultiLinearOp(sp, sp, 3, 1, "sym")
    q3.add_entry((0, 0, 0), 2, F(6))
    return LInftyAlgebra(V, {2: q2, 3: q3})


def test_cubic_tower_validates():
    assert cubic_tower().validate(4).ok


def test_mc_function_matches_polynomial():
    alg = cubic_tower()
    for a, b in [(F(2), F(3)), (F(-1), F(5)), (F(1, 2), F(1, 3))]:
        val = alg.mc_function({0: a, 1: b})
        expected = a**3 - a * b
        assert val.get(2, F(0)) == expected


def test_twisted_differential_is_jacobian():
    alg = cubic_tower()
    a, b = F(2), F(-3)
    d = alg.twisted_differential({0: a, 1: b})
    # gradient of x1^3 - x1 x2
    assert d.entry(2, 0) == 3 * a**2 - b
    assert d.entry(2, 1) == -a


def test_twist_flatness():
    alg = cubic_tower()
    assert alg.twist({0: F(2), 1: F(4)}).is_flat  # on the branch x2 = x1^2
    assert not alg.twist({0: F(2), 1: F(1)}).is_flat


def test_analytic_bound():
    C, r = cubic_tower().analytic_bound()
    assert C > 0 and C * r < 1
    C0, r0 = LInftyAlgebra(GradedSpace({1: 2}), {}).analytic_bound()
    assert C0 == 0.0 and r0 == float("inf")
