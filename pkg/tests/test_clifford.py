from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bismutlab import exact
from bismutlab.clifford import (InvalidRank, build_bimodule, build_clifford, build_exterior, graded_tensor,
                                Graded)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def _minus_two_delta(a, b, dim):
    return exact.smul(-2 if a == b else 0, exact.eye(dim))


@pytest.mark.parametrize("n", range(1, 7))
def test_clifford_relations_exact(n):
    cl = build_clifford(n)
    assert cl.dim == 2 ** ((n + 1) // 2)
    for a, ga in enumerate(cl.generators):
        assert exact.is_zero(cl.grading * ga + ga * cl.grading)
        assert exact.adjoint(ga) == -ga
        for b, gb in enumerate(cl.generators):
            assert exact.anticomm(ga, gb) == _minus_two_delta(a, b, cl.dim)


def test_clifford_rank_one_squares_to_minus_one():
    (g,) = build_clifford(1).generators
    assert g.shape == (2, 2)
    assert g * g == -exact.eye(2)


def test_clifford_rank_two_volume_element():
    g1, g2 = build_clifford(2).generators
    v = g1 * g2
    assert v * v == -exact.eye(2)
    assert exact.adjoint(v) == -v
    ev = sorted(complex(z).imag for z in __import__("numpy").linalg.eigvals(exact.to_numpy(v)))
    assert ev == pytest.approx([-1, 1])


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_invalid_rank(bad):
    for build in (build_clifford, build_exterior, build_bimodule):
        with pytest.raises(InvalidRank):
            build(bad)


@pytest.mark.parametrize("n", range(1, 7))
def test_exterior_canonical_anticommutation(n):
    ext = build_exterior(n)
    I = exact.eye(ext.dim)
    for a in range(n):
        for b in range(n):
            assert exact.anticomm(ext.wedge[a], ext.contract[b]) == (I if a == b else exact.zeros(ext.dim))
            assert exact.is_zero(exact.anticomm(ext.wedge[a], ext.wedge[b]))
            assert exact.is_zero(exact.anticomm(ext.contract[a], ext.contract[b]))


def test_exterior_rank_one_shift_matrices():
    ext = build_exterior(1)
    e, i = ext.wedge[0], ext.contract[0]
    assert e == exact.from_rows([[0, 0], [1, 0]])
    assert i == exact.from_rows([[0, 1], [0, 0]])
    assert e * i * e == e


@pytest.mark.parametrize("u, square", [(1, -1), (0, 0), (Fraction(1, 3), Fraction(-1, 3))])
def test_scaled_clifford_square(u, square):
    ext = build_exterior(2)
    for a in range(2):
        c = ext.clifford_u(a, u)
        assert c * c == exact.smul(square, exact.eye(4))


@given(st.lists(rationals, min_size=3, max_size=3))
def test_scaled_clifford_square_any_u(vals):
    u = vals[0]
    ext = build_exterior(3)
    c = ext.clifford_u(1, u)
    assert c * c == exact.smul(-u, exact.eye(8))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bimodule_squares_and_commutation(n):
    bim = build_bimodule(n)
    I = exact.eye(bim.exterior.dim)
    for a in range(n):
        assert bim.left[a] * bim.left[a] == -I
        assert bim.right[a] * bim.right[a] == -I
        for b in range(n):
            # left and right actions commute (the right action is minus right multiplication)
            assert exact.is_zero(exact.comm(bim.left[a], bim.right[b]))
            if a != b:
                assert exact.is_zero(exact.anticomm(bim.right[a], bim.right[b]))


def test_bimodule_rank_one_right_square():
    (r,) = build_bimodule(1).right
    assert r * r == -exact.eye(2)


def test_bimodule_combination_vanishes_on_odd_forms():
    bim = build_bimodule(2)
    L1, L2 = bim.left
    R1, R2 = bim.right
    M = L1 * L2 + R2 * R1
    degs = bim.exterior.degrees()
    odd = [k for k, d in enumerate(degs) if d % 2]
    even = [k for k, d in enumerate(degs) if d % 2 == 0]
    assert exact.is_zero(exact.submatrix(M, range(4), odd))
    assert not exact.is_zero(exact.submatrix(M, range(4), even))


@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4))
def test_bimodule_linearity(phi, psi):
    bim = build_bimodule(4)
    I = exact.eye(16)
    norm = sum(x * x for x in phi)
    cl = sum((exact.smul(x, g) for x, g in zip(phi, bim.left)), exact.zeros(16))
    cr = sum((exact.smul(x, g) for x, g in zip(psi, bim.right)), exact.zeros(16))
    assert cl * cl == exact.smul(-norm, I)
    assert cr * cr == exact.smul(-sum(x * x for x in psi), I)
    assert exact.is_zero(exact.comm(cl, cr))


def test_graded_tensor_koszul_sign():
    cl = build_clifford(1)
    A = Graded(cl.generators[0], cl.grading)
    B = Graded(cl.generators[0], cl.grading)
    AL, BR = graded_tensor(A, B)
    assert AL.matrix * BR.matrix == -(BR.matrix * AL.matrix)
    Id = Graded(exact.eye(2), cl.grading)
    L, R = graded_tensor(Id, Id)
    assert L.matrix == exact.eye(4) and R.matrix == exact.eye(4)


def test_graded_tensor_clifford_with_exterior():
    cl = build_clifford(2)
    ext = build_exterior(1)
    gens = []
    for g in cl.generators:
        gens.append(graded_tensor(Graded(g, cl.grading), Graded(ext.wedge[0], ext.parity))[0].matrix)
    c_u = ext.clifford_u(0, 1)
    gens.append(graded_tensor(Graded(cl.generators[0], cl.grading), Graded(c_u, ext.parity))[1].matrix)
    I = exact.eye(4)
    for a, x in enumerate(gens):
        for b, y in enumerate(gens):
            assert exact.anticomm(x, y) == exact.smul(-2 if a == b else 0, I)


def test_graded_tensor_dimension_mismatch():
    with pytest.raises(ValueError):
        graded_tensor(Graded(exact.eye(2), exact.eye(3)), Graded(exact.eye(2), exact.eye(2)))
