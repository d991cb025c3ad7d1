import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bismutlab import exact
from bismutlab.uea import (AlgebraMismatch, OrderExceeded, UEAElement, cosymbol, graded_order,
                           heisenberg_algebra, heisenberg_order, su2_algebra)

GOLDEN = Path(__file__).parent / "golden"
H = heisenberg_algebra(1)
SU2 = su2_algebra()


def gen(alg, name, dim=1, coeff=None, degrees=None):
    return UEAElement.generator(alg, name, dim, coeff, degrees)


def const(alg, value, dim=1):
    return UEAElement.scalar_matrix(alg, exact.smul(value, exact.eye(dim)))


def test_heisenberg_commutator():
    Q, P, T = (gen(H, n) for n in "QPT")
    assert Q * P - P * Q == T
    assert T * Q - Q * T == UEAElement(H, 1)


def test_square_of_sum_normal_form():
    Q, P, T = (gen(H, n) for n in "QPT")
    lhs = (Q + P) * (Q + P)
    assert lhs == Q * Q + (P * Q) * 2 + T + P * P
    # PBW order is (weight, declaration index): Q < P < T
    assert set(lhs.terms) == {(0, 0), (0, 1), (1, 1), (2,)}
    assert lhs.terms[(0, 1)] == exact.smul(2, exact.eye(1))
    assert lhs.terms[(2,)] == exact.smul(-1, exact.eye(1))


def test_heisenberg_orders():
    Q, P, T = (gen(H, n) for n in "QPT")
    assert heisenberg_order(Q * P * T) == 4
    assert heisenberg_order(const(H, 3)) == 0
    c = exact.from_rows([[0, -1], [1, 0]])
    lap = -(gen(H, "Q", 2) * gen(H, "Q", 2)) - gen(H, "P", 2) * gen(H, "P", 2) + gen(H, "T", 2, c)
    assert heisenberg_order(lap) == 2
    assert heisenberg_order(UEAElement(H, 1)) == -math.inf


def _fiber_op(entries, dim=2):
    return exact.from_dict(entries, (dim, dim))


def test_graded_orders():
    deg = (0, 1)
    eps_T = UEAElement(H, 2, {(2,): _fiber_op({(1, 0): 1})}, deg)
    iota_c = UEAElement(H, 2, {(): _fiber_op({(0, 1): 1})}, deg)
    cQ = UEAElement(H, 2, {(0,): exact.eye(2)}, deg)
    assert graded_order(eps_T) == 1
    assert graded_order(iota_c) == 1
    assert graded_order(cQ) == 1


def test_cosymbol_filters_terms():
    c = exact.from_rows([[0, -1], [1, 0]])
    Q, P = gen(H, "Q", 2), gen(H, "P", 2)
    lap = -(Q * Q) - P * P + gen(H, "T", 2, c)
    assert cosymbol(lap + Q, 2) == lap
    assert cosymbol(UEAElement(H, 2), 2).is_zero()
    with pytest.raises(OrderExceeded):
        cosymbol(lap, 1)


def test_graded_cosymbol_drops_degree_raising_zeroth_order():
    deg = (0, 1)
    kept = UEAElement(H, 2, {(2,): _fiber_op({(1, 0): 1}), (): _fiber_op({(0, 1): 1})}, deg)
    dropped = UEAElement(H, 2, {(): _fiber_op({(1, 0): 1})}, deg)  # order 0, raises degree
    assert graded_order(dropped) == -1
    assert cosymbol(kept + dropped, 1, graded=True) == kept


def test_algebra_mismatch():
    with pytest.raises(AlgebraMismatch):
        gen(H, "Q") * gen(SU2, "X")
    with pytest.raises(AlgebraMismatch):
        gen(H, "Z")


def test_jacobi_and_weights():
    assert H.jacobi_defect() == []
    assert SU2.jacobi_defect() == []
    assert heisenberg_algebra(2).jacobi_defect() == []
    with pytest.raises(ValueError):
        type(H)(("A", "B", "C"), (1, 1, 1), {(0, 1): {2: 1}})  # wrong weight


coef = st.integers(-2, 2)


def elements(alg):
    words = st.lists(st.sampled_from(alg.names), max_size=3)
    terms = st.lists(st.tuples(coef, words), min_size=1, max_size=3)

    def build(ts):
        out = UEAElement(alg, 1)
        for c, w in ts:
            term = const(alg, c)
            for name in w:
                term = term * gen(alg, name)
            out = out + term
        return out

    return terms.map(build)


@given(elements(H), elements(H), elements(H))
def test_associativity_heisenberg(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(elements(SU2), elements(SU2), elements(SU2))
def test_associativity_su2(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(elements(H), elements(H))
def test_cosymbol_is_multiplicative(x, y):
    ox, oy = heisenberg_order(x), heisenberg_order(y)
    if ox == -math.inf or oy == -math.inf:
        return
    prod = cosymbol(x, ox) * cosymbol(y, oy)
    if prod.is_zero():
        return
    assert heisenberg_order(x * y) == ox + oy
    assert cosymbol(x * y, ox + oy) == prod


def test_render_golden():
    Q, P, T = (gen(H, n, 2) for n in "QPT")
    c = exact.from_rows([[0, -1], [1, 0]])
    x = (Q + P) * (Q + P) * exact.from_rows([[1, 0], [0, -1]]) + gen(H, "T", 2, c) * exact.smul(0.5j, exact.eye(2))
    assert x.render() + "\n" == (GOLDEN / "uea_render.txt").read_text()
