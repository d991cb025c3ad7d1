import json
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from bismutlab import exact
from bismutlab.laurent import U, U_INV, LaurentMatrix, LaurentPoly, lift

rat = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(st.integers(-3, 3), rat, max_size=4).map(LaurentPoly)
small = st.lists(st.lists(st.tuples(rat, rat), min_size=2, max_size=2), min_size=2, max_size=2)


def mat(rows):
    return exact.from_rows([[exact.scalar(z) for z in r] for r in rows])


@given(polys, polys, polys)
def test_laurent_poly_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == LaurentPoly()


@given(polys, rat.filter(lambda x: x != 0))
def test_laurent_poly_evaluation_is_a_homomorphism(a, u):
    b = a * U + U_INV
    assert (a * b)(u) == a(u) * b(u)


def test_support_tracks_nonzero_coefficients():
    p = LaurentPoly({-1: 1, 0: 0, 2: Fraction(1, 2)})
    assert p.support == frozenset({-1, 2})
    assert (p - p).support == frozenset()


@given(small, small, small)
def test_laurent_matrix_finite_part(a, b, c):
    A, B, C = mat(a), mat(b), mat(c)
    L = lift(A) * U_INV + lift(B) + lift(C) * U
    assert L.finite_part() == B
    assert L.coeff(-1) == A and L.coeff(1) == C
    assert L.support <= {-1, 0, 1}


@given(small, small)
def test_laurent_matrix_product_collects_powers(a, b):
    A, B = mat(a), mat(b)
    L = (lift(A) * U_INV) * (lift(B) * U)
    assert L.support <= {0}
    assert L.finite_part() == A * B


@given(small)
def test_exact_json_round_trip(a):
    A = mat(a)
    assert exact.from_json(json.loads(json.dumps(exact.to_json(A)))) == A


@given(small, small)
def test_kron_mixed_product(a, b):
    A, B = mat(a), mat(b)
    assert exact.kron(A, B) * exact.kron(B, A) == exact.kron(A * B, B * A)


def test_complex_scalars_are_exact():
    z = exact.scalar(0.5 + 0.25j)
    assert exact.to_complex(z) == 0.5 + 0.25j
    assert exact.adjoint(exact.from_rows([[1j, 2], [0, 1]])) == exact.from_rows([[-1j, 0], [2, 1]])


def test_zero_laurent_matrix():
    z = LaurentMatrix.zero(3)
    assert z.support == frozenset()
    assert z.finite_part() == exact.zeros(3)
