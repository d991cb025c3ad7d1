import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bismutlab import frame_geometry as fg, models as M
from bismutlab.nilpotent_rep import TwoStepAlgebra

CATALOG = M.catalog()


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_entry_round_trips(name):
    e = CATALOG[name]
    text = json.dumps(e.to_json(), sort_keys=True)
    back = M.ModelEntry.from_json(json.loads(text))
    assert json.dumps(back.to_json(), sort_keys=True) == text
    back.data.validate()


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_fixture_matches_catalog(name):
    assert M.load_fixture(name).to_json() == CATALOG[name].to_json()


def test_heisenberg3_brackets():
    st_ = CATALOG["heisenberg3"].data.structure
    assert st_[0, 1, 2] == 1 and st_[1, 0, 2] == -1
    assert not any(st_[a, b, c] for a in range(3) for b in range(3) for c in range(3) if {a, b} != {0, 1})


def test_heisenberg5_jacobi_and_alpha():
    d = CATALOG["heisenberg5"].data
    n = d.n
    s = d.structure
    for a in range(n):
        for b in range(n):
            for c in range(n):
                jac = sum(s[a, b, k] * s[k, c, e] + s[b, c, k] * s[k, a, e] + s[c, a, k] * s[k, b, e]
                          for k in range(n) for e in range(n))
                assert jac == 0
    from bismutlab.nilpotent_rep import darboux_split

    alg = TwoStepAlgebra.from_frame(d)
    assert np.allclose(darboux_split(alg, [1.0]).alpha, [1.0, 1.0])


def test_su2_brackets_and_horizontal_connection():
    d = CATALOG["su2"].data
    s = d.structure
    X, Y, T = 0, 1, 2
    assert s[X, Y, T] == 2 and s[Y, T, X] == 2 and s[T, X, Y] == 2
    G = fg.nabla_F0(d)
    assert all(G[a, i, j] == 0 for a in d.F for i in d.F for j in d.F)


def test_su2_forms_fiber_dimension():
    assert CATALOG["su2-forms"].data.dim_fiber == 8


def test_quaternionic_algebra_is_valid_two_step():
    d = CATALOG["quaternionic"].data
    alg = TwoStepAlgebra.from_frame(d)
    assert (alg.n1, alg.n2) == (4, 3)
    assert np.linalg.matrix_rank(alg.B.reshape(16, 3)) == 3


@pytest.mark.parametrize("name", ["heisenberg3-forms-induced", "heisenberg3-levi-civita"])
def test_bad_models_expect_rockland_failure(name):
    assert CATALOG[name].expected["rockland"] == "fail (witness)"


@given(st.integers(0, 10_000))
def test_random_models_are_seed_reproducible(seed):
    a = M.random_frame(2, 2, seed).to_json()
    b = M.random_frame(2, 2, seed).to_json()
    assert a == b
    assert M.random_two_step(3, 2, seed).to_json() == M.random_two_step(3, 2, seed).to_json()


@given(st.integers(0, 10_000))
def test_random_two_step_is_surjective(seed):
    d = M.random_two_step(3, 2, seed).data
    alg = TwoStepAlgebra.from_frame(d)
    assert np.linalg.matrix_rank(alg.B.reshape(9, 2)) == 2


def test_random_two_step_rejects_unreachable_rank():
    with pytest.raises(ValueError):
        M.random_two_step(2, 2, 0)


@given(st.integers(0, 10_000))
def test_fibration_has_integrable_horizontal(seed):
    d = M.fibration_model(seed).data
    assert all(fg.omega_F(d, a, i, j) == 0 for a in range(d.n) for i in range(d.n) for j in range(d.n))
