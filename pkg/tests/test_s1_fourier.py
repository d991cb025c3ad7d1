import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bismutlab import s1_fourier as s1


def _simple(m, D, C, grading, inner="eye"):
    n = len(grading)
    return s1.ModeProblem(m, D, C, grading, np.eye(n) if inner == "eye" else inner)


def _odd_pair(b):
    """Odd operator on C^1 (+) C^1 with off-diagonal entry ``b``."""
    return np.array([[0, np.conj(b)], [b, 0]], dtype=complex)


@given(st.integers(0, 100_000))
def test_routes_agree_on_random_instances(seed):
    p = s1.random_problem(seed)
    assert s1.mode_kernel(p) == s1.direct_block_kernel(p)


@pytest.mark.parametrize("m", range(-3, 4))
def test_routes_agree_on_planted_kernels(m):
    for seed in range(30):
        p = s1.random_problem(seed, dim=8, m=m, degenerate=True)
        assert s1.mode_kernel(p) == s1.direct_block_kernel(p)


def test_planted_kernels_are_nonzero():
    hits = sum(any(s1.mode_kernel(s1.random_problem(s, dim=8, m=3, degenerate=True))) for s in range(20))
    assert hits > 0


def test_mode_zero_invertible_D():
    p = _simple(0, _odd_pair(2.0), np.diag([1.0, 3.0]), [1, -1])
    assert s1.mode_kernel(p) == (0, 0) == s1.direct_block_kernel(p)


def test_mode_zero_without_curvature():
    D = np.zeros((4, 4), dtype=complex)
    D[2, 0] = D[0, 2] = 1.0  # kernel: one even (e1), one odd (e3) vector
    p = _simple(0, D, np.zeros((4, 4)), [1, 1, -1, -1])
    k_even, k_odd = 1, 1
    assert s1.mode_kernel(p) == (k_even + k_odd, k_odd + k_even)
    assert s1.direct_block_kernel(p) == s1.mode_kernel(p)


def test_mode_zero_needs_inner_product():
    p = s1.ModeProblem(0, _odd_pair(1.0), np.zeros((2, 2)), [1, -1])
    with pytest.raises(s1.MissingMetric):
        s1.mode_kernel(p)


def test_nonzero_mode_does_not_need_inner_product():
    p = s1.ModeProblem(2, _odd_pair(1.0), np.zeros((2, 2)), [1, -1])
    assert s1.mode_kernel(p) == s1.direct_block_kernel(p)


@pytest.mark.parametrize("m", [-2, 1, 3])
def test_eigenvalue_criterion(m):
    # D invertible: summand dim = multiplicity of 4i/m as an eigenvalue of cOmega D^-2
    D = _odd_pair(1.5)
    D2 = D @ D
    for target in (4j / m, 1.0 + 2j):
        C = np.diag([target * D2[0, 0], 0.7])
        p = _simple(m, D, C, [1, -1])
        ev = np.linalg.eigvals(C[:1, :1] @ np.linalg.inv(D2[:1, :1]))
        mult = int(np.sum(np.abs(ev - 4j / m) < 1e-9))
        assert s1.mode_kernel(p)[1] == mult  # odd summand has tau in the even slot
        assert s1.mode_kernel(p) == s1.direct_block_kernel(p)


def test_invalid_problems():
    with pytest.raises(s1.InvalidModeProblem):
        s1.ModeProblem(1, np.eye(2), np.zeros((2, 2)), [1, -1])  # D even
    with pytest.raises(s1.InvalidModeProblem):
        s1.ModeProblem(1, _odd_pair(1.0), _odd_pair(1.0), [1, -1])  # cOmega odd
    with pytest.raises(s1.InvalidModeProblem):
        s1.ModeProblem(1, np.zeros((3, 3)), np.zeros((2, 2)), [1, -1])
    with pytest.raises(s1.InvalidModeProblem):
        s1.ModeProblem(1, _odd_pair(1.0), np.zeros((2, 2)), [1, 2])


def test_empty_total():
    r = s1.assemble_total([])
    assert r.totals == (0, 0) and r.oracle_totals == (0, 0) and r.mode_range is None


def test_total_sums_oracles():
    probs = [s1.random_problem(s, dim=6, degenerate=True) for s in range(12)]
    r = s1.assemble_total(probs)
    assert r.totals == tuple(map(sum, zip(*(s1.direct_block_kernel(p) for p in probs))))
    assert r.agree


def test_report_json():
    js = json.loads(s1.assemble_total([s1.random_problem(1)]).dumps())
    assert js["schema"] == s1.SCHEMA
    assert "truncation" in js["warning"]


def test_hopf_total():
    probs = s1.hopf_mode_problems(6, range(-6, 7))
    r = s1.assemble_total(probs)
    assert r.agree
    assert r.totals == (2, 0)
    nonzero = {p["m"] for p in r.per_mode if any(p["mode_kernel"])}
    assert nonzero == {0}
