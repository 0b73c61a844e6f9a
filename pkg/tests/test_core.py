import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normkit import core
from normkit.errors import DimensionError, InvalidNormError, SingularBasisError, UsageError

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf])


def vectors(n):
    return st.lists(finite, min_size=n, max_size=n).map(np.array)


def test_eval_norm_examples():
    assert core.eval_norm(core.p_norm(2, 2), [3, 4]) == 5.0
    assert core.eval_norm(core.p_norm(math.inf, 3), [1, -7, 3]) == 7.0
    assert core.eval_norm(core.zero_norm(list(np.eye(3))), [2, -5, 1]) == 5.0


def test_p_below_one_rejected():
    with pytest.raises(UsageError):
        core.p_norm(0.5, 3)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        core.eval_norm(core.p_norm(2, 3), [1, 2])


def test_singular_zero_basis():
    with pytest.raises(SingularBasisError):
        core.zero_norm([[1, 1], [2, 2]])


def test_complex_vectors():
    assert core.eval_norm(core.p_norm(2, 2), [3j, 4]) == pytest.approx(5.0, rel=1e-15)


def test_axioms_pass_for_builtin_norms():
    for nm in (core.p_norm(2, 4), core.zero_norm([[1, 0, 0], [1, 1, 0], [0, 2, 1]])):
        rep = core.check_norm_axioms(nm, samples=1000, seed=1)
        assert rep.passed, rep.failed_axioms()


def test_axioms_flag_signed_functional():
    nm = core.norm_from_json({"kind": "custom", "evaluator": "first_coordinate", "dim": 3})
    rep = core.check_norm_axioms(nm, samples=1000, seed=0)
    assert not rep.passed
    assert rep.counterexamples["nonnegativity"]


def test_axioms_flag_quasi_norm_triangle():
    nm = core.norm_from_json({"kind": "custom", "evaluator": "quasi_p", "dim": 3, "params": {"r": 0.5}})
    rep = core.check_norm_axioms(nm, samples=1000, seed=0)
    assert rep.failed_axioms() == ["triangle"]


def test_axioms_flag_squared_l2_homogeneity():
    nm = core.norm_from_json({"kind": "custom", "evaluator": "squared_l2", "dim": 2})
    assert "homogeneity" in core.check_norm_axioms(nm, samples=200).failed_axioms()


def test_sample_on_sphere_p2():
    X = core.sample_unit_vectors(core.p_norm(2, 3), 10, "on-sphere", seed=3)
    assert X.shape == (10, 3)
    assert np.all(np.abs(np.linalg.norm(X, axis=1) - 1) <= 1e-12)


def test_sample_in_ball_p1():
    X = core.sample_unit_vectors(core.p_norm(1, 4), 10, "in-ball", seed=3)
    assert np.all(np.abs(X).sum(axis=1) <= 1 + 1e-15)


def test_sample_on_sphere_pinf_has_unit_max():
    X = core.sample_unit_vectors(core.p_norm(math.inf, 5), 10_000, "on-sphere", seed=0)
    assert np.all(np.abs(X).max(axis=1) == 1.0)


def test_sample_degenerate_norm():
    nm = core.norm_from_json({"kind": "custom", "evaluator": "first_coordinate", "dim": 2})
    with pytest.raises(InvalidNormError):
        core.sample_unit_vectors(nm, 100, seed=0)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 7, math.inf])
def test_sample_on_sphere_reevaluates_to_one(p):
    nm = core.p_norm(p, 6)
    X = core.sample_unit_vectors(nm, 500, "on-sphere", seed=2, complex_=True)
    assert np.all(np.abs(nm.eval_rows(X) - 1) <= 1e-12)


def test_closure_witness_example():
    z, dzy, dza = core.closure_witness([0, 0], 1.0, [1, 0], 1.0, core.p_norm(2, 2))
    np.testing.assert_allclose(z, [0.5, 0.0])
    assert dzy == 0.5 and dza == 0.5


def test_degenerate_convex_combination():
    ball = core.BallSpec([0, 0], 1.0, core.p_norm(2, 2))
    x = np.array([0.3, -0.2])
    t = 0.37
    assert np.array_equal((1 - t) * x + t * x, x) or ball.contains((1 - t) * x + t * x)


def test_ball_geometry_l1_r3():
    ball = core.BallSpec(np.zeros(3), 1.0, core.p_norm(1, 3))
    rep = core.ball_geometry_check(ball, trials=100_000, seed=0)
    assert rep.passed and not rep.convexity_counterexamples


def test_ball_rejects_nonpositive_radius():
    with pytest.raises(UsageError):
        core.BallSpec([0, 0], 0.0, core.p_norm(2, 2))


def test_norm_json_round_trip():
    specs = [core.p_norm(math.inf, 3), core.p_norm(1.5, 2), core.zero_norm([[1, 0], [1, 1]]),
             core.dual_normspec(core.zero_norm([[1, 0], [1, 1]]))]
    x = np.array([0.3, -1.2])
    for nm in specs:
        back = core.norm_from_json(core.norm_to_json(nm))
        y = x if nm.dim == 2 else np.array([0.3, -1.2, 2.0])
        assert back(y) == nm(y)


def test_norm_json_errors():
    for bad in ({"p": 2}, {"kind": "p"}, {"kind": "custom", "evaluator": "nope", "dim": 2},
                {"kind": "p", "p": "abc", "dim": 2}, {"kind": "wat", "dim": 2}):
        with pytest.raises(UsageError):
            core.norm_from_json(bad)


def test_vector_json_complex():
    v = core.vector_from_json([[1, 2], 3])
    assert v.dtype == complex and v[0] == 1 + 2j
    assert core.vector_from_json([[1, 0], [2, 0]]).dtype == float


def test_modulus_arg_principal_range():
    r, th = core.modulus_arg(np.array([1j, -1, -1j, 1]))
    np.testing.assert_allclose(r, 1)
    assert np.all((th >= 0) & (th < 2 * np.pi))
    np.testing.assert_allclose(th, [np.pi / 2, np.pi, 3 * np.pi / 2, 0])


def test_dual_of_zero_norm_is_l1_of_transposed_coordinates():
    B = np.array([[2.0, 1.0], [0.0, 1.0]])
    nm = core.zero_norm(list(B.T))
    d = core.dual_normspec(nm)
    u = np.array([0.7, -1.1])
    assert d(u) == pytest.approx(np.abs(B.T @ u).sum(), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(p=exponents, x=vectors(4), y=vectors(4))
def test_triangle_and_reverse_triangle(p, x, y):
    nm = core.p_norm(p, 4)
    nx, ny = nm(x), nm(y)
    slack = 1e-12 * (nx + ny) + 1e-300
    for s in (x + y, x - y):
        ns = nm(s)
        assert ns <= nx + ny + slack
        assert abs(nx - ny) <= ns + slack


@settings(max_examples=200, deadline=None)
@given(p=exponents, x=vectors(3), a=finite)
def test_homogeneity(p, x, a):
    nm = core.p_norm(p, 3)
    assert nm(a * x) == pytest.approx(abs(a) * nm(x), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(p=exponents, gamma=st.floats(0.01, 100), frac=st.floats(0.001, 0.999), seed=st.integers(0, 2**31))
def test_closure_identities(p, gamma, frac, seed):
    nm = core.p_norm(p, 3)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(3)
    y = a + gamma * core.sample_unit_vectors(nm, 1, seed=seed)[0]
    eps = frac * 2 * gamma
    _, dzy, dza = core.closure_witness(a, gamma, y, eps, nm)
    assert abs(dzy - eps / 2) <= 1e-10 * max(1, gamma)
    assert abs(dza - (2 * gamma - eps) / 2) <= 1e-10 * max(1, gamma)
