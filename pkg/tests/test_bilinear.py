import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normkit import bilinear as bl
from normkit import core, operators
from normkit.errors import IncompleteSpecificationError, UsageError

FS = bl.FiniteSupportFunction


def form(C, p, q):
    C = np.asarray(C, dtype=float)
    return bl.BilinearForm(C, core.p_norm(p, C.shape[0]), core.p_norm(q, C.shape[1]))


def test_dot_product_norm_one():
    for n in (1, 3, 6):
        assert bl.bilinear_norm(form(np.eye(n), 2, 2)).value == pytest.approx(1.0, rel=1e-12)


def test_scalar_multiplication_form():
    # K x E -> E flattened: coefficients form an identity column
    assert bl.bilinear_norm(form(np.ones((1, 1)), 2, 2)).value == pytest.approx(1.0, rel=1e-12)


def test_zero_form():
    r = bl.bilinear_norm(form(np.zeros((2, 3)), 2, 1))
    assert r.value == 0.0 and r.variants["criterion_c"]


def test_elementary_tensor_examples():
    phi = bl.elementary_tensor_form([1, 0], [0, 2], core.p_norm(2, 2), core.p_norm(2, 2))
    np.testing.assert_array_equal(phi.coeffs, [[0, 2], [0, 0]])
    assert phi([1, 0], [0, 1]) == 2.0
    assert bl.bilinear_norm(phi).value == pytest.approx(2.0, rel=1e-12)
    z = bl.elementary_tensor_form([0, 0], [1, 2], core.p_norm(2, 2), core.p_norm(2, 2))
    assert bl.bilinear_norm(z).value == 0.0
    e = bl.elementary_tensor_form([1, 1], [1, 0], core.p_norm(1, 2), core.p_norm(2, 2))
    assert bl.bilinear_norm(e).value == pytest.approx(1.0, rel=1e-12)
    assert bl.elementary_tensor_norm([1, 1], [1, 0], core.p_norm(1, 2), core.p_norm(2, 2)) == 1.0


def test_curry_examples():
    L = bl.curry(form(np.eye(2), 2, 2))
    np.testing.assert_array_equal(L.matrix, np.eye(2))
    assert L.target.p == 2.0
    xp, yp = np.array([1.0, -2.0]), np.array([0.5, 3.0, 1.0])
    L = bl.curry(bl.elementary_tensor_form(xp, yp, core.p_norm(2, 2), core.p_norm(3, 3)))
    x = np.array([0.3, 0.7])
    np.testing.assert_allclose(L(x), (xp @ x) * yp, rtol=1e-15)
    assert not np.any(bl.curry(form(np.zeros((2, 2)), 1, 1)).matrix)


def test_uncurry_examples():
    I = operators.LinearOperator(np.eye(3), core.p_norm(2, 3), core.dual_normspec(core.p_norm(2, 3)))
    np.testing.assert_array_equal(bl.uncurry(I).coeffs, np.eye(3))
    A = np.random.default_rng(0).standard_normal((5, 4))
    T = operators.LinearOperator(A, core.p_norm(1, 4), core.dual_normspec(core.p_norm(3, 5)))
    assert bl.curry(bl.uncurry(T)).matrix.tobytes() == A.tobytes()


def test_uncurry_needs_dual_target():
    T = operators.LinearOperator(np.eye(2), core.p_norm(2, 2), core.p_norm(2, 2))
    with pytest.raises(UsageError):
        bl.uncurry(T)


def test_separate_joint_norms_coincide():
    phi = form(np.random.default_rng(1).standard_normal((3, 3)), 2, 2)
    d = bl.separate_joint_norms(phi)
    assert d["separate_left"] == pytest.approx(d["joint"], rel=1e-8)
    assert d["separate_right"] == pytest.approx(d["joint"], rel=1e-8)


def test_non_uniform_continuity_demo():
    for d, x1, x2, jump in bl.non_uniform_continuity([1.0, 1e-2, 1e-5]):
        assert abs(x2 - x1) < d and abs(x2 * x2 - x1 * x1) > 1


def test_finite_support_basics():
    f = FS({1: 2, 2: 0, 3: -1})
    assert len(f) == 2 and f[2] == 0 and f[3] == -1
    e = FS.unit("a")
    assert e["a"] == 1 and e["b"] == 0
    assert (f - f) == FS()
    assert (2 * f)[1] == 4


def test_finite_support_json_canonical():
    h = FS({(2, "b"): 1.5, (1, "a"): -2.0, (1, "b"): 1j})
    js = h.to_json()
    assert list(js["support"]) == ["1|a", "1|b", "2|b"]
    assert FS.from_json(js) == h


def test_tensor_embed_examples():
    assert bl.tensor_embed(FS.unit(1), FS.unit("x")) == FS.unit((1, "x"))
    assert bl.tensor_embed(FS({1: 2}), FS()) == FS()
    h = bl.tensor_embed(FS({1: 2, 2: 3}), FS({1: 1}))
    assert h == FS({(1, 1): 2, (2, 1): 3})


def test_linearize_ij_example():
    psi = {(i, j): i * j for i in (1, 2) for j in (1, 2)}
    T = bl.tensor_linearize(psi, [1, 2], [1, 2])
    for i in (1, 2):
        for j in (1, 2):
            assert T(FS.unit((i, j))) == i * j
    f = FS.unit(1) + FS.unit(2)
    assert T(bl.tensor_embed(f, FS.unit(1))) == 3 == bl.bilinear_extension(psi, f, FS.unit(1))


def test_linearize_zero():
    psi = {(a, b): 0 for a in "xy" for b in "uv"}
    T = bl.tensor_linearize(psi, "xy", "uv")
    assert T(bl.tensor_embed(FS({"x": 3}), FS({"v": 2}))) == 0


def test_linearize_missing_pair():
    with pytest.raises(IncompleteSpecificationError):
        bl.tensor_linearize({(1, 1): 1}, [1, 2], [1])


def test_linearize_8x8_exact_and_float():
    rng = np.random.default_rng(0)
    A, B = list(range(8)), [f"b{k}" for k in range(8)]
    ints = {(a, b): int(rng.integers(-50, 51)) for a in A for b in B}
    rep = bl.verify_linearization(bl.tensor_linearize(ints, A, B), ints, random_pairs=100, seed=1)
    assert rep.passed and rep.exact_arithmetic and rep.basis_pairs_checked == 64
    floats = {k: float(rng.standard_normal()) for k in ints}
    rep = bl.verify_linearization(bl.tensor_linearize(floats, A, B), floats, random_pairs=100, seed=1)
    assert rep.passed and rep.max_error <= 1e-12


def test_linearize_fractions_exact():
    psi = {(a, b): Fraction(a + 1, b + 2) for a in range(3) for b in range(3)}
    rep = bl.verify_linearization(bl.tensor_linearize(psi, range(3), range(3)), psi, seed=2)
    assert rep.passed and rep.exact_arithmetic


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), p=st.sampled_from([1.0, 2.0, 3.0, math.inf]),
       q=st.sampled_from([1.0, 1.5, 2.0, math.inf]))
def test_curry_is_isometric(seed, p, q):
    rng = np.random.default_rng(seed)
    phi = form(rng.standard_normal((3, 4)), p, q)
    r = bl.bilinear_norm(phi, seed=seed, samples=1000)
    o = operators.operator_norm(bl.curry(phi), seed=seed).value
    assert abs(r.value - o) <= 2e-8 * max(1.0, o)
    assert r.variants["criterion_c"]
    assert bl.uncurry(bl.curry(phi)).coeffs.tobytes() == phi.coeffs.tobytes()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_separate_linearity(seed):
    rng = np.random.default_rng(seed)
    phi = form(rng.standard_normal((3, 2)), 2, 2)
    x1, x2 = rng.standard_normal((2, 3))
    y1, y2 = rng.standard_normal((2, 2))
    a = float(rng.standard_normal())
    assert phi(x1 + a * x2, y1) == pytest.approx(phi(x1, y1) + a * phi(x2, y1), abs=1e-12)
    assert phi(x1, y1 + a * y2) == pytest.approx(phi(x1, y1) + a * phi(x1, y2), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_tensor_embed_bilinear(seed):
    rng = np.random.default_rng(seed)
    f1 = FS({k: int(rng.integers(-5, 6)) for k in range(4)})
    f2 = FS({k: int(rng.integers(-5, 6)) for k in range(4)})
    g = FS({k: int(rng.integers(-5, 6)) for k in "abc"})
    a = int(rng.integers(-3, 4))
    assert bl.tensor_embed(f1 + a * f2, g) == bl.tensor_embed(f1, g) + a * bl.tensor_embed(f2, g)
    assert len(bl.tensor_embed(f1, g)) == len(f1) * len(g)
