"""Bilinear forms, currying against the dual, and finite-support tensors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

import numpy as np

from ._convex import norming_vector
from .core import NormSpec, as_vector, dual_normspec, eval_norm, vector_from_json
from .errors import DimensionError, IncompleteSpecificationError, UsageError
from .operators import LinearOperator, OperatorNormResult, _fuzz_vectors


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """``phi(x, y) = sum_ij coeffs[i, j] x_i y_j``."""

    coeffs: np.ndarray
    left_norm: NormSpec
    right_norm: NormSpec

    def __post_init__(self):
        C = np.asarray(self.coeffs)
        if np.issubdtype(C.dtype, np.integer):
            C = C.astype(float)
        if C.shape != (self.left_norm.dim, self.right_norm.dim):
            raise DimensionError(f"coefficient shape {C.shape} does not match "
                                 f"({self.left_norm.dim}, {self.right_norm.dim})")
        object.__setattr__(self, "coeffs", C)

    def __call__(self, x, y):
        return as_vector(x, self.left_norm.dim) @ self.coeffs @ as_vector(y, self.right_norm.dim)

    def fix_left(self, x):
        """Coefficient vector of ``y -> phi(x, y)``."""
        return as_vector(x, self.left_norm.dim) @ self.coeffs

    def fix_right(self, y):
        return self.coeffs @ as_vector(y, self.right_norm.dim)


def bilinear_norm(phi, tol=1e-8, seed=0, starts=16, samples=2000, max_iter=20000):
    """``sup |phi(x, y)|`` over the product of unit balls.

    Alternating maximization: with y fixed the best x is a norming vector of
    ``C y``, and symmetrically.  The result's ``witness`` is x; the pair is
    in ``variants["witness_pair"]``.  Criterion ``|phi(x,y)| <= ||phi|| ||x|| ||y||``
    is re-checked on fresh samples.
    """
    C = phi.coeffs
    m, n = C.shape
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(C)
    notes = []
    if not np.any(C):
        x = norming_vector(np.ones(m), phi.left_norm)
        y = norming_vector(np.ones(n), phi.right_norm)
        best = (0.0, x, y)
    else:
        best = None
        inits = [norming_vector(C[i], phi.right_norm) for i in np.argsort(-np.abs(C).max(axis=1))[:2]]
        while len(inits) < starts:
            z = rng.standard_normal(n) + (1j * rng.standard_normal(n) if complex_ else 0)
            inits.append(z / eval_norm(phi.right_norm, z))
        for y in inits:
            val = abs(phi(norming_vector(C @ y, phi.left_norm), y))
            for _ in range(max_iter):
                x = norming_vector(C @ y, phi.left_norm)
                y = norming_vector(x @ C, phi.right_norm)
                new = abs(x @ C @ y)
                done = new - val <= 1e-3 * tol * max(new, 1e-300)
                val = max(val, new)
                if done:
                    break
            if best is None or val > best[0]:
                best = (val, x, y)
    value, x, y = best
    lower = abs(x @ C @ y) / (eval_norm(phi.left_norm, x) * eval_norm(phi.right_norm, y))
    value = max(value, lower) if value == 0 else lower

    X = _fuzz_vectors(m, samples, rng, complex_)
    Y = _fuzz_vectors(n, samples, rng, complex_)
    lhs = np.abs(np.einsum("ki,ij,kj->k", X, C, Y))
    rhs = value * phi.left_norm.eval_rows(X) * phi.right_norm.eval_rows(Y) * (1 + tol)
    crit = bool(np.all(lhs <= rhs))
    if not crit:
        notes.append("sampled pair exceeds the bound: alternation stopped at a local maximum")
    return OperatorNormResult(value=float(value), method="alternating-maximization", witness=x,
                              certified_lower=float(lower), upper_bound=None,
                              variants={"witness_pair": (x, y), "criterion_c": crit}, notes=notes)


def elementary_tensor_form(xp, yp, left_norm, right_norm):
    """``(x, y) -> <xp, x><yp, y>``, whose norm is ``||xp||' ||yp||'``."""
    xp = as_vector(xp, left_norm.dim)
    yp = as_vector(yp, right_norm.dim)
    return BilinearForm(np.outer(xp, yp), left_norm, right_norm)


def elementary_tensor_norm(xp, yp, left_norm, right_norm):
    """Product of the dual norms, the predicted norm of ``xp (x) yp``."""
    return eval_norm(dual_normspec(left_norm), xp) * eval_norm(dual_normspec(right_norm), yp)


def curry(phi):
    """``L_phi : x -> phi(x, .)`` into the dual of the right-hand space."""
    return LinearOperator(phi.coeffs.T, phi.left_norm, dual_normspec(phi.right_norm))


def uncurry(T):
    """``beta_T(x, y) = <T x, y>``; the target norm must be a marked dual norm."""
    if T.target.dual_of is None:
        raise UsageError("uncurry needs an operator whose target carries a dual norm")
    return BilinearForm(T.matrix.T, T.source, T.target.dual_of)


def separate_joint_norms(phi, tol=1e-8, seed=0):
    """Norms of the partial maps next to the joint norm.

    In finite dimensions ``sup_x ||phi(x, .)||``, ``sup_y ||phi(., y)||`` and
    ``||phi||`` all coincide.
    """
    from .operators import operator_norm

    left = operator_norm(curry(phi), tol=tol, seed=seed).value
    flipped = BilinearForm(phi.coeffs.T, phi.right_norm, phi.left_norm)
    right = operator_norm(curry(flipped), tol=tol, seed=seed).value
    joint = bilinear_norm(phi, tol=tol, seed=seed).value
    return {"separate_left": left, "separate_right": right, "joint": joint}


def non_uniform_continuity(deltas):
    """For each delta, points within delta where ``x^2`` (the diagonal of
    ``(x, y) -> x*y`` on R x R) jumps by more than 1."""
    out = []
    for d in deltas:
        if not d > 0:
            raise UsageError("deltas must be positive")
        x1 = 1.0 / d + 1.0
        x2 = x1 + d / 2
        out.append((d, x1, x2, x2 * x2 - x1 * x1))
    return out


# ---------------------------------------------------------------------------
# finite-support functions F(A) and the tensor product

def _key_order(k):
    if isinstance(k, tuple):
        return tuple(_key_order(c) for c in k)
    return (0, k, "") if isinstance(k, int) else (1, 0, str(k))


def _is_zero(v):
    return v == 0


class FiniteSupportFunction:
    """Finitely supported ``f : A -> K`` stored sparsely, zeros pruned.

    Values keep their Python type, so integer or ``Fraction`` inputs give
    exact arithmetic.
    """

    __slots__ = ("_data",)

    def __init__(self, support=None):
        self._data = {k: v for k, v in (support or {}).items() if not _is_zero(v)}

    @classmethod
    def unit(cls, alpha):
        """``e_alpha`` with ``e_alpha(beta) = delta_{alpha beta}``."""
        return cls({alpha: 1})

    def __getitem__(self, k):
        return self._data.get(k, 0)

    def __iter__(self):
        return iter(sorted(self._data, key=_key_order))

    def __len__(self):
        return len(self._data)

    def items(self):
        return [(k, self._data[k]) for k in self]

    @property
    def support(self):
        return dict(self._data)

    def __add__(self, other):
        out = dict(self._data)
        for k, v in other._data.items():
            out[k] = out.get(k, 0) + v
        return FiniteSupportFunction(out)

    def __rmul__(self, c):
        return FiniteSupportFunction({k: c * v for k, v in self._data.items()})

    def __sub__(self, other):
        return self + (-1) * other

    def __eq__(self, other):
        return isinstance(other, FiniteSupportFunction) and self._data == other._data

    def __repr__(self):
        return f"FiniteSupportFunction({dict(self.items())!r})"

    def to_json(self):
        def key(k):
            return "|".join(str(c) for c in k) if isinstance(k, tuple) else str(k)

        return {"support": {key(k): [float(complex(v).real), float(complex(v).imag)]
                            for k, v in self.items()}}

    @classmethod
    def from_json(cls, data):
        try:
            raw = data["support"]
        except (KeyError, TypeError):
            raise UsageError("finite-support JSON needs a 'support' object") from None

        def idx(s):
            return int(s) if s.lstrip("-").isdigit() else s

        out = {}
        for k, v in raw.items():
            key = tuple(idx(c) for c in k.split("|")) if "|" in k else idx(k)
            val = vector_from_json([v])[0]
            out[key] = val.item() if hasattr(val, "item") else val
            if isinstance(out[key], float) and out[key].is_integer():
                out[key] = int(out[key])
        return cls(out)


def tensor_embed(f, g):
    """``Psi_0(f, g)(alpha, beta) = f(alpha) g(beta)``."""
    return FiniteSupportFunction({(a, b): fa * gb for a, fa in f.items() for b, gb in g.items()})


def bilinear_extension(psi, f, g):
    """``psi(f, g) = sum_a sum_b f(a) g(b) psi(e_a, e_b)`` (nested sums)."""
    total = 0
    for a, fa in f.items():
        inner = 0
        for b, gb in g.items():
            try:
                inner = inner + gb * psi[(a, b)]
            except KeyError:
                raise IncompleteSpecificationError(f"psi(e_{a}, e_{b}) not given") from None
        total = total + fa * inner
    return total


@dataclass
class TensorLinearization:
    """Linear map on F(A x B) with ``T(e_(a,b)) = psi(e_a, e_b)``."""

    values: dict
    A: tuple
    B: tuple

    def __call__(self, h):
        total = 0
        for k, v in h.items():
            if k not in self.values:
                raise UsageError(f"{k!r} is not in A x B")
            total = total + v * self.values[k]
        return total


def tensor_linearize(psi, A, B):
    """The unique linear T on F(A x B) with ``T o Psi_0 = psi``."""
    A, B = tuple(A), tuple(B)
    missing = [(a, b) for a in A for b in B if (a, b) not in psi]
    if missing:
        raise IncompleteSpecificationError(f"psi missing on {len(missing)} pairs, e.g. {missing[0]!r}")
    return TensorLinearization({(a, b): psi[(a, b)] for a in A for b in B}, A, B)


@dataclass
class LinearizationReport:
    basis_pairs_checked: int
    basis_exact: bool
    random_pairs_checked: int
    max_error: float
    exact_arithmetic: bool
    unique: bool
    passed: bool
    failures: list = field(default_factory=list)


def _random_fs(index, rng, exact):
    k = int(rng.integers(1, len(index) + 1))
    chosen = rng.choice(len(index), size=k, replace=False)
    if exact:
        return FiniteSupportFunction({index[i]: int(rng.integers(-9, 10)) for i in chosen})
    return FiniteSupportFunction({index[i]: float(rng.standard_normal()) for i in chosen})


def verify_linearization(T, psi, random_pairs=100, seed=0, rtol=1e-12):
    """Exhaustive basis check plus random ``(f, g)`` comparisons against the
    nested-sum bilinear extension.  Integer/Fraction values must match exactly."""
    rng = np.random.default_rng(seed)
    exact = all(isinstance(v, (int, Fraction)) for v in psi.values())
    failures = []
    for a, b in itertools.product(T.A, T.B):
        got = T(tensor_embed(FiniteSupportFunction.unit(a), FiniteSupportFunction.unit(b)))
        if not got == psi[(a, b)]:
            failures.append(("basis", a, b))
    basis_exact = not failures
    max_err = 0.0
    for _ in range(random_pairs):
        f, g = _random_fs(T.A, rng, exact), _random_fs(T.B, rng, exact)
        lhs, rhs = T(tensor_embed(f, g)), bilinear_extension(psi, f, g)
        if exact:
            if lhs != rhs:
                failures.append(("pair", f, g))
        else:
            err = abs(lhs - rhs) / max(1.0, abs(rhs))
            max_err = max(max_err, err)
            if err > rtol:
                failures.append(("pair", f, g))
    # uniqueness: a map agreeing on every e_(a,b) agrees on random elements of F(A x B)
    other = TensorLinearization(dict(T.values), T.A, T.B)
    pairs = list(T.values)
    unique = True
    for _ in range(20):
        h = _random_fs(pairs, rng, exact)
        unique &= bool(abs(T(h) - other(h)) == 0)
    return LinearizationReport(basis_pairs_checked=len(pairs), basis_exact=basis_exact,
                               random_pairs_checked=random_pairs, max_error=max_err,
                               exact_arithmetic=exact, unique=unique,
                               passed=not failures and unique, failures=failures)


def psi_from_json(data):
    """``{"A": [...], "B": [...], "psi": {"a|b": value}}``."""
    fs = FiniteSupportFunction.from_json({"support": data.get("psi", {})})
    A = [int(a) if isinstance(a, str) and a.lstrip("-").isdigit() else a for a in data["A"]]
    B = [int(b) if isinstance(b, str) and b.lstrip("-").isdigit() else b for b in data["B"]]
    psi = {(a, b): fs[(a, b)] for a in A for b in B if (a, b) in fs.support or _declared(data, a, b)}
    return psi, A, B


def _declared(data, a, b):
    return f"{a}|{b}" in data.get("psi", {})
