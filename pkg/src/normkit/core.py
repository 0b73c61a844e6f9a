"""Scalars, vectors, norm specifications and ball geometry.

Vectors are one-dimensional numpy arrays.  Scalars are complex throughout;
real inputs are the imaginary-part-zero case and stay ``float64`` arrays
unless something complex enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, InvalidNormError, SingularBasisError, UsageError

__all__ = [
    "NormSpec",
    "BallSpec",
    "AxiomReport",
    "GeometryReport",
    "p_norm",
    "zero_norm",
    "custom_norm",
    "dual_normspec",
    "conjugate_exponent",
    "modulus_arg",
    "as_vector",
    "as_real",
    "eval_norm",
    "check_norm_axioms",
    "sample_unit_vectors",
    "closure_witness",
    "ball_geometry_check",
    "norm_to_json",
    "norm_from_json",
    "vector_to_json",
    "vector_from_json",
    "CUSTOM_EVALUATORS",
]

ALGEBRAIC_RTOL = 1e-12
GEOMETRY_ATOL = 1e-10


def modulus_arg(z):
    """Polar form ``z = r * exp(i*theta)`` with theta in [0, 2*pi)."""
    z = np.asarray(z, dtype=complex)
    theta = np.mod(np.angle(z), 2 * np.pi)
    # mod can round 2*pi - tiny up to exactly 2*pi
    theta = np.where(theta >= 2 * np.pi, 0.0, theta)
    return np.abs(z), theta


def as_vector(x, dim=None):
    v = np.asarray(x)
    if v.dtype == object:
        v = v.astype(complex)
    if not (np.issubdtype(v.dtype, np.number)):
        raise UsageError(f"not a numeric vector: {x!r}")
    if np.issubdtype(v.dtype, np.integer) or v.dtype == np.float32:
        v = v.astype(float)
    v = np.atleast_1d(v)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"expected a nonempty 1-d vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"vector has dim {v.size}, expected {dim}")
    return v


def as_real(x, what="vector"):
    """Real-mode wrapper: reject nonzero imaginary parts."""
    v = np.asarray(x)
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise UsageError(f"{what} has nonzero imaginary part; real scalars required")
        v = v.real
    return v.astype(float)


def conjugate_exponent(p):
    p = float(p)
    if p < 1:
        raise UsageError(f"exponent {p} < 1 is not a norm exponent")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _pnorm_rows(X, p):
    A = np.abs(X)
    if math.isinf(p):
        return A.max(axis=-1)
    if p == 1:
        return A.sum(axis=-1)
    if p == 2:
        out = np.sqrt((A * A).sum(axis=-1))
        extreme = ~((out > 1e-150) & (out < 1e150)) & (A.max(axis=-1) > 0)
        if not np.any(extreme):
            return out
        m = A.max(axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        scaled = safe[..., 0] * np.sqrt(((A / safe) ** 2).sum(axis=-1))
        return np.where(extreme, scaled, out)
    # scale by the max modulus so the power sum neither overflows nor underflows
    m = A.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return safe[..., 0] * ((A / safe) ** p).sum(axis=-1) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class NormSpec:
    """A norm on K^n.

    ``kind`` is one of ``"p"`` (exponent ``p`` in [1, inf]), ``"zero"`` (max
    modulus of coordinates in ``basis``, whose columns are the basis
    vectors), ``"custom"`` (arbitrary ``evaluator``) or ``"dual"`` (dual norm
    of ``dual_of``).
    """

    kind: str
    dim: int
    p: float = 2.0
    basis: Optional[np.ndarray] = None
    evaluator: Optional[Callable] = None
    name: str = ""
    params: dict = field(default_factory=dict)
    dual_of: Optional["NormSpec"] = None
    _inverse: Optional[np.ndarray] = field(default=None, repr=False)

    def __call__(self, x):
        return eval_norm(self, x)

    def eval_rows(self, X):
        """Evaluate on each row of a 2-d array (no dimension checks)."""
        X = np.asarray(X)
        form = self.linear_form()
        if form is not None:
            W, r = form
            Y = X if W is None else X @ W.T
            return _pnorm_rows(Y, r)
        if self.kind == "dual":
            from ._convex import dual_norm_value

            return np.array([dual_norm_value(self.dual_of, row) for row in X])
        return np.array([float(np.real(self.evaluator(row))) for row in X])

    def linear_form(self):
        """``(W, r)`` with ``||x|| = ||W x||_r``, or None for opaque norms.

        ``W = None`` stands for the identity.
        """
        if self.kind == "p":
            return None, self.p
        if self.kind == "zero":
            return self._inverse, math.inf
        if self.kind == "dual" and self.dual_of is not None:
            inner = self.dual_of.linear_form()
            if inner is None:
                return None
            W, r = inner
            if W is None:
                return None, conjugate_exponent(r)
            if math.isinf(r):
                # sup over ||W x||_inf <= 1 of |<u, x>| is ||W^{-T} u||_1
                return self.dual_of.basis.T, 1.0
        return None

    @property
    def is_builtin(self):
        return self.linear_form() is not None

    @property
    def label(self):
        if self.kind == "p":
            return f"p={'inf' if math.isinf(self.p) else _fmt(self.p)}"
        if self.kind == "zero":
            return "zero-norm"
        if self.kind == "dual":
            return f"dual({self.dual_of.label})"
        return f"custom:{self.name or 'anonymous'}"


def _fmt(v):
    return repr(float(v)).rstrip("0").rstrip(".") if float(v) != int(v) else str(int(v))


def p_norm(p, dim):
    p = float(p)
    if math.isnan(p) or p < 1:
        raise UsageError(f"p = {p} < 1 does not define a norm")
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    return NormSpec(kind="p", dim=int(dim), p=p)


def zero_norm(basis):
    """Max-modulus norm of coordinates w.r.t. ``basis`` (a list of vectors)."""
    B = np.column_stack([as_vector(b) for b in basis])
    n = B.shape[0]
    if B.shape[1] != n:
        raise SingularBasisError(f"{B.shape[1]} vectors cannot be a basis of K^{n}")
    if np.linalg.matrix_rank(B) < n:
        raise SingularBasisError("basis vectors are linearly dependent")
    return NormSpec(kind="zero", dim=n, basis=B, _inverse=np.linalg.inv(B))


def custom_norm(evaluator, dim, name="", params=None):
    return NormSpec(kind="custom", dim=int(dim), evaluator=evaluator, name=name,
                    params=dict(params or {}))


def dual_normspec(norm):
    """Dual norm, in closed form for p-norms (conjugate exponent)."""
    if norm.kind == "p":
        spec = p_norm(conjugate_exponent(norm.p), norm.dim)
        return NormSpec(kind="p", dim=spec.dim, p=spec.p, dual_of=norm)
    if norm.kind == "dual":
        return norm.dual_of
    return NormSpec(kind="dual", dim=norm.dim, dual_of=norm)


def eval_norm(norm, x):
    x = as_vector(x)
    if x.size != norm.dim:
        raise DimensionError(f"vector of dim {x.size} for a norm on K^{norm.dim}")
    return float(norm.eval_rows(x[None, :])[0])


# ---------------------------------------------------------------------------
# named custom evaluators, so that fixtures can carry non-p norms as JSON

def _first_coordinate(x):
    return float(np.real(x[0]))


def _quasi_p(x, r=0.5):
    return float(np.sum(np.abs(x) ** r) ** (1.0 / r))


def _squared_l2(x):
    return float(np.sum(np.abs(x) ** 2))


def _weighted_p(x, weights=(), p=2.0):
    w = np.asarray(weights, dtype=float)
    return float(_pnorm_rows((w * x)[None, :], float(p))[0])


CUSTOM_EVALUATORS = {
    "first_coordinate": _first_coordinate,
    "quasi_p": _quasi_p,
    "squared_l2": _squared_l2,
    "weighted_p": _weighted_p,
}


# ---------------------------------------------------------------------------
# sampling

def _gaussian(rng, count, dim, complex_):
    X = rng.standard_normal((count, dim))
    if complex_:
        X = X + 1j * rng.standard_normal((count, dim))
    return X


def sample_unit_vectors(norm, count, mode="on-sphere", seed=0, complex_=False):
    """Gaussian draws scaled onto the unit sphere or into the unit ball.

    No uniformity is claimed; the draws only need to cover the sphere.
    Returns a ``(count, dim)`` array, one vector per row.
    """
    if count < 1:
        raise UsageError("count must be >= 1")
    if mode not in ("on-sphere", "in-ball"):
        raise UsageError(f"unknown sampling mode {mode!r}")
    rng = np.random.default_rng(seed)
    X = _gaussian(rng, count, norm.dim, complex_)
    nx = norm.eval_rows(X)
    if np.any(~np.isfinite(nx)) or np.any(nx <= 0):
        raise InvalidNormError(f"{norm.label} vanishes or is undefined on a nonzero sample")
    X = X / nx[:, None]
    if mode == "in-ball":
        X = X * rng.uniform(0.0, 1.0, count)[:, None]
    else:
        # one corrective pass keeps re-evaluation within 1e-12 for odd p
        X = X / norm.eval_rows(X)[:, None]
    return X


# ---------------------------------------------------------------------------
# axioms

@dataclass
class AxiomReport:
    norm: str
    samples: int
    counterexamples: dict
    passed: bool

    def failed_axioms(self):
        return sorted(k for k, v in self.counterexamples.items() if v)


def check_norm_axioms(norm, samples=1000, seed=0, complex_=False, max_examples=5):
    """Fuzz nonnegativity, definiteness, homogeneity and the triangle inequality.

    Counterexamples are stored per axiom as lists of vectors (pairs for the
    triangle inequality, ``(alpha, x)`` for homogeneity).
    """
    if samples < 1:
        raise UsageError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n = norm.dim
    scales = 10.0 ** rng.uniform(-3, 3, (samples, 1))
    X = _gaussian(rng, samples, n, complex_) * scales
    Y = _gaussian(rng, samples, n, complex_) * scales[::-1]
    alpha = rng.standard_normal(samples) * 10.0 ** rng.uniform(-2, 2, samples)
    if complex_:
        alpha = alpha * np.exp(1j * rng.uniform(0, 2 * np.pi, samples))

    nx = norm.eval_rows(X)
    ny = norm.eval_rows(Y)
    nxy = norm.eval_rows(X + Y)
    nax = norm.eval_rows(alpha[:, None] * X)
    n0 = norm.eval_rows(np.zeros((1, n)))[0]

    bad = {}
    neg = np.flatnonzero(~(nx >= 0))
    bad["nonnegativity"] = [X[i] for i in neg[:max_examples]]
    zero_bad = []
    if not n0 == 0:
        zero_bad.append(np.zeros(n))
    zero_bad += [X[i] for i in np.flatnonzero(nx == 0)[:max_examples]]
    bad["definiteness"] = zero_bad
    expect = np.abs(alpha) * nx
    hom = np.flatnonzero(~(np.abs(nax - expect) <= ALGEBRAIC_RTOL * np.maximum(np.abs(expect), 1e-300)))
    bad["homogeneity"] = [(complex(alpha[i]), X[i]) for i in hom[:max_examples]]
    tri = np.flatnonzero(~(nxy <= (nx + ny) * (1 + ALGEBRAIC_RTOL)))
    bad["triangle"] = [(X[i], Y[i]) for i in tri[:max_examples]]
    passed = not any(bad.values())
    return AxiomReport(norm=norm.label, samples=samples, counterexamples=bad, passed=passed)


# ---------------------------------------------------------------------------
# balls

@dataclass(frozen=True, eq=False)
class BallSpec:
    center: np.ndarray
    radius: float
    norm: NormSpec
    closed: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise UsageError("ball radius must be positive")
        object.__setattr__(self, "center", as_vector(self.center, self.norm.dim))

    def contains(self, x, atol=GEOMETRY_ATOL):
        d = eval_norm(self.norm, np.asarray(x) - self.center)
        return d <= self.radius + atol if self.closed else d < self.radius + atol


def closure_witness(center, radius, y, eps, norm):
    """Point of the open ball within ``eps/2`` of a sphere point ``y``.

    ``z = a + (1 - eps/(2 gamma)) (y - a)``; returns ``(z, ||z - y||, ||z - a||)``.
    """
    a = as_vector(center, norm.dim)
    y = as_vector(y, norm.dim)
    if not 0 < eps < 2 * radius:
        raise UsageError("need 0 < eps < 2*radius")
    z = a + (1.0 - eps / (2.0 * radius)) * (y - a)
    return z, eval_norm(norm, z - y), eval_norm(norm, z - a)


@dataclass
class GeometryReport:
    trials: int
    convexity_counterexamples: list
    closure_counterexamples: list
    max_closure_error: float
    passed: bool


def ball_geometry_check(ball, trials=1000, seed=0, complex_=False, max_examples=5):
    """Fuzz convexity of ``ball`` and the closure-witness identities on its sphere."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    a, g, norm = ball.center, float(ball.radius), ball.norm
    seeds = rng.integers(0, 2**63 - 1, 3)

    X = a + g * sample_unit_vectors(norm, trials, "in-ball", int(seeds[0]), complex_)
    Y = a + g * sample_unit_vectors(norm, trials, "in-ball", int(seeds[1]), complex_)
    t = rng.uniform(0.0, 1.0, (trials, 1))
    C = (1 - t) * X + t * Y
    dc = norm.eval_rows(C - a)
    inside = dc <= g + GEOMETRY_ATOL if ball.closed else dc < g + GEOMETRY_ATOL
    conv_bad = [(X[i], Y[i], float(t[i, 0])) for i in np.flatnonzero(~inside)[:max_examples]]

    S = a + g * sample_unit_vectors(norm, trials, "on-sphere", int(seeds[2]), complex_)
    eps = rng.uniform(0.0, 2 * g, trials)
    eps = np.where(eps == 0.0, g, eps)
    Z = a + (1.0 - eps / (2 * g))[:, None] * (S - a)
    dzy = norm.eval_rows(Z - S)
    dza = norm.eval_rows(Z - a)
    err = np.maximum(np.abs(dzy - eps / 2), np.abs(dza - (2 * g - eps) / 2))
    ok = (err <= GEOMETRY_ATOL) & (dzy < g) & (dza < g)
    clo_bad = [(S[i], float(eps[i])) for i in np.flatnonzero(~ok)[:max_examples]]
    return GeometryReport(
        trials=trials,
        convexity_counterexamples=conv_bad,
        closure_counterexamples=clo_bad,
        max_closure_error=float(err.max()),
        passed=not conv_bad and not clo_bad,
    )


# ---------------------------------------------------------------------------
# JSON

def vector_to_json(x):
    x = np.asarray(x)
    return [[float(np.real(v)), float(np.imag(v))] for v in x]


def vector_from_json(data):
    if not isinstance(data, (list, tuple)) or not data:
        raise UsageError(f"expected a nonempty array for a vector, got {data!r}")
    out = []
    for v in data:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise UsageError(f"scalar must be [re, im], got {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise UsageError(f"bad scalar {v!r}")
    arr = np.array(out, dtype=complex)
    if np.all(arr.imag == 0):
        return arr.real.copy()
    return arr


def _p_from_json(v):
    if v in ("inf", "Infinity", "infinity"):
        return math.inf
    try:
        return float(v)
    except (TypeError, ValueError):
        raise UsageError(f"bad exponent {v!r}") from None


def _p_to_json(p):
    return "inf" if math.isinf(p) else float(p)


def norm_to_json(norm):
    if norm.kind == "p":
        return {"kind": "p", "p": _p_to_json(norm.p), "dim": norm.dim}
    if norm.kind == "zero":
        return {"kind": "zero", "dim": norm.dim,
                "basis": [vector_to_json(norm.basis[:, j]) for j in range(norm.dim)]}
    if norm.kind == "dual":
        return {"kind": "dual", "dim": norm.dim, "of": norm_to_json(norm.dual_of)}
    out = {"kind": "custom", "dim": norm.dim, "evaluator": norm.name}
    if norm.params:
        out["params"] = norm.params
    return out


def norm_from_json(data):
    if not isinstance(data, dict) or "kind" not in data:
        raise UsageError(f"norm must be an object with a 'kind', got {data!r}")
    kind = data["kind"]
    dim = data.get("dim")
    if kind == "p":
        if dim is None:
            raise UsageError("p-norm needs 'dim'")
        return p_norm(_p_from_json(data.get("p", 2)), int(dim))
    if kind == "zero":
        if "basis" in data:
            return zero_norm([vector_from_json(b) for b in data["basis"]])
        if dim is None:
            raise UsageError("zero norm needs 'dim' or 'basis'")
        return zero_norm(list(np.eye(int(dim))))
    if kind == "dual":
        return dual_normspec(norm_from_json(data["of"]))
    if kind == "custom":
        name = data.get("evaluator")
        if name not in CUSTOM_EVALUATORS:
            raise UsageError(f"unknown custom evaluator {name!r}; known: {sorted(CUSTOM_EVALUATORS)}")
        params = dict(data.get("params", {}))
        fn = CUSTOM_EVALUATORS[name]
        return custom_norm(lambda x, _f=fn, _k=params: _f(x, **_k), int(dim), name, params)
    raise UsageError(f"unknown norm kind {kind!r}")
