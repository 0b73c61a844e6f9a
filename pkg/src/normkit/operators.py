"""Linear operators between finite-dimensional normed spaces.

Operator norms dispatch to a closed form where one exists (source p=1:
max column norm; target p=inf: max dual-exponent row norm), to power
iteration for 2 -> 2, to exhaustive vertex enumeration for a real sup-norm
source, and otherwise to multistart normalized-gradient ascent on the unit
sphere combined with a sampling lower bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    NormSpec,
    as_vector,
    conjugate_exponent,
    eval_norm,
    norm_from_json,
    norm_to_json,
    p_norm,
    sample_unit_vectors,
)
from .errors import DimensionError, UsageError

logger = logging.getLogger(__name__)

POWER_ITER_CAP = 10_000
POWER_ITER_TOL = 1e-10
MULTISTART = 16
VERTEX_ENUM_MAX_DIM = 16


@dataclass(frozen=True, eq=False)
class LinearOperator:
    matrix: np.ndarray
    source: NormSpec
    target: NormSpec

    def __post_init__(self):
        A = np.asarray(self.matrix)
        if A.dtype == object or np.issubdtype(A.dtype, np.integer):
            A = A.astype(complex if A.dtype == object else float)
        if A.ndim != 2:
            raise DimensionError(f"operator matrix must be 2-d, got shape {A.shape}")
        if A.shape != (self.target.dim, self.source.dim):
            raise DimensionError(
                f"matrix shape {A.shape} does not match target dim {self.target.dim} "
                f"x source dim {self.source.dim}"
            )
        object.__setattr__(self, "matrix", A)

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, x):
        return self.matrix @ as_vector(x, self.source.dim)


@dataclass
class OperatorNormResult:
    value: float
    method: str
    witness: np.ndarray
    certified_lower: float
    upper_bound: Optional[float]
    variants: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def certified(self):
        return self.upper_bound is not None and self.upper_bound <= self.value * (1 + 1e-9) + 1e-300


def _unit(x, norm):
    """Scale ``x`` so that ``||x|| <= 1`` holds and sits within a few ulps of 1."""
    x = x / eval_norm(norm, x)
    for _ in range(8):
        if eval_norm(norm, x) <= 1.0:
            break
        x = x * (1.0 - 2.0**-52)
    return x


def _row_norms(A, r):
    if math.isinf(r):
        return np.abs(A).max(axis=1)
    if r == 1:
        return np.abs(A).sum(axis=1)
    return np.linalg.norm(A, ord=r, axis=1)


def _norming_vector(row, p):
    """Unit vector x of l^p with ``row . x = ||row||_{p'}`` (no conjugation in the pairing)."""
    a = np.abs(row)
    phase = np.where(a > 0, np.conj(row) / np.where(a > 0, a, 1), 1.0)
    if math.isinf(p):
        return phase
    q = conjugate_exponent(p)
    if math.isinf(q):
        x = np.zeros_like(row, dtype=phase.dtype)
        i = int(np.argmax(a))
        x[i] = phase[i]
        return x
    return phase * a ** (q - 1)


def _reduce(T):
    """Rewrite ``||W x||_r`` norms as plain r-norms by a change of variables.

    Returns ``(A, p, q, back)`` with ``back`` mapping a witness of the
    reduced problem to one of the original, or None for opaque norms.
    """
    sf, tf = T.source.linear_form(), T.target.linear_form()
    if sf is None or tf is None:
        return None
    A = T.matrix
    (Ws, p), (Wt, q) = sf, tf
    Winv = None
    if Ws is not None:
        Winv = np.linalg.inv(Ws)
        A = A @ Winv
    if Wt is not None:
        A = Wt @ A

    def back(y):
        return y if Winv is None else Winv @ y

    return A, p, q, back


def _power_iteration(A, rng, tol=POWER_ITER_TOL, cap=POWER_ITER_CAP):
    n = A.shape[1]
    x = rng.standard_normal(n)
    if np.iscomplexobj(A):
        x = x + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam_old = -1.0
    for it in range(cap):
        y = A @ x
        lam = float(np.vdot(y, y).real)
        z = A.conj().T @ y
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0, x, True, it
        if abs(lam - lam_old) <= tol * lam:
            # one more step so the returned vector matches the returned value
            x = z / nz
            y = A @ x
            return math.sqrt(float(np.vdot(y, y).real)), x, True, it
        lam_old = lam
        x = z / nz
    return math.sqrt(lam), x, False, cap


def _grad_r(z, r):
    """Gradient of ``||z||_r`` w.r.t. (Re z, Im z), packed as a complex array."""
    a = np.abs(z)
    nz = np.linalg.norm(z, r) if not math.isinf(r) else a.max()
    if nz == 0:
        return np.zeros_like(z)
    phase = np.where(a > 0, z / np.where(a > 0, a, 1), 0)
    if math.isinf(r):
        g = np.zeros_like(z)
        i = int(np.argmax(a))
        g[i] = phase[i]
        return g
    if r == 1:
        return phase
    return phase * (a / nz) ** (r - 1)


def _ascent(A, p, q, x0, tol, max_iter=2000):
    """Normalized-gradient ascent of ``||A x||_q`` on the ``l^p`` unit sphere."""
    def value(x):
        return np.linalg.norm(A @ x, q) / np.linalg.norm(x, p)

    x = x0 / np.linalg.norm(x0, p)
    f = value(x)
    step = 0.5
    for _ in range(max_iter):
        y = A @ x
        ny = np.linalg.norm(y, q)
        if ny == 0:
            return f, x
        g = A.conj().T @ _grad_r(y, q) / ny - _grad_r(x, p)
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        g = g / gn
        if not np.iscomplexobj(A) and not np.iscomplexobj(x0):
            g = g.real
        improved = False
        while step > 1e-14:
            xn = x + step * g
            xn = xn / np.linalg.norm(xn, p)
            fn = value(xn)
            if fn > f:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        gain = (fn - f) / max(f, 1e-300)
        x, f = xn, fn
        step = min(step * 1.5, 1.0)
        if gain < tol * 1e-3:
            break
    return f, x


def _opaque_ascent(T, x0, tol):
    from scipy.optimize import minimize

    def neg(x):
        nx = eval_norm(T.source, x)
        if nx == 0:
            return 0.0
        return -eval_norm(T.target, T.matrix @ x) / nx

    res = minimize(neg, x0, method="Powell", options={"xtol": tol, "ftol": 1e-14, "maxiter": 20000})
    return -float(res.fun), res.x


def _equivalence_upper(A, p, q):
    m, n = A.shape
    col = np.linalg.norm(A, ord=q, axis=0).max() if not math.isinf(q) else np.abs(A).max()
    row = _row_norms(A, conjugate_exponent(p)).max()
    via_one = col * n ** (1 - 1 / p if not math.isinf(p) else 1.0)
    via_inf = row * (m ** (1 / q) if not math.isinf(q) else 1.0)
    return float(min(via_one, via_inf))


def operator_norm(T, tol=1e-8, seed=0, samples=2000, starts=MULTISTART):
    """``||T|| = sup ||T x||`` over the source unit ball.

    The result records the estimates of the sup over the closed ball, the
    sphere and the open ball (via ``(1 - tol)`` scaling) in ``variants``.
    """
    if not tol > 0:
        raise UsageError("tol must be positive")
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(T.matrix)
    m, n = T.shape
    notes = []
    upper = None

    if not np.any(T.matrix):
        w = _unit(np.eye(n)[0].astype(T.matrix.dtype), T.source)
        return _finish(T, 0.0, "closed-form", w, 0.0, tol, rng, samples, notes)

    reduced = _reduce(T)
    method = None
    if reduced is not None:
        A, p, q, back = reduced
        if p == 1:
            cols = np.linalg.norm(A, ord=q, axis=0) if not math.isinf(q) else np.abs(A).max(axis=0)
            j = int(np.argmax(cols))
            value, method = float(cols[j]), "closed-form"
            witness = back(np.eye(n, dtype=A.dtype)[j])
            upper = value
        elif math.isinf(q):
            rows = _row_norms(A, conjugate_exponent(p))
            i = int(np.argmax(rows))
            value, method = float(rows[i]), "closed-form"
            witness = back(_norming_vector(A[i], p))
            upper = value
        elif p == 2 and q == 2:
            value, x, converged, its = _power_iteration(A, rng)
            upper = float(min(np.linalg.norm(A, "fro"),
                              math.sqrt(np.abs(A).sum(axis=0).max() * np.abs(A).sum(axis=1).max())))
            if converged:
                method, witness = "power-iteration", back(x)
            else:
                notes.append(f"power iteration did not converge in {its} iterations")
                logger.warning("power iteration nonconvergent; falling back to multistart")
                method = "multistart-ascent"
        elif math.isinf(p) and not complex_ and n <= VERTEX_ENUM_MAX_DIM:
            # a convex function on the cube peaks at a vertex
            signs = 1.0 - 2.0 * ((np.arange(2**n)[:, None] >> np.arange(n)) & 1)
            vals = np.linalg.norm(signs @ A.T, ord=q, axis=1)
            k = int(np.argmax(vals))
            value, method = float(vals[k]), "vertex-enumeration"
            witness = back(signs[k])
            upper = value

        if method is None or method == "multistart-ascent":
            upper = _equivalence_upper(A, p, q) if upper is None else upper
            best_val, best_x = -1.0, None
            S = sample_unit_vectors(p_norm(p, n), samples, "on-sphere", int(rng.integers(2**62)), complex_)
            sv = np.linalg.norm(S @ A.T, ord=q, axis=1) if not math.isinf(q) else np.abs(S @ A.T).max(axis=1)
            order = np.argsort(-sv)
            inits = [S[i] for i in order[: max(1, starts // 2)]]
            while len(inits) < starts:
                z = rng.standard_normal(n) + (1j * rng.standard_normal(n) if complex_ else 0)
                inits.append(z)
            for x0 in inits:
                f, x = _ascent(A, p, q, x0, tol)
                if f > best_val:
                    best_val, best_x = f, x
            if sv[order[0]] > best_val:
                best_val, best_x = float(sv[order[0]]), S[order[0]]
            value, witness = float(best_val), back(best_x)
            method = "multistart-ascent"
            notes.append("general (p, q): value is a lower bound, not certified")
    else:
        S = sample_unit_vectors(T.source, samples, "on-sphere", int(rng.integers(2**62)), complex_)
        sv = T.target.eval_rows(S @ T.matrix.T)
        order = np.argsort(-sv)
        value, witness = float(sv[order[0]]), S[order[0]]
        method = "sampling"
        if not complex_:
            for i in order[: min(starts, samples)]:
                f, x = _opaque_ascent(T, S[i].real, tol)
                if f > value:
                    value, witness, method = f, x, "multistart-ascent"
        notes.append("opaque norm: value is a lower bound, not certified")

    witness = _unit(np.asarray(witness), T.source)
    res = _finish(T, value, method, witness, upper, tol, rng, samples, notes)
    return res


def _finish(T, value, method, witness, upper, tol, rng, samples, notes):
    Tw = eval_norm(T.target, T.matrix @ witness)
    if method in ("multistart-ascent", "sampling"):
        # the witness itself defines the reported lower bound
        value = Tw / eval_norm(T.source, witness)
    certified_lower = min(Tw, value)
    complex_ = np.iscomplexobj(T.matrix)
    B = sample_unit_vectors(T.source, samples, "in-ball", int(rng.integers(2**62)), complex_)
    ball = max(value, float(T.target.eval_rows(B @ T.matrix.T).max()))
    sphere = value
    open_ball = eval_norm(T.target, T.matrix @ ((1 - tol) * witness))
    variants = {"closed_ball": ball, "sphere": sphere, "open_ball": open_ball}
    spread = max(variants.values()) - min(variants.values())
    # the open-ball estimate sits a factor (1 - tol) below the sphere by construction
    variants["agree"] = bool(spread <= tol * max(1.0, value) * (1 + 1e-6))
    return OperatorNormResult(value=float(value), method=method, witness=witness,
                              certified_lower=float(certified_lower),
                              upper_bound=None if upper is None else float(upper),
                              variants=variants, notes=notes)


@dataclass
class ContinuityCertificate:
    bound_M: float
    violations: list
    samples: int

    @property
    def certified(self):
        return not self.violations


def _fuzz_vectors(n, samples, rng, complex_):
    X = rng.standard_normal((samples, n))
    if complex_:
        X = X + 1j * rng.standard_normal((samples, n))
    return X * 10.0 ** rng.uniform(-3, 3, (samples, 1))


def continuity_certificate(T, samples=10_000, seed=0, tol=1e-8, norm_result=None):
    """Check ``||T x|| <= M ||x||`` on samples with ``M = ||T||``."""
    if samples < 1:
        raise UsageError("samples must be >= 1")
    res = norm_result or operator_norm(T, tol=tol, seed=seed)
    M = res.value
    rng = np.random.default_rng([seed, 1])
    X = _fuzz_vectors(T.source.dim, samples, rng, np.iscomplexobj(T.matrix))
    lhs = T.target.eval_rows(X @ T.matrix.T)
    rhs = M * T.source.eval_rows(X) * (1 + 1e-9)
    bad = np.flatnonzero(~(lhs <= rhs))
    return ContinuityCertificate(bound_M=M, violations=[X[i] for i in bad], samples=samples)


@dataclass
class IsometryReport:
    isometry: bool
    norm_preserved: bool
    distances_preserved: bool
    injective: bool
    rank: int
    operator_norm: Optional[float]
    counterexample: Optional[np.ndarray]
    max_defect: float


def isometry_test(T, samples=1000, seed=0, tol=1e-8):
    """Sampled check of ``||T x|| = ||x||``; standard basis vectors are tried first."""
    if samples < 1:
        raise UsageError("samples must be >= 1")
    m, n = T.shape
    if m < n:
        raise DimensionError("an isometry K^n -> K^m needs m >= n")
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(T.matrix)
    E = np.eye(n)
    E = E / T.source.eval_rows(E)[:, None]
    X = np.vstack([E, sample_unit_vectors(T.source, samples, "on-sphere", int(rng.integers(2**62)), complex_)])
    defect = np.abs(T.target.eval_rows(X @ T.matrix.T) - T.source.eval_rows(X))
    bad = np.flatnonzero(defect > 1e-10)
    counter = X[bad[0]] if bad.size else None

    P = sample_unit_vectors(T.source, samples, "on-sphere", int(rng.integers(2**62)), complex_)
    Q = sample_unit_vectors(T.source, samples, "on-sphere", int(rng.integers(2**62)), complex_)
    D = P - Q
    ddef = np.abs(T.target.eval_rows(D @ T.matrix.T) - T.source.eval_rows(D))
    dist_ok = bool(np.all(ddef <= 1e-10))
    if counter is None and not dist_ok:
        counter = D[int(np.argmax(ddef))]

    rank = int(np.linalg.matrix_rank(T.matrix))
    iso = counter is None
    opn = operator_norm(T, tol=tol, seed=seed).value if iso else None
    return IsometryReport(isometry=iso, norm_preserved=not bad.size, distances_preserved=dist_ok,
                          injective=rank == n, rank=rank, operator_norm=opn,
                          counterexample=counter, max_defect=float(max(defect.max(), ddef.max())))


def _matrix_from_json(rows):
    from .core import vector_from_json

    if not isinstance(rows, list) or not rows:
        raise UsageError("matrix must be a nonempty array of rows")
    vecs = [vector_from_json(r) for r in rows]
    if len({v.size for v in vecs}) != 1:
        raise UsageError("matrix rows have different lengths")
    dtype = complex if any(np.iscomplexobj(v) for v in vecs) else float
    return np.array(vecs, dtype=dtype)


def operator_from_json(data):
    try:
        A = _matrix_from_json(data["matrix"])
        m, n = A.shape
        source = norm_from_json({"dim": n, **data.get("source", {"kind": "p", "p": 2})})
        target = norm_from_json({"dim": m, **data.get("target", {"kind": "p", "p": 2})})
    except KeyError as exc:
        raise UsageError(f"operator JSON missing field {exc}") from None
    return LinearOperator(A, source, target)


def operator_to_json(T):
    from .core import vector_to_json

    return {"matrix": [vector_to_json(r) for r in T.matrix],
            "source": norm_to_json(T.source), "target": norm_to_json(T.target)}
