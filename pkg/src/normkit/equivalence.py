"""Norm-equivalence constants against the basis-zero norm.

For a basis ``X_1..X_n`` and a norm ``||.||`` the sandwich
``a ||x||_0 <= ||x|| <= b ||x||_0`` holds with ``b = sum ||X_i||`` and
``a = min ||x||`` over ``{x : max |alpha_i| = 1}``.  That sphere is the union
of 2n faces (one coordinate pinned to +-1, the rest in the unit box), and
``||x||`` is convex on each face, so a per-face convex descent is global.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._convex import minimize_lin_plus_norm
from .core import as_real, as_vector, eval_norm
from .errors import InvalidNormError, SingularBasisError, UsageError

PHASES = 32


def _basis_matrix(basis):
    vecs = [as_vector(b) for b in basis]
    if not vecs:
        raise SingularBasisError("empty basis")
    n = vecs[0].size
    if any(v.size != n for v in vecs) or len(vecs) != n:
        raise SingularBasisError(f"{len(vecs)} vectors of differing or wrong length cannot be a basis of K^{n}")
    B = np.column_stack(vecs)
    if np.linalg.matrix_rank(B) < n:
        raise SingularBasisError("basis vectors are linearly dependent")
    return B


def basis_coordinates(basis, x):
    B = _basis_matrix(basis)
    return np.linalg.solve(B, as_vector(x, B.shape[0]))


def basis_zero_norm(basis, x):
    """``max |alpha_i|`` where ``x = sum alpha_i basis_i``."""
    return float(np.abs(basis_coordinates(basis, x)).max())


@dataclass
class EquivalenceConstants:
    a: float
    b: float
    basis: list
    norm: object
    a_witness: np.ndarray
    method_a: str
    basis_norms: list
    face_minima: dict

    def sandwich_violations(self, samples=10_000, seed=0, slack=1e-9):
        """Indices (and vectors) of samples violating ``a||x||_0 <= ||x|| <= b||x||_0``."""
        B = np.column_stack(self.basis)
        rng = np.random.default_rng(seed)
        n = B.shape[0]
        X = rng.standard_normal((samples, n))
        if np.iscomplexobj(B):
            X = X + 1j * rng.standard_normal((samples, n))
        X *= 10.0 ** rng.uniform(-3, 3, (samples, 1))
        zero = np.abs(np.linalg.solve(B, X.T)).max(axis=0)
        nx = self.norm.eval_rows(X)
        low = self.a * zero <= nx * (1 + slack)
        high = nx <= self.b * zero * (1 + slack)
        return [X[i] for i in np.flatnonzero(~(low & high))]


def _refine(fun, alpha, free, lo_step, tol):
    """Pattern search on a shrinking grid; keeps ``alpha[free]`` inside [-1, 1]."""
    best = fun(alpha)
    h = lo_step
    while h >= tol:
        moved = False
        for j in free:
            for s in (h, -h):
                cand = alpha.copy()
                cand[j] = np.clip(cand[j] + s, -1.0, 1.0)
                v = fun(cand)
                if v < best:
                    alpha, best, moved = cand, v, True
        if not moved:
            h /= 2
    return alpha, best


def _real_face(B, norm, i, sign, tol, seed):
    n = B.shape[0]
    others = [j for j in range(n) if j != i]
    _, t = minimize_lin_plus_norm(np.zeros(n - 1), 1.0, B[:, others], sign * B[:, i], norm,
                                  tol=tol, bounds=[(-1.0, 1.0)] * (n - 1), seed=seed)
    alpha = np.zeros(n)
    alpha[i] = sign
    alpha[others] = t

    def fun(al):
        return eval_norm(norm, B @ al)

    if norm.linear_form() is None or norm.linear_form()[1] not in (1.0, float("inf")):
        alpha, _ = _refine(fun, alpha, others, 1e-3, tol)
    return alpha


def _complex_face(B, norm, i, phase, tol, seed):
    """Pinned ``alpha_i = e^{i phase}``, others in the complex unit disc (SLSQP on re/im)."""
    n = B.shape[0]
    others = [j for j in range(n) if j != i]
    k = len(others)
    pinned = np.exp(1j * phase)

    def unpack(z):
        al = np.zeros(n, dtype=complex)
        al[i] = pinned
        al[others] = z[:k] + 1j * z[k:]
        return al

    def fun(z):
        return eval_norm(norm, B @ unpack(z))

    if k == 0:
        return unpack(np.zeros(0))
    cons = [{"type": "ineq", "fun": lambda z, j=j: 1.0 - z[j] ** 2 - z[k + j] ** 2} for j in range(k)]
    rng = np.random.default_rng(seed)
    best = None
    for z0 in [np.zeros(2 * k)] + [rng.uniform(-0.5, 0.5, 2 * k) for _ in range(2)]:
        res = minimize(fun, z0, method="SLSQP", constraints=cons,
                       options={"ftol": min(tol, 1e-10), "maxiter": 500})
        z = res.x
        # project back into the discs in case SLSQP ends marginally outside
        r = np.hypot(z[:k], z[k:])
        scale = np.where(r > 1, 1 / np.where(r > 1, r, 1), 1)
        z = np.concatenate([z[:k] * scale, z[k:] * scale])
        if best is None or fun(z) < best[0]:
            best = (fun(z), z)
    return unpack(best[1])


def equivalence_constants(basis, norm, tol=1e-8, seed=0, complex_=None):
    """Constants ``(a, b)`` with ``a||x||_0 <= ||x|| <= b||x||_0``.

    ``b`` is the closed form ``sum ||basis_i||``; ``a`` is minimized over
    the faces of the basis-zero unit sphere.  Complex mode pins the free
    coordinate's phase to one of 32 angles.
    """
    if not tol > 0:
        raise UsageError("tol must be positive")
    B = _basis_matrix(basis)
    n = B.shape[0]
    if n != norm.dim:
        raise UsageError(f"basis of K^{n} for a norm on K^{norm.dim}")
    if complex_ is None:
        complex_ = np.iscomplexobj(B)
    basis_norms = [eval_norm(norm, B[:, j]) for j in range(n)]
    if min(basis_norms) <= 0:
        raise InvalidNormError("norm vanishes on a basis vector")
    b = float(sum(basis_norms))

    faces = {}
    best = None
    for i in range(n):
        if complex_:
            pins = [("phase", 2 * np.pi * k / PHASES) for k in range(PHASES)]
        else:
            pins = [("sign", 1.0), ("sign", -1.0)]
        for kind, pin in pins:
            if kind == "sign":
                alpha = _real_face(as_real(B, "basis"), norm, i, pin, tol, seed)
            else:
                alpha = _complex_face(B, norm, i, pin, tol, seed)
            x = B @ alpha
            val = eval_norm(norm, x)
            key = f"{i}:{'+' if pin == 1.0 else '-'}" if kind == "sign" else f"{i}:{pin:.6f}"
            faces[key] = val
            if best is None or val < best[0]:
                best = (val, x)
    a, witness = best
    if not a > 0:
        raise InvalidNormError("norm vanishes on a nonzero vector; not a norm")
    return EquivalenceConstants(a=float(a), b=b, basis=[B[:, j] for j in range(n)], norm=norm,
                                a_witness=witness, method_a="convex-descent",
                                basis_norms=basis_norms, face_minima=faces)


def isomorphism_constants(basis, norm, tol=1e-8, seed=0):
    """Constants of ``alpha -> sum alpha_i X_i`` from (K^n, max|.|) onto (E, ||.||).

    Returns ``(m, M)`` with ``m max|alpha| <= ||T alpha|| <= M max|alpha|``
    and ``M = n * max ||X_i||``.
    """
    c = equivalence_constants(basis, norm, tol=tol, seed=seed)
    return c.a, len(c.basis) * max(c.basis_norms)


def grid_lower_constant(basis, norm, resolution=256):
    """Brute-force ``a`` over the real faces with the grid oracle (dims <= 4)."""
    from .oracles import oracle_grid_extremum

    B = _basis_matrix(basis).real
    n = B.shape[0]
    best = np.inf
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for sign in (1.0, -1.0):
            if not others:
                best = min(best, eval_norm(norm, sign * B[:, i]))
                continue

            def objective(T, i=i, sign=sign, others=others):
                X = sign * B[:, i][None, :] + T @ B[:, others].T
                return norm.eval_rows(X)

            val, _ = oracle_grid_extremum(objective, n - 1, resolution, lo=-1.0, hi=1.0, mode="min")
            best = min(best, val)
    return float(best)
