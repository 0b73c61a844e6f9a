"""Convex solvers shared by the equivalence, Hahn-Banach and bilinear modules.

Every problem here is "linear term plus a norm of an affine map".  Norms of
the form ``||W x||_r`` dispatch on ``r``: r in {1, inf} becomes a linear
program (HiGHS, solved to vertex precision), 1 < r < inf is smooth away from
zero and goes to L-BFGS-B with an analytic gradient.  Opaque (custom) norms
fall back to Powell's derivative-free method.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize

from .errors import SolverFailure

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}
_MAX_RADIUS = 2.0**48


def _psi(z, r):
    """Gradient of ``||z||_r`` (real z, 1 < r < inf)."""
    nz = np.linalg.norm(z, r)
    if nz == 0:
        return np.zeros_like(z)
    a = np.abs(z) / nz
    return np.sign(z) * a ** (r - 1)


def _affine_form(norm, A, d):
    form = norm.linear_form()
    if form is None:
        return None
    W, r = form
    if W is None:
        return A, d, r
    return W @ A, W @ d, r


def _lp_lin_plus_norm(lin, scale, M, e, r, bounds):
    m, k = M.shape
    box = bounds if bounds is not None else [(None, None)] * k
    if math.isinf(r):
        c = np.concatenate([lin, [scale]])
        ones = np.ones((m, 1))
        A_ub = np.block([[M, -ones], [-M, -ones]])
        b_ub = np.concatenate([-e, e])
        bnds = list(box) + [(0, None)]
    else:
        c = np.concatenate([lin, np.full(m, scale)])
        eye = np.eye(m)
        A_ub = np.block([[M, -eye], [-M, -eye]])
        b_ub = np.concatenate([-e, e])
        bnds = list(box) + [(0, None)] * m
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bnds, method="highs", options=_LP_OPTIONS)
    if res.status == 3:
        raise SolverFailure("objective unbounded below")
    if res.status != 0:
        raise SolverFailure(f"linear program failed: {res.message}")
    return res.x[:k]


def _smooth_solve(fun, jac, x0, bounds, tol):
    res = minimize(fun, x0, jac=jac, method="L-BFGS-B", bounds=bounds,
                   options={"maxiter": 5000, "ftol": 1e-15, "gtol": min(tol, 1e-10) * 1e-2,
                            "maxcor": 30})
    return res.x, float(res.fun)


def minimize_lin_plus_norm(lin, scale, A, d, norm, tol=1e-8, bounds=None, seed=0, starts=4):
    """Minimize ``lin.t + scale*||A t + d||`` over real ``t``.

    ``bounds`` is an optional list of ``(lo, hi)`` per coordinate.  Without
    bounds the search runs in a box whose radius doubles until the box stops
    being active or a doubling improves the value by less than ``tol``.
    Returns ``(value, t)`` with ``value`` re-evaluated exactly at ``t``.
    """
    lin = np.asarray(lin, dtype=float)
    A = np.asarray(A, dtype=float)
    d = np.asarray(d, dtype=float)
    k = lin.size

    def objective(t):
        return float(lin @ t + scale * norm.eval_rows((A @ t + d)[None, :])[0])

    if k == 0:
        return objective(np.zeros(0)), np.zeros(0)

    form = _affine_form(norm, A, d)
    if form is not None and form[2] in (1.0, math.inf):
        M, e, r = form
        t = _lp_lin_plus_norm(lin, scale, M, e, r, bounds)
        return objective(t), t

    rng = np.random.default_rng(seed)
    if form is not None:
        M, e, r = form

        def fun(t):
            return lin @ t + scale * np.linalg.norm(M @ t + e, r)

        def jac(t):
            return lin + scale * (M.T @ _psi(M @ t + e, r))
    else:
        fun, jac = objective, None

    def solve_in(box, x0s):
        best = None
        for x0 in x0s:
            if jac is None:
                res = minimize(fun, x0, method="Powell", bounds=box,
                               options={"xtol": tol * 1e-2, "ftol": 1e-15, "maxiter": 20000})
                t, val = res.x, float(res.fun)
            else:
                t, val = _smooth_solve(fun, jac, x0, box, tol)
            if best is None or val < best[0]:
                best = (val, t)
        return best

    if bounds is not None:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
        x0s = [np.clip(np.zeros(k), lo, hi)] + [rng.uniform(lo, hi) for _ in range(starts - 1)]
        val, t = solve_in(bounds, x0s)
        return objective(t), t

    # rounding error of one objective evaluation per unit of radius; past the
    # radius where it exceeds tol, "improvements" are cancellation noise
    noise_rate = 1e-14 * (np.abs(lin).sum() + scale * np.abs(A).sum())
    R = 1.0
    x0s = [np.zeros(k)] + [rng.uniform(-R, R, k) for _ in range(starts - 1)]
    val, t = solve_in([(-R, R)] * k, x0s)
    while R < _MAX_RADIUS:
        if np.max(np.abs(t)) < R * (1 - 1e-6):
            break
        if 2 * R * noise_rate > 0.1 * tol * max(1.0, abs(val)):
            break
        R *= 2.0
        new_val, new_t = solve_in([(-R, R)] * k, [t, 2 * t])
        improvement = val - new_val
        if new_val < val:
            val, t = new_val, new_t
        if improvement < tol * max(1.0, abs(val)):
            break
    return objective(t), t


def max_functional_on_subspace(v, B, norm, tol=1e-8, seed=0):
    """``sup { v.t : ||B t|| <= 1 }`` for real ``v`` and injective ``B``.

    Returns ``(value, t)`` with ``||B t|| = 1`` (up to rounding) and
    ``v.t = value``.
    """
    v = np.asarray(v, dtype=float)
    B = np.asarray(B, dtype=float)
    k = v.size
    if not np.any(v):
        t = np.zeros(k)
        t[0] = 1.0
        return 0.0, t / norm.eval_rows((B @ t)[None, :])[0]

    form = _affine_form(norm, B, np.zeros(B.shape[0]))
    if form is not None and form[2] in (1.0, math.inf):
        M, _, r = form
        m = M.shape[0]
        if math.isinf(r):
            c = -v
            A_ub = np.vstack([M, -M])
            b_ub = np.ones(2 * m)
            bnds = [(None, None)] * k
        else:
            c = np.concatenate([-v, np.zeros(m)])
            eye = np.eye(m)
            A_ub = np.block([[M, -eye], [-M, -eye], [np.zeros((1, k)), np.ones((1, m))]])
            b_ub = np.concatenate([np.zeros(2 * m), [1.0]])
            bnds = [(None, None)] * k + [(0, None)] * m
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bnds, method="highs", options=_LP_OPTIONS)
        if res.status != 0:
            raise SolverFailure(f"linear program failed: {res.message}")
        t = res.x[:k]
    else:
        # minimize ||B t|| on the affine hyperplane v.t = 1; the sup is 1/min
        t0 = v / (v @ v)
        Z = null_space(v[None, :])
        if Z.shape[1] == 0:
            t = t0
        else:
            _, s = minimize_lin_plus_norm(np.zeros(Z.shape[1]), 1.0, B @ Z, B @ t0, norm,
                                          tol=tol, seed=seed)
            t = t0 + Z @ s
    nt = norm.eval_rows((B @ t)[None, :])[0]
    t = t / nt
    return float(v @ t), t


def dual_norm_value(norm, u):
    """``sup |<u, x>|`` over the unit ball of ``norm`` (real, opaque norms)."""
    u = np.asarray(u)
    if np.iscomplexobj(u):
        if np.any(u.imag != 0):
            raise SolverFailure("numerical dual norms are real-only")
        u = u.real
    val, _ = max_functional_on_subspace(u, np.eye(norm.dim), norm)
    return val


def norming_vector(z, norm):
    """Unit vector x with ``|sum z_i x_i|`` maximal (equal to the dual norm of z).

    Closed form for p-norms and the basis-zero norm and its dual; numerical
    (real only) for opaque norms.
    """
    z = np.asarray(z)
    a = np.abs(z)
    if not np.any(a):
        x = np.zeros(norm.dim, dtype=z.dtype if np.iscomplexobj(z) else float)
        x[0] = 1.0
        return x / norm.eval_rows(x[None, :])[0]

    def phase(w):
        aw = np.abs(w)
        ph = np.where(aw > 0, np.conj(w) / np.where(aw > 0, aw, 1), 1.0)
        return ph if np.iscomplexobj(w) else ph.real

    def one_hot(w):
        aw = np.abs(w)
        j = int(np.argmax(aw))
        e = np.zeros(w.size, dtype=phase(w).dtype)
        e[j] = phase(w)[j]
        return e

    if norm.kind == "p" or (norm.kind == "dual" and norm.linear_form() is not None
                            and norm.linear_form()[0] is None):
        p = norm.linear_form()[1]
        if math.isinf(p):
            x = phase(z)
        elif p == 1:
            x = one_hot(z)
        else:
            q = p / (p - 1)
            x = phase(z) * (a / a.max()) ** (q - 1)
    elif norm.kind == "zero":
        # x = B alpha with |alpha_j| <= 1: pair B^T z against alpha
        x = norm.basis @ phase(norm.basis.T @ z)
    elif norm.kind == "dual" and norm.dual_of.kind == "zero":
        B = norm.dual_of.basis
        x = np.linalg.solve(B.T, one_hot(np.linalg.solve(B, z)))
    else:
        if np.iscomplexobj(z) and np.any(z.imag != 0):
            raise SolverFailure("numerical norming vectors are real-only")
        _, x = max_functional_on_subspace(np.real(z), np.eye(norm.dim), norm)
    nx = norm.eval_rows(x[None, :])[0]
    return x / nx
