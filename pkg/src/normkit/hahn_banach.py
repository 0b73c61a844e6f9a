"""Constructive Hahn-Banach extension on (R^n, ||.||).

Real scalars only.  A functional on a subspace M is stored as its values on
a basis of M, so restrictions stay exact: extending never recomputes the
values already fixed.  One step extends from M to M + span{x0} by choosing
``g(x0) = c`` in ``[a, b]`` with

    a = sup_{y in M} (-f(y) - ||f|| ||y + x0||)
    b = inf_{y in M} (-f(y) + ||f|| ||y + x0||)

which makes ``|f(m) + c| <= ||f|| ||m + x0||`` for every m in M.  Full
extension iterates the step over a completion of M's basis; finitely many
steps replace the maximality argument of the infinite-dimensional theorem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._convex import max_functional_on_subspace, minimize_lin_plus_norm
from .core import NormSpec, as_real, eval_norm
from .errors import (
    DimensionError,
    ExtensionDirectionError,
    SeparationError,
    SingularBasisError,
    SolverFailure,
    UsageError,
)

_RANK_RTOL = 1e-10


def _real(x, what):
    try:
        return as_real(x, what)
    except UsageError:
        raise UsageError(f"{what}: Hahn-Banach extension is implemented for real scalars only") from None


@dataclass
class SubspaceFunctional:
    subspace_basis: list
    values: list
    ambient_norm: NormSpec
    subspace_norm_of_f: Optional[float] = None
    steps: list = field(default_factory=list)

    def __post_init__(self):
        self.subspace_basis = [_real(b, "basis vector") for b in self.subspace_basis]
        self.values = [float(v) for v in self.values]
        n = self.ambient_norm.dim
        if not self.subspace_basis:
            raise SingularBasisError("empty subspace basis")
        if any(b.size != n for b in self.subspace_basis):
            raise DimensionError(f"basis vectors must live in R^{n}")
        if len(self.values) != len(self.subspace_basis):
            raise DimensionError("one value per basis vector required")
        B = self.basis_matrix
        if B.shape[1] > n or np.linalg.matrix_rank(B, tol=_RANK_RTOL * max(1.0, np.abs(B).max())) < B.shape[1]:
            raise SingularBasisError("subspace basis is linearly dependent")

    @property
    def basis_matrix(self):
        return np.column_stack(self.subspace_basis)

    @property
    def dim(self):
        return len(self.subspace_basis)

    @property
    def ambient_dim(self):
        return self.ambient_norm.dim

    def coordinates(self, y):
        y = _real(y, "vector")
        B = self.basis_matrix
        t, *_ = np.linalg.lstsq(B, y, rcond=None)
        if np.linalg.norm(B @ t - y) > 1e-9 * max(1.0, np.linalg.norm(y)):
            raise UsageError("vector is not in the subspace")
        return t

    def __call__(self, y):
        y = _real(y, "vector")
        # on a stored basis vector return the stored value: restrictions stay exact
        for b, v in zip(self.subspace_basis, self.values):
            if b.shape == y.shape and np.array_equal(b, y):
                return v
        return float(np.dot(self.coordinates(y), self.values))

    def coefficients(self):
        """A vector u with ``<u, b_i> = values[i]``; unique on the full space."""
        B = self.basis_matrix
        u, *_ = np.linalg.lstsq(B.T, np.asarray(self.values), rcond=None)
        return u


def maximize_functional(f, tol=1e-8, seed=0):
    """``(||f||, y)`` with y in M, ``||y|| = 1`` and ``f(y) = ||f||``."""
    val, t = max_functional_on_subspace(np.asarray(f.values), f.basis_matrix, f.ambient_norm,
                                        tol=tol, seed=seed)
    return val, f.basis_matrix @ t


def functional_subspace_norm(f, tol=1e-8, seed=0):
    """``sup |f(y)|`` over the unit ball of M (caches it on ``f``)."""
    val, _ = maximize_functional(f, tol, seed)
    f.subspace_norm_of_f = val
    return val


@dataclass
class ExtensionStep:
    a: float
    b: float
    c: float
    x0: np.ndarray
    norm_f: float
    norm_g: float
    certified: bool


def _in_span(B, x):
    t, *_ = np.linalg.lstsq(B, x, rcond=None)
    return np.linalg.norm(B @ t - x) <= _RANK_RTOL * max(1.0, np.linalg.norm(x))


def extension_interval(f, x0, tol=1e-8, seed=0):
    """The endpoints ``(a, b)`` of the admissible values of ``g(x0)``."""
    N = f.subspace_norm_of_f if f.subspace_norm_of_f is not None else functional_subspace_norm(f, tol, seed)
    if N == 0:
        return 0.0, 0.0
    B = f.basis_matrix
    v = np.asarray(f.values)
    lo, _ = minimize_lin_plus_norm(v, N, B, x0, f.ambient_norm, tol=tol, seed=seed)
    hi, _ = minimize_lin_plus_norm(-v, N, B, x0, f.ambient_norm, tol=tol, seed=seed)
    return -lo, hi


def one_step_extension(f, x0, tol=1e-8, seed=0, choice="mid"):
    """Extend ``f`` from M to M + span{x0} without increasing its norm.

    ``choice`` picks ``c`` in ``[a, b]``: ``"mid"`` (default), ``"low"`` or
    ``"high"``.  Returns ``(g, step)``.
    """
    x0 = _real(x0, "x0")
    if x0.size != f.ambient_dim:
        raise DimensionError(f"x0 must live in R^{f.ambient_dim}")
    if _in_span(f.basis_matrix, x0):
        raise ExtensionDirectionError("x0 lies in M; nothing to extend along")
    if f.subspace_norm_of_f is None:
        functional_subspace_norm(f, tol, seed)
    N = f.subspace_norm_of_f
    a, b = extension_interval(f, x0, tol, seed)
    if a > b + tol * max(1.0, N):
        raise SolverFailure(f"extension interval empty: a = {a!r} > b = {b!r}")
    c = {"mid": 0.5 * (a + b), "low": min(a, b), "high": max(a, b)}.get(choice)
    if c is None:
        raise UsageError(f"unknown choice {choice!r}")
    g = SubspaceFunctional(f.subspace_basis + [x0], f.values + [c], f.ambient_norm)
    Ng = functional_subspace_norm(g, tol, seed)
    certified = Ng <= N * (1 + tol) + 1e-300 and Ng >= N * (1 - 1e-12)
    return g, ExtensionStep(a=float(a), b=float(b), c=float(c), x0=x0, norm_f=N, norm_g=Ng,
                            certified=bool(certified))


def _completion_order(B, n):
    """Standard basis vectors, greedily farthest (Euclidean) from the growing span."""
    chosen = []
    cur = B
    E = np.eye(n)
    while cur.shape[1] < n:
        Q, _ = np.linalg.qr(cur)
        resid = np.linalg.norm(E - Q @ (Q.T @ E), axis=0)
        k = int(np.argmax(resid))
        chosen.append(k)
        cur = np.column_stack([cur, E[:, k]])
    return chosen


def extend_functional(f, tol=1e-8, seed=0, choice="mid"):
    """Norm-preserving extension of ``f`` to all of R^n (``steps`` records each step)."""
    n = f.ambient_dim
    if f.subspace_norm_of_f is None:
        functional_subspace_norm(f, tol, seed)
    if f.dim == n:
        return SubspaceFunctional(list(f.subspace_basis), list(f.values), f.ambient_norm,
                                  f.subspace_norm_of_f, [])
    g, steps = f, []
    for k in _completion_order(f.basis_matrix, n):
        g, step = one_step_extension(g, np.eye(n)[k], tol, seed, choice)
        steps.append(step)
    g.steps = steps
    return g


def norming_functional(x, norm, tol=1e-8, seed=0):
    """x' with ``<x, x'> = ||x||`` and ``||x'|| = 1``.

    Seeded with ``f(alpha x) = alpha ||x||`` on span{x}, whose norm is 1.
    """
    x = _real(x, "x")
    if not np.any(x):
        raise UsageError("the zero vector has no norming functional")
    f = SubspaceFunctional([x], [eval_norm(norm, x)], norm, subspace_norm_of_f=1.0)
    return extend_functional(f, tol, seed)


def distance_to_subspace(x, subspace_basis, norm, tol=1e-8, seed=0):
    """``(inf_{y in F} ||x - y||, minimizer)``."""
    x = _real(x, "x")
    B = np.column_stack([_real(b, "basis vector") for b in subspace_basis])
    if np.linalg.matrix_rank(B) < B.shape[1]:
        raise SingularBasisError("subspace basis is linearly dependent")
    d, t = minimize_lin_plus_norm(np.zeros(B.shape[1]), 1.0, -B, x, norm, tol=tol, seed=seed)
    return float(d), B @ t


def annihilating_functional(x, subspace_basis, norm, tol=1e-8, seed=0):
    """x' with ``<x, x'> = 1``, x' = 0 on F and ``||x'|| <= 1/d(x, F)``.

    Seeded with ``f(y + alpha x) = alpha`` on F + span{x}; ``|alpha| <=
    ||y + alpha x|| / d(x, F)`` bounds its norm.
    """
    x = _real(x, "x")
    d, _ = distance_to_subspace(x, subspace_basis, norm, tol, seed)
    if d <= tol:
        raise SeparationError(f"d(x, F) = {d:.3g} <= tol: x is in the closure of F, cannot separate")
    basis = [_real(b, "basis vector") for b in subspace_basis] + [x]
    values = [0.0] * (len(basis) - 1) + [1.0]
    f = SubspaceFunctional(basis, values, norm)
    functional_subspace_norm(f, tol, seed)
    F = extend_functional(f, tol, seed)
    F.distance = d
    return F
