"""Independent brute-force oracles.

These share no code path with the solvers they check: the SVD oracle uses a
dense symmetric eigendecomposition, the grid oracle exhaustive evaluation.
They ship with the library so the CLI can emit certified reports.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import UsageError

MAX_GRID_DIM = 4
_CHUNK = 1 << 18


def oracle_svd_sigma_max(matrix):
    """Largest singular value from the full spectrum of the smaller Gram matrix."""
    A = np.asarray(matrix)
    if A.ndim != 2 or A.size == 0:
        raise UsageError("need a nonempty 2-d matrix")
    if not np.all(np.isfinite(A)):
        raise UsageError("matrix has non-finite entries")
    G = A.conj().T @ A if A.shape[1] <= A.shape[0] else A @ A.conj().T
    lam = np.linalg.eigvalsh(G)
    return float(np.sqrt(max(lam[-1], 0.0)))


def oracle_grid_extremum(objective, dim, resolution, lo=-1.0, hi=1.0, mode="min", vectorized=True):
    """Exhaustive extremum of ``objective`` on a regular grid over a box.

    ``resolution`` counts intervals per axis, so the grid has
    ``resolution + 1`` points per axis and doubling the resolution refines
    the previous grid (the reported extremum can only improve).  A
    vectorized objective maps a ``(K, dim)`` array to ``K`` values.
    Returns ``(value, argument)``.
    """
    if resolution < 2:
        raise UsageError("resolution must be >= 2")
    if not 1 <= dim <= MAX_GRID_DIM:
        raise UsageError(f"grid oracle limited to dimensions 1..{MAX_GRID_DIM}, got {dim}")
    if mode not in ("min", "max"):
        raise UsageError("mode must be 'min' or 'max'")
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,))
    axes = [np.linspace(lo[k], hi[k], resolution + 1) for k in range(dim)]
    sign = 1.0 if mode == "min" else -1.0

    best_val, best_arg = np.inf, None
    # iterate over the leading axes, vectorize the rest in chunks
    inner = max(1, min(dim, int(np.log(_CHUNK) / np.log(resolution + 1))))
    outer_axes, inner_axes = axes[: dim - inner], axes[dim - inner:]
    mesh = np.stack(np.meshgrid(*inner_axes, indexing="ij"), axis=-1).reshape(-1, inner)
    for head in itertools.product(*outer_axes):
        pts = np.hstack([np.broadcast_to(np.asarray(head, dtype=float), (mesh.shape[0], len(head))), mesh])
        if vectorized:
            vals = np.asarray(objective(pts), dtype=float)
        else:
            vals = np.array([objective(p) for p in pts], dtype=float)
        k = int(np.argmin(sign * vals))
        if sign * vals[k] < best_val:
            best_val, best_arg = sign * vals[k], pts[k].copy()
    return float(sign * best_val), best_arg
