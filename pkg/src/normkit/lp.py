"""Truncated l^p sequences with certified tails.

A ``TruncatedSequence`` is an exactly known prefix plus ``tail_bound``, an
upper bound on the l^p norm of everything after the prefix.  Every
infinite-series quantity (norm, pairing, dual action) is then an interval.
Tails add under sums (Minkowski) and multiply under pairings (Hölder).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import conjugate_exponent, modulus_arg, vector_from_json, vector_to_json
from .errors import CauchyError, UsageError

HOLDER_RTOL = 1e-12


def _check_exponent(p):
    p = float(p)
    if math.isnan(p) or p < 1:
        raise UsageError(f"exponent {p} outside [1, inf]")
    return p


def _power_sum_norm(a, p):
    a = np.abs(np.asarray(a))
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1 / p))


def _combine(a, b, p):
    """``||(a, b)||_p`` for two nonnegative reals."""
    if math.isinf(p):
        return max(a, b)
    if b == 0:
        return a
    if a == 0:
        return b
    m = max(a, b)
    return m * ((a / m) ** p + (b / m) ** p) ** (1 / p)


@dataclass(frozen=True, eq=False)
class TruncatedSequence:
    prefix: np.ndarray
    p: float
    tail_bound: float = 0.0
    generator_tag: Optional[str] = None

    def __post_init__(self):
        pre = np.atleast_1d(np.asarray(self.prefix))
        if pre.dtype == object or np.issubdtype(pre.dtype, np.integer):
            pre = pre.astype(complex if pre.dtype == object else float)
        object.__setattr__(self, "prefix", pre)
        object.__setattr__(self, "p", _check_exponent(self.p))
        if not self.tail_bound >= 0:
            raise UsageError("tail_bound must be >= 0")
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    def __len__(self):
        return self.prefix.size

    @property
    def prefix_norm(self):
        return _power_sum_norm(self.prefix, self.p)

    def split(self, n):
        """Same sequence with the prefix cut at ``n``; dropped entries move into the tail."""
        if n >= self.prefix.size:
            return self
        rest = _power_sum_norm(self.prefix[n:], self.p)
        return TruncatedSequence(self.prefix[:n], self.p, _combine(rest, self.tail_bound, self.p),
                                 self.generator_tag)

    def padded(self, n):
        """Zero-pad the prefix to length ``n``; only valid for finitely supported sequences."""
        if n <= self.prefix.size:
            return self
        if self.tail_bound != 0:
            raise UsageError("cannot zero-pad a sequence with a nonzero tail")
        return TruncatedSequence(np.concatenate([self.prefix, np.zeros(n - self.prefix.size, self.prefix.dtype)]),
                                 self.p, 0.0, self.generator_tag)

    def with_exponent(self, p):
        """Reinterpret the same entries in l^p (finite support only)."""
        if self.tail_bound != 0:
            raise UsageError("changing the exponent needs a fresh tail bound")
        return TruncatedSequence(self.prefix, p, 0.0, self.generator_tag)


def finite_sequence(values, p):
    """Finitely supported sequence: the prefix followed by zeros."""
    return TruncatedSequence(np.asarray(values), p, 0.0, None)


def power_sequence(N, s, p):
    """``xi_j = 1/j^s`` for j = 1..N, tail bounded by integral comparison.

    ``sum_{j>N} j^{-sp} <= integral_N^inf x^{-sp} dx = N^{1-sp}/(sp-1)``;
    needs ``s*p > 1`` (for p = inf the tail sup is ``(N+1)^{-s}``).
    """
    p = _check_exponent(p)
    if N < 1 or s <= 0:
        raise UsageError("need N >= 1 and s > 0")
    j = np.arange(1, N + 1, dtype=float)
    prefix = j ** (-s)
    if math.isinf(p):
        tail = (N + 1.0) ** (-s)
    else:
        if s * p <= 1:
            raise UsageError(f"1/j^{s} is not in l^{p}")
        tail = (N ** (1 - s * p) / (s * p - 1)) ** (1 / p)
    tag = "1/j" if s == 1 else f"1/j^{s:g}"
    return TruncatedSequence(prefix, p, tail, tag)


_GEN = re.compile(r"^1/j(?:\^([0-9.]+))?$")


def sequence_from_json(data):
    try:
        p = data["p"]
    except (KeyError, TypeError):
        raise UsageError("sequence JSON needs 'p'") from None
    p = math.inf if p in ("inf", "Infinity") else float(p)
    gen = data.get("generator")
    if gen:
        m = _GEN.match(gen.replace(" ", ""))
        if not m:
            raise UsageError(f"unknown generator {gen!r}")
        s = float(m.group(1) or 1)
        N = int(data.get("length", len(data.get("prefix", [])) or 1000))
        return power_sequence(N, s, p)
    prefix = vector_from_json(data["prefix"])
    return TruncatedSequence(prefix, p, float(data.get("tail_bound", 0.0)), None)


def sequence_to_json(x):
    return {"p": "inf" if math.isinf(x.p) else x.p, "prefix": vector_to_json(x.prefix),
            "tail_bound": x.tail_bound, "generator": x.generator_tag}


def lp_norm(x):
    """Interval ``[lower, upper]`` containing ``||x||_p``."""
    lower = x.prefix_norm
    if x.tail_bound == 0:
        return lower, lower
    return lower, max(lower, _combine(lower, x.tail_bound, x.p))


def align(x, y):
    """Bring two sequences to a common prefix length.

    The shorter one is zero-padded when its tail is zero; otherwise the
    longer one is cut and the cut entries move into its tail bound.
    """
    n, m = len(x), len(y)
    if n == m:
        return x, y
    short, long_ = (x, y) if n < m else (y, x)
    if short.tail_bound == 0:
        short = short.padded(len(long_))
    else:
        long_ = long_.split(len(short))
    return (short, long_) if n < m else (long_, short)


@dataclass(frozen=True)
class ConjugatePair:
    p: float
    q: float

    def __post_init__(self):
        p, q = _check_exponent(self.p), _check_exponent(self.q)
        if math.isinf(p) or math.isinf(q):
            ok = {p, q} == {1.0, math.inf}
        else:
            ok = abs(1 / p + 1 / q - 1) <= 1e-12
        if not ok:
            raise UsageError(f"{p} and {q} are not conjugate exponents")

    @classmethod
    def of(cls, p):
        return cls(float(p), conjugate_exponent(p))

    @property
    def extension(self):
        """True for the (1, inf) pairing, outside the open-interval dual theorem."""
        return math.isinf(self.p) or math.isinf(self.q)


@dataclass
class PairingReport:
    pairing: tuple
    bound: float
    slack: float
    holds: bool
    normalized_x: np.ndarray
    normalized_y: np.ndarray
    power_sums: tuple
    young_holds: bool
    extension: bool


def _normalize(x):
    nx = x.prefix_norm
    return x.prefix / nx if nx > 0 else x.prefix.copy()


def _power_sum(a, p):
    a = np.abs(a)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float(np.sum(a**p))


def holder_pairing(x, y, pair=None):
    """Certify ``sum |xi_j eta_j| <= ||x||_p ||y||_q``.

    The pairing is an interval: prefix sum over the aligned prefix, plus the
    product of the two tail bounds (Hölder applied to the tails).
    """
    pair = pair or ConjugatePair(x.p, y.p)
    if not (math.isclose(x.p, pair.p, rel_tol=1e-12) and math.isclose(y.p, pair.q, rel_tol=1e-12)):
        raise UsageError(f"exponents ({x.p}, {y.p}) do not match the pair ({pair.p}, {pair.q})")
    xa, ya = align(x, y)
    s = float(np.sum(np.abs(xa.prefix * ya.prefix)))
    pairing = (s, s + xa.tail_bound * ya.tail_bound)
    bound = lp_norm(x)[1] * lp_norm(y)[1]
    holds = pairing[1] <= bound * (1 + HOLDER_RTOL)

    xb, yb = _normalize(xa), _normalize(ya)
    sums = (_power_sum(xb, pair.p), _power_sum(yb, pair.q))
    ax, ay = np.abs(xb), np.abs(yb)
    prod = ax * ay
    if pair.extension:
        lhs_bound = (ax if math.isinf(pair.q) else ay)
    else:
        lhs_bound = ax**pair.p / pair.p + ay**pair.q / pair.q
    young = bool(np.all(prod <= lhs_bound * (1 + HOLDER_RTOL) + 1e-300))
    return PairingReport(pairing=pairing, bound=bound, slack=bound - pairing[1], holds=bool(holds),
                         normalized_x=xb, normalized_y=yb, power_sums=sums, young_holds=young,
                         extension=pair.extension)


@dataclass
class InequalityReport:
    lhs: tuple
    rhs: float
    slack: float
    holds: bool
    sum_sequence: TruncatedSequence


def add(x, y):
    if x.p != y.p:
        raise UsageError("cannot add sequences from different l^p")
    xa, ya = align(x, y)
    return TruncatedSequence(xa.prefix + ya.prefix, x.p, xa.tail_bound + ya.tail_bound)


def minkowski_verify(x, y):
    """Certify ``||x + y||_p <= ||x||_p + ||y||_p`` on the interval upper ends."""
    s = add(x, y)
    lhs = lp_norm(s)
    rhs = lp_norm(x)[1] + lp_norm(y)[1]
    return InequalityReport(lhs=lhs, rhs=rhs, slack=rhs - lhs[1],
                            holds=bool(lhs[1] <= rhs * (1 + HOLDER_RTOL)), sum_sequence=s)


@dataclass(frozen=True)
class DualFunctional:
    """``phi_f(x) = sum alpha_n xi_n`` for ``f = (alpha_n)`` in l^q."""

    coeffs: TruncatedSequence

    @property
    def q(self):
        return self.coeffs.p

    @property
    def p(self):
        return conjugate_exponent(self.q)


@dataclass(frozen=True)
class Enclosure:
    """Closed disc ``{z : |z - center| <= radius}``."""

    center: complex
    radius: float

    @property
    def lower(self):
        return float(np.real(self.center)) - self.radius

    @property
    def upper(self):
        return float(np.real(self.center)) + self.radius

    def contains(self, z, atol=0.0):
        return abs(complex(z) - complex(self.center)) <= self.radius + atol


def dual_apply(f, x):
    """Enclosure of ``sum alpha_n xi_n``; the radius is Hölder on the tails."""
    ConjugatePair(x.p, f.q)
    fa, xa = align(f.coeffs, x)
    center = complex(np.sum(fa.prefix * xa.prefix))
    if center.imag == 0:
        center = center.real
    return Enclosure(center, fa.tail_bound * xa.tail_bound)


@dataclass
class NormingWitness:
    entries: np.ndarray
    m: int

    def as_sequence(self, p):
        return finite_sequence(self.entries, p)


def norming_witness(f, m):
    """``beta_k = |alpha_k|^{q-1} e^{-i theta_k}`` for k <= m.

    Then ``phi_f(beta) / ||beta||_p`` equals the truncated ``||f||_q``
    because ``(q - 1) p = q``.
    """
    alpha = f.coeffs.prefix
    if not 1 <= m <= alpha.size:
        raise UsageError(f"m = {m} outside 1..{alpha.size}")
    a = alpha[:m]
    if not np.any(a):
        raise UsageError("all-zero prefix: no norming witness")
    r, theta = modulus_arg(a)
    # e^{-i theta} as conj(alpha)/|alpha| keeps real inputs exactly real
    phase = np.where(r > 0, np.conj(a) / np.where(r > 0, r, 1.0), 0.0)
    if not np.iscomplexobj(alpha):
        phase = phase.real
    q = f.q
    if math.isinf(q):
        beta = np.zeros_like(phase)
        k = int(np.argmax(r))
        beta[k] = phase[k]
    elif q == 1:
        beta = phase
    else:
        beta = r ** (q - 1) * phase
    return NormingWitness(beta, m)


def witness_ratio(f, w):
    x = w.as_sequence(f.p)
    val = dual_apply(f, x).center
    return abs(val) / x.prefix_norm


@dataclass
class DualNormReport:
    lower: float
    upper: float
    gap: float
    witness_ratio: float
    sampled_lower: float
    truncated_norm: float
    tail_contribution: float


def dual_norm(f, m=None, samples=1000, seed=0):
    """Two-sided estimate of ``||phi_f||``: Hölder above, witness and samples below."""
    alpha = f.coeffs.prefix
    m = alpha.size if m is None else m
    upper = lp_norm(f.coeffs)[1]
    trunc = _power_sum_norm(alpha[:m], f.q)
    ratio = witness_ratio(f, norming_witness(f, m)) if np.any(alpha[:m]) else 0.0
    rng = np.random.default_rng(seed)
    n = alpha.size
    X = rng.standard_normal((samples, n))
    if np.iscomplexobj(alpha):
        X = X + 1j * rng.standard_normal((samples, n))
    nx = np.array([_power_sum_norm(row, f.p) for row in X])
    sampled = float(np.max(np.abs(X @ alpha) / nx)) if samples else 0.0
    lower = max(ratio, sampled)
    tail = _combine(_power_sum_norm(alpha[m:], f.q), f.coeffs.tail_bound, f.q)
    return DualNormReport(lower=lower, upper=upper, gap=upper - lower, witness_ratio=ratio,
                          sampled_lower=sampled, truncated_norm=trunc, tail_contribution=tail)


@dataclass
class LimitReport:
    limit: TruncatedSequence
    distances: np.ndarray
    bounds: np.ndarray
    verified: bool
    coordinate_spread: np.ndarray
    limit_error_bound: float
    notes: list = field(default_factory=list)


def _stack(seqs):
    n = max(len(s) for s in seqs)
    dtype = complex if any(np.iscomplexobj(s.prefix) for s in seqs) else float
    X = np.zeros((len(seqs), n), dtype=dtype)
    for i, s in enumerate(seqs):
        X[i, : len(s)] = s.prefix
    return X


def cauchy_limit(seqs, eps_schedule, tol=1e-10):
    """Column-wise limit of an l^2 Cauchy sequence of finitely supported prefixes.

    ``eps_schedule[k]`` bounds ``||x_k - x_l||_2`` for all ``l >= k``
    (0-based, aligned with ``seqs``).  The candidate limit is the last
    iterate; each coordinate moves by at most the schedule because
    ``|xi_j^m - xi_j^n| <= ||x_m - x_n||_2``.  Raises ``CauchyError`` naming
    the first offending pair.
    """
    if not seqs:
        raise UsageError("need at least one sequence")
    eps = np.asarray(eps_schedule, dtype=float)
    if eps.size != len(seqs):
        raise UsageError("eps_schedule must have one entry per sequence")
    if np.any(eps <= 0) or np.any(np.diff(eps) > 0):
        raise UsageError("eps_schedule must be positive and non-increasing")
    if any(s.p != 2 for s in seqs):
        raise UsageError("Cauchy diagnostics run in l^2")
    X = _stack(seqs)
    sq = np.einsum("ij,ij->i", X.conj(), X).real
    G = (X.conj() @ X.T).real
    D2 = np.maximum(sq[:, None] + sq[None, :] - 2 * G, 0.0)
    M = len(seqs)
    idx = np.arange(M)
    allowed = eps[np.minimum(idx[:, None], idx[None, :])]
    # the Gram form is only a screen; suspicious pairs are recomputed directly
    suspect = np.argwhere(np.triu(np.sqrt(D2) > allowed + 1e-8, 1))
    for m, n in suspect:
        d = float(np.linalg.norm(X[m] - X[n]))
        if d > allowed[m, n] + tol:
            raise CauchyError(int(m), int(n), d, float(allowed[m, n]))

    limit = X[-1]
    dist = np.linalg.norm(X - limit, axis=1)
    verified = bool(np.all(dist <= eps + tol))
    spread = np.abs(X[-2] - X[-1]) if M > 1 else np.zeros(X.shape[1])
    notes = ["coordinate bound |xi_j^m - xi_j^n| <= ||x_m - x_n||_2 used for column limits"]
    return LimitReport(limit=TruncatedSequence(limit, 2.0, 0.0), distances=dist, bounds=eps,
                       verified=verified, coordinate_spread=spread,
                       limit_error_bound=float(eps[-1]), notes=notes)
