"""Lipschitz constants, regularization, extension, and candidate families.

Real-valued functions on a finite space are plain float vectors indexed like
the space.  All routines treat a pair at pseudo-distance zero as carrying an
infinite difference quotient when the values differ.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .core import FiniteMetricSpace
from .errors import (
    BadWitness,
    BoundExceeded,
    DimensionMismatch,
    NotLipschitzOnSubset,
)

LIP_TOL = 1e-9


def check_function(f, n: int) -> np.ndarray:
    """Validate a value vector against a space of size ``n``."""
    v = np.asarray(f, dtype=float)
    if v.shape != (n,):
        raise DimensionMismatch(f"function must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatch("function values must be finite")
    return v


def lip_constant(f, space: FiniteMetricSpace) -> float:
    """Smallest k with |f(x) - f(y)| <= k d(x,y); inf if a zero-distance
    pair carries different values."""
    v = check_function(f, space.n)
    if space.n == 1:
        return 0.0
    diff = np.abs(v[:, None] - v[None, :])
    d = space.dist
    pos = d > 0.0
    zero_off = ~pos & ~np.eye(space.n, dtype=bool)
    if np.any(diff[zero_off] > 0.0):
        return float("inf")
    if not pos.any():
        return 0.0
    return float(np.max(diff[pos] / d[pos]))


def inf_convolution(f, space: FiniteMetricSpace, k: float) -> np.ndarray:
    """f_k(x) = min_y f(y) + k d(x,y).

    The result is k-Lipschitz, pointwise below f, and fixes any f that is
    already k-Lipschitz.
    """
    v = check_function(f, space.n)
    if k < 0:
        raise ValueError("k must be non-negative")
    return np.min(v[None, :] + k * space.dist, axis=1)


def clamp(f, c: float) -> np.ndarray:
    """Two-sided truncation (f ^ c) v (-c); never increases a Lipschitz
    constant or the sup norm."""
    if c < 0:
        raise ValueError("truncation level must be non-negative")
    return np.clip(np.asarray(f, dtype=float), -c, c)


def mcshane_nearest(f, space: FiniteMetricSpace, ell: float) -> np.ndarray:
    """Sup-norm nearest ell-Lipschitz function: the midpoint of the upper
    and lower McShane envelopes.

    The sup distance achieved equals half the worst constraint violation
    max(0, |f(x) - f(y)| - ell d(x,y)) / 2, which is optimal.
    """
    v = check_function(f, space.n)
    if ell < 0:
        raise ValueError("ell must be non-negative")
    upper = np.min(v[None, :] + ell * space.dist, axis=1)
    lower = np.max(v[None, :] - ell * space.dist, axis=1)
    return (upper + lower) / 2.0


def lipschitz_extension(
    f_on_subset,
    subset: Iterable[int],
    space: FiniteMetricSpace,
    k: float,
    c: float,
) -> np.ndarray:
    """Extend a k-Lipschitz function with |f| <= c from a subset to the
    whole space, preserving both bounds.

    Uses the truncated distance envelope
    ``g -> clamp(min_{s in S} f(s) + k d(g, s), c)``; the restriction to the
    subset equals the input exactly.
    """
    idx = sorted({int(i) for i in subset})
    if not idx:
        raise DimensionMismatch("subset must be non-empty")
    if idx[0] < 0 or idx[-1] >= space.n:
        raise DimensionMismatch("subset indices out of range")
    vals = np.asarray(f_on_subset, dtype=float)
    if vals.shape != (len(idx),):
        raise DimensionMismatch(
            f"expected {len(idx)} values on the subset, got {vals.shape}"
        )
    if not np.all(np.isfinite(vals)):
        raise DimensionMismatch("function values must be finite")
    dsub = space.dist[np.ix_(idx, idx)]
    diff = np.abs(vals[:, None] - vals[None, :])
    if np.any(diff > k * dsub + LIP_TOL):
        raise NotLipschitzOnSubset(f"values are not {k}-Lipschitz on the subset")
    if np.max(np.abs(vals)) > c + LIP_TOL:
        raise BoundExceeded(f"values exceed the bound {c}")
    out = np.min(vals[None, :] + k * space.dist[:, idx], axis=1)
    out = np.clip(out, -c, c)
    # exact restriction, immune to rounding in the envelope minimum
    out[idx] = vals
    return out


class LipschitzApproximation(NamedTuple):
    ell: float
    approximants: list[np.ndarray]


def uniform_lipschitz_approximation(
    family: Sequence, space: FiniteMetricSpace, eps: float, delta: float
) -> LipschitzApproximation:
    """Replace a uniformly equicontinuous family by an ell-Lipschitz,
    ell-bounded family within sup-distance eps.

    ``delta`` is the caller's equicontinuity witness for ``eps``: every pair
    at distance < delta must have value gap <= eps in every member.  With
    ``s`` the sup norm of the (shifted non-negative) family the construction
    uses k = (s + eps) / delta and ell = max(k, s + 1); each member is
    replaced by its inf-convolution at rate k, shifted back.

    Raises
    ------
    BadWitness
        If the witness fails on some pair, or the guarantee is violated.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    funcs = [check_function(f, space.n) for f in family]
    if not funcs:
        return LipschitzApproximation(1.0, [])
    close = space.dist < delta
    for t, v in enumerate(funcs):
        gap = np.abs(v[:, None] - v[None, :])
        if np.any(gap[close] > eps + 1e-12):
            raise BadWitness(
                f"member {t} moves by more than {eps} across a pair closer than {delta}"
            )
    gmin = min(float(v.min()) for v in funcs)
    shift = max(0.0, -gmin)
    s = max(float((v + shift).max()) for v in funcs)
    k = (s + eps) / delta
    ell = max(k, s + 1.0)
    out = []
    for t, v in enumerate(funcs):
        fk = inf_convolution(v + shift, space, k) - shift
        if np.max(np.abs(fk - v)) > eps + 1e-9:
            raise BadWitness(f"approximation guarantee failed on member {t}")
        out.append(fk)
    return LipschitzApproximation(float(ell), out)


class Candidate(NamedTuple):
    """A named 1-Lipschitz function used as an optimization seed."""

    name: str
    values: np.ndarray


def _canonical(v: np.ndarray) -> np.ndarray:
    return v - v.min()


def lip1_candidates(
    space: FiniteMetricSpace, budget: int, seed: int = 0
) -> list[Candidate]:
    """Deterministic family of 1-Lipschitz functions.

    Always contains every single-source distance function; the remaining
    budget is split among two-point tug functions (d(x,.) - d(y,.))/2,
    set-distance functions over sampled subsets, and random vectors
    regularized through :func:`mcshane_nearest`.  Exact duplicates (after
    shifting the minimum to zero) are dropped, so degenerate spaces may
    return fewer than ``budget`` entries.
    """
    n = space.n
    if budget < n:
        raise ValueError(f"budget {budget} is below the space size {n}")
    rng = np.random.default_rng(seed)
    d = space.dist
    diam = space.diameter

    raw: list[Candidate] = [Candidate(f"point:{i}", d[i].copy()) for i in range(n)]
    extra = budget - n
    n_tug = extra // 3
    n_set = (extra - n_tug) // 2
    n_rand = extra - n_tug - n_set

    if n > 1:
        for _ in range(n_tug):
            i, j = rng.choice(n, size=2, replace=False)
            raw.append(Candidate(f"tug:{i}-{j}", (d[int(i)] - d[int(j)]) / 2.0))
        for t in range(n_set):
            size = int(rng.integers(2, max(3, n // 2 + 1)))
            S = rng.choice(n, size=min(size, n), replace=False)
            raw.append(Candidate(f"set:{t}", np.min(d[:, S], axis=1)))
    scale = diam if diam > 0 else 1.0
    for t in range(n_rand):
        noise = rng.normal(0.0, scale, size=n)
        raw.append(Candidate(f"rand:{t}", mcshane_nearest(noise, space, 1.0)))

    out: list[Candidate] = []
    seen: set[bytes] = set()
    for cand in raw:
        v = _canonical(cand.values)
        key = np.round(v, 12).tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append(Candidate(cand.name, v))
        if len(out) >= budget:
            break
    return out
