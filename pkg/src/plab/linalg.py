"""Small dense linear-algebra helpers shared by every module.

Rank decisions use singular values against ``RANK_RTOL`` times the largest
singular value, so results do not depend on the overall scale of the input.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import subspace_angles

from .errors import NonConvergence

RANK_RTOL = 1e-10

_TAYLOR_ORDER = 12


def _threshold(s, rtol):
    if s.size == 0:
        return 0.0
    return (RANK_RTOL if rtol is None else rtol) * max(float(s[0]), 1e-300)


def rank(a, rtol=None) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > _threshold(s, rtol)))


def orth(a, rtol=None) -> np.ndarray:
    """Orthonormal basis (columns) for the column span of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0))
    r = int(np.sum(s > _threshold(s, rtol)))
    return u[:, :r]


def null_space(a, rtol=None) -> np.ndarray:
    """Orthonormal basis (columns) of ``{v : a v = 0}``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, n = a.shape
    if m == 0 or n == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s[0] == 0.0:
        return np.eye(n)
    r = int(np.sum(s > _threshold(s, rtol)))
    return vh[r:].T.copy()


def min_singular_value(a) -> float:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        # empty forms are vacuously nondegenerate
        return math.inf
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def max_principal_angle(a, b) -> float:
    """Largest principal angle between the column spans of ``a`` and ``b``.

    Returns ``pi/2`` when the spans have different dimensions.
    """
    qa, qb = orth(a), orth(b)
    if qa.shape[1] != qb.shape[1]:
        return math.pi / 2
    if qa.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(qa, qb)))


def span_contained(a, b, rtol=None) -> float:
    """Distance measure for ``span(a) ⊆ span(b)``: norm of the residual of
    projecting the orthonormalized columns of ``a`` onto ``span(b)``."""
    qa = orth(a, rtol)
    if qa.shape[1] == 0:
        return 0.0
    qb = orth(b, rtol)
    resid = qa - qb @ (qb.T @ qa)
    return float(np.max(np.abs(resid))) if resid.size else 0.0


def expm(a, tol=1e-15) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring of the order-12 Taylor series.

    Raises NonConvergence when the scaled truncation bound exceeds ``tol`` by
    more than a safety factor or the result is not finite.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("expm needs a square matrix")
    if n == 0:
        return np.zeros((0, 0))
    norm = float(np.max(np.sum(np.abs(a), axis=1)))
    if not math.isfinite(norm):
        raise NonConvergence("non-finite matrix passed to expm")
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    b = a / (2.0**squarings)
    bnorm = norm / (2.0**squarings)
    bound = bnorm ** (_TAYLOR_ORDER + 1) / math.factorial(_TAYLOR_ORDER + 1)
    if bound > max(tol, 1e-13):
        raise NonConvergence(f"Taylor truncation bound {bound:.2e} above tolerance")
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, _TAYLOR_ORDER + 1):
        term = term @ b / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    if not np.all(np.isfinite(result)):
        raise NonConvergence("matrix exponential overflowed")
    return result


def phi1(a) -> np.ndarray:
    """``sum_k a^k/(k+1)!`` via the exponential of a 2x2 block matrix."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    big = np.zeros((2 * n, 2 * n))
    big[:n, :n] = a
    big[:n, n:] = np.eye(n)
    return expm(big)[:n, n:]


def expm_frechet(a, e) -> np.ndarray:
    """Directional derivative of ``expm`` at ``a`` along ``e``."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    big = np.zeros((2 * n, 2 * n))
    big[:n, :n] = a
    big[n:, n:] = a
    big[:n, n:] = e
    return expm(big)[:n, n:]


def antisym_error(m) -> float:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m + m.T)))
