"""Affine Poisson transversals ``X = lambda + L`` in the dual of a Lie algebra.

Coordinates used throughout:

* ``y in R^k``: affine coordinates on X, ``mu = lambda + L y``;
* ``a in R^(n-k)``: coefficients in the stored basis of the conormal
  fibre ``L°`` (a subspace of g).

The conormal chart identifies ``N*X`` with ``L° x X`` and has coordinates
``e = (a, y)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dirac
from .algebra import LieAlgebra, LinearSubspace, annihilator
from .errors import InputError, MixedBlockNonzero, NotGraph, NotTransversal, PointNotOnX

TRANSVERSAL_TOL = 1e-10
MIXED_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AffineTransversal:
    algebra: LieAlgebra
    base: np.ndarray
    directions: LinearSubspace
    check: bool = True

    def __post_init__(self):
        base = np.array(self.base, dtype=float)
        if base.shape != (self.algebra.n,):
            raise InputError("base point has the wrong length")
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        if self.directions.ambient_dim != self.algebra.n:
            raise InputError("direction space lives in the wrong dimension")
        if (self.algebra.n - self.directions.dim) % 2:
            raise NotTransversal(0.0, "codimension of X is odd, the normal form cannot be nondegenerate")
        object.__setattr__(self, "_conormal", annihilator(self.directions))
        if self.check:
            ok, smin = is_transversal_at(self, base)
            if not ok:
                raise NotTransversal(smin)

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def k(self) -> int:
        return self.directions.dim

    @property
    def L(self) -> np.ndarray:
        return self.directions.basis

    @property
    def Lo(self) -> np.ndarray:
        """Basis of the annihilator of the direction space (a subspace of g)."""
        return self._conormal.basis

    def point(self, y) -> np.ndarray:
        return self.base + self.L @ np.asarray(y, dtype=float)

    def coords(self, mu) -> np.ndarray:
        """Affine coordinates of ``mu``; raises PointNotOnX off the snap tolerance."""
        mu = np.asarray(mu, dtype=float)
        d = mu - self.base
        y, *_ = np.linalg.lstsq(self.L, d, rcond=None) if self.k else (np.zeros(0),)
        off = float(np.linalg.norm(d - self.L @ y))
        if off > 1e-9 * (1.0 + float(np.linalg.norm(self.base))):
            raise PointNotOnX(f"point is {off:.3e} away from X")
        return y


def transversal(algebra, base, directions, check=True) -> AffineTransversal:
    d = np.asarray(directions, dtype=float)
    if d.ndim == 1:
        d = d.reshape(-1, 1) if d.size else np.zeros((algebra.n, 0))
    return AffineTransversal(algebra, np.asarray(base, dtype=float), LinearSubspace(algebra.n, d), check)


def transversality_criteria(T: AffineTransversal, mu, tol=TRANSVERSAL_TOL):
    """Both transversality tests at ``mu``: ``(form_ok, sum_ok, min_sv)``.

    ``form_ok``: ``mu o [.,.]`` is nondegenerate on ``L°``.
    ``sum_ok``: ``g* = L + L°.mu``.
    """
    mu = np.asarray(mu, dtype=float)
    T.coords(mu)
    Lo = T.Lo
    P = T.algebra.poisson_matrix(mu)
    B = Lo.T @ P @ Lo
    if B.size == 0:
        return True, True, float("inf")
    s = np.linalg.svd(B, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(P))))
    form_ok = bool(s[-1] > tol * scale)
    frame = np.hstack([T.L, P @ Lo])
    sv = np.linalg.svd(frame, compute_uv=False)
    sum_ok = bool(sv[-1] > tol * max(1.0, float(sv[0])))
    return form_ok, sum_ok, float(s[-1])


def is_transversal_at(T: AffineTransversal, mu, tol=TRANSVERSAL_TOL):
    """``(ok, min_singular_value)``; ``ok`` requires both criteria to hold."""
    form_ok, sum_ok, smin = transversality_criteria(T, mu, tol)
    return form_ok and sum_ok, smin


@dataclass(frozen=True)
class SplitBivector:
    tangential: np.ndarray  # k x k, in y-coordinates
    normal: np.ndarray  # (n-k) x (n-k), in the frame P(mu) Lo
    frame: np.ndarray  # n x n, columns (L | P(mu) Lo)
    mixed_error: float

    def reassembled(self) -> np.ndarray:
        k = self.tangential.shape[0]
        n = self.frame.shape[0]
        blk = np.zeros((n, n))
        blk[:k, :k] = self.tangential
        blk[k:, k:] = self.normal
        return self.frame @ blk @ self.frame.T


def split_at(T: AffineTransversal, mu, tol=MIXED_TOL) -> SplitBivector:
    """Split ``pi_g(mu)`` into its part tangent to X and its part on the
    embedded normal space ``pi^#(L°)``."""
    ok, smin = is_transversal_at(T, mu)
    if not ok:
        raise NotTransversal(smin)
    P = T.algebra.poisson_matrix(mu)
    frame = np.hstack([T.L, P @ T.Lo])
    Fi = np.linalg.inv(frame)
    Q = Fi @ P @ Fi.T
    k = T.k
    mixed = float(np.max(np.abs(Q[:k, k:]))) if Q[:k, k:].size else 0.0
    scale = max(1.0, float(np.max(np.abs(Q))))
    if mixed > tol * scale:
        raise MixedBlockNonzero(f"mixed block {mixed:.3e}")
    tang = Q[:k, :k]
    norm = Q[k:, k:]
    return SplitBivector(0.5 * (tang - tang.T), 0.5 * (norm - norm.T), frame, mixed)


def tangential_bivector(T: AffineTransversal, y) -> np.ndarray:
    return split_at(T, T.point(y)).tangential


@dataclass(frozen=True, eq=False)
class ConormalChart:
    """Chart ``(a, y) -> (Lo a, lambda + L y)`` of ``N*X`` inside ``g x g*``."""

    transversal: AffineTransversal

    @property
    def dim(self) -> int:
        return self.transversal.n

    @property
    def fibre_dim(self) -> int:
        return self.transversal.n - self.transversal.k

    def split(self, e):
        e = np.asarray(e, dtype=float)
        r = self.fibre_dim
        return e[:r], e[r:]

    def embed(self, e):
        a, y = self.split(e)
        T = self.transversal
        return T.Lo @ a, T.point(y)

    def projection(self, e) -> np.ndarray:
        """``p(e)`` as a point of g*."""
        return self.embed(e)[1]

    def projection_coords(self, e) -> np.ndarray:
        return self.split(e)[1]

    @property
    def tangent_embedding(self) -> np.ndarray:
        """Constant ``2n x n`` matrix carrying chart tangents into ``g x g*``."""
        T = self.transversal
        n, r = T.n, self.fibre_dim
        E = np.zeros((2 * n, n))
        E[:n, :r] = T.Lo
        E[n:, r:] = T.L
        return E

    @property
    def dp(self) -> np.ndarray:
        r, k = self.fibre_dim, self.transversal.k
        return np.hstack([np.zeros((k, r)), np.eye(k)])

    def zero_section(self, y) -> np.ndarray:
        return np.concatenate([np.zeros(self.fibre_dim), np.asarray(y, dtype=float)])


def conormal_chart(T: AffineTransversal) -> ConormalChart:
    return ConormalChart(T)


def local_model(T: AffineTransversal, sigma, e) -> np.ndarray:
    """The local model bivector at chart point ``e``: pull the graph of the
    tangential structure back along ``p``, gauge by ``sigma(e)``, read off the
    bivector. Raises NotGraph where the result is not a Poisson bivector."""
    chart = conormal_chart(T)
    _, y = chart.split(e)
    piX = tangential_bivector(T, y)
    L = dirac.backward_image(chart.dp, dirac.graph_of_bivector(piX))
    s = sigma(e) if callable(sigma) else np.asarray(sigma, dtype=float)
    return dirac.as_bivector(dirac.gauge(L, s))


def local_model_or_none(T, sigma, e):
    try:
        return local_model(T, sigma, e)
    except NotGraph:
        return None


def transversal_from_json(algebra: LieAlgebra, data, check=True) -> AffineTransversal:
    try:
        base = np.array(data["lambda"], dtype=float)
        dirs = np.array(data.get("directions", []), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed transversal JSON: {exc}") from exc
    # directions are given as a list of vectors
    D = dirs.T if dirs.size else np.zeros((algebra.n, 0))
    if D.shape[0] != algebra.n:
        raise InputError("direction vectors have the wrong length")
    return transversal(algebra, base, D, check)


def load_transversal(algebra, path, check=True) -> AffineTransversal:
    return transversal_from_json(algebra, json.loads(Path(path).read_text()), check)
