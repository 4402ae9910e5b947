"""Linear Dirac structures: Lagrangian subspaces of V + V*.

A :class:`DiracSpace` stores ``n`` spanning columns of length ``2n`` split as
(vector part, covector part). Conventions:

* graph of a bivector ``P``: ``{(P a, a)}``;
* graph of a two-form ``w``: ``{(v, w v)}``;
* gauge by ``s``: ``(v, a) -> (v, a + s v)``.

Flipping the covector sign throughout gives the other common convention; all
statements below are invariant under that flip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionDrop, DimensionMismatch, InputError, NotAntisymmetric, NotGraph

ISOTROPY_TOL = 1e-10
ANGLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DiracSpace:
    n: int
    basis: np.ndarray  # (2n, n)

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.shape[0] != 2 * self.n:
            raise DimensionMismatch(f"Dirac basis has {b.shape[0]} rows, expected {2 * self.n}")
        q = linalg.orth(b)
        if q.shape[1] != self.n:
            raise DimensionDrop(f"span has dimension {q.shape[1]}, expected {self.n}")
        q.setflags(write=False)
        object.__setattr__(self, "basis", q)
        err = self.isotropy_error()
        if err > ISOTROPY_TOL:
            raise InputError(f"span is not isotropic (pairing residual {err:.3e})")

    @property
    def vectors(self) -> np.ndarray:
        return self.basis[: self.n]

    @property
    def covectors(self) -> np.ndarray:
        return self.basis[self.n :]

    def isotropy_error(self) -> float:
        V, A = self.vectors, self.covectors
        G = A.T @ V + V.T @ A
        return float(np.max(np.abs(G))) if G.size else 0.0

    def angle_to(self, other: "DiracSpace") -> float:
        return linalg.max_principal_angle(self.basis, other.basis)

    def same_as(self, other: "DiracSpace", tol=ANGLE_TOL) -> bool:
        return self.n == other.n and self.angle_to(other) <= tol

    def contains(self, w, tol=1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        r = w - self.basis @ (self.basis.T @ w)
        return float(np.linalg.norm(r)) <= tol * max(1.0, float(np.linalg.norm(w)))


def _check_antisym(m, name="matrix"):
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[0] != m.shape[1]:
        raise NotAntisymmetric(f"{name} is not square")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if linalg.antisym_error(m) > 1e-12 * scale:
        raise NotAntisymmetric(f"{name} is not antisymmetric")
    return m


def graph_of_bivector(P) -> DiracSpace:
    P = _check_antisym(P, "bivector")
    n = P.shape[0]
    return DiracSpace(n, np.vstack([P, np.eye(n)]))


def graph_of_twoform(w) -> DiracSpace:
    w = _check_antisym(w, "two-form")
    n = w.shape[0]
    return DiracSpace(n, np.vstack([np.eye(n), w]))


def gauge(L: DiracSpace, sigma) -> DiracSpace:
    sigma = _check_antisym(sigma, "gauge form")
    if sigma.shape[0] != L.n:
        raise DimensionMismatch("gauge form dimension does not match Dirac space")
    V, A = L.vectors, L.covectors
    return DiracSpace(L.n, np.vstack([V, A + sigma @ V]))


def backward_image(f, L: DiracSpace) -> DiracSpace:
    """``{(v, f^T b) : (f v, b) in L}`` for ``f: V -> W`` (shape dim W x dim V)."""
    f = np.atleast_2d(np.asarray(f, dtype=float))
    m, n = f.shape
    if m != L.n:
        raise DimensionMismatch(f"map target has dimension {m}, Dirac space lives on {L.n}")
    if n == 0:
        return DiracSpace(0, np.zeros((0, 0)))
    # unknowns (v, c): f v = Lv c
    K = linalg.null_space(np.hstack([f, -L.vectors])) if m else np.eye(n)
    v = K[:n]
    beta = L.covectors @ K[n:] if m else np.zeros((0, K.shape[1]))
    span = np.vstack([v, f.T @ beta])
    q = linalg.orth(span)
    if q.shape[1] < n:
        raise DimensionDrop(f"backward image has dimension {q.shape[1]} < {n}")
    return DiracSpace(n, q)


def forward_image(f, L: DiracSpace) -> DiracSpace:
    """``{(f v, b) : (v, f^T b) in L}`` for ``f: V -> W`` (shape dim W x dim V)."""
    f = np.atleast_2d(np.asarray(f, dtype=float))
    m, n = f.shape
    if n != L.n:
        raise DimensionMismatch(f"map source has dimension {n}, Dirac space lives on {L.n}")
    if m == 0:
        return DiracSpace(0, np.zeros((0, 0)))
    # unknowns (c, b): La c = f^T b
    K = linalg.null_space(np.hstack([L.covectors, -f.T])) if n else np.eye(m)
    c, b = K[: L.n], K[L.n :]
    span = np.vstack([f @ (L.vectors @ c), b])
    q = linalg.orth(span)
    if q.shape[1] < m:
        raise DimensionDrop(f"forward image has dimension {q.shape[1]} < {m}")
    return DiracSpace(m, q)


def as_bivector(L: DiracSpace, rtol=1e-10) -> np.ndarray:
    """``P`` with ``L = graph(P)``; raises NotGraph when ``L`` meets ``V + 0``."""
    A = L.covectors
    if L.n == 0:
        return np.zeros((0, 0))
    r = linalg.rank(A, rtol)
    if r < L.n:
        raise NotGraph(L.n - r)
    P = L.vectors @ np.linalg.inv(A)
    return 0.5 * (P - P.T)


def as_twoform(L: DiracSpace, rtol=1e-10) -> np.ndarray:
    """``w`` with ``L = graph(w)``; raises NotGraph when ``L`` meets ``0 + V*``."""
    V = L.vectors
    if L.n == 0:
        return np.zeros((0, 0))
    r = linalg.rank(V, rtol)
    if r < L.n:
        raise NotGraph(L.n - r)
    w = L.covectors @ np.linalg.inv(V)
    return 0.5 * (w - w.T)


def product(L1: DiracSpace, L2: DiracSpace) -> DiracSpace:
    """Direct product ``L1 x L2`` on ``(V1 + V2) + (V1* + V2*)``."""
    n1, n2 = L1.n, L2.n
    B = np.zeros((2 * (n1 + n2), n1 + n2))
    B[:n1, :n1] = L1.vectors
    B[n1 : n1 + n2, n1:] = L2.vectors
    B[n1 + n2 : 2 * n1 + n2, :n1] = L1.covectors
    B[2 * n1 + n2 :, n1:] = L2.covectors
    return DiracSpace(n1 + n2, B)


def from_json(data) -> DiracSpace:
    """Build a Dirac space from ``{"bivector": M}``, ``{"twoform": M}`` or
    ``{"basis": B}`` (columns)."""
    if "bivector" in data:
        return graph_of_bivector(np.array(data["bivector"], dtype=float))
    if "twoform" in data:
        return graph_of_twoform(np.array(data["twoform"], dtype=float))
    if "basis" in data:
        B = np.array(data["basis"], dtype=float)
        return DiracSpace(B.shape[0] // 2, B)
    raise InputError("Dirac JSON needs one of 'bivector', 'twoform', 'basis'")
