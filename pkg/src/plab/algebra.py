"""Finite-dimensional Lie algebras given by structure constants.

Layout: ``c[k, i, j]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
``ad_matrix(L, x)`` is the matrix of ``y -> [x, y]``.

Sign convention. The normal-form formulas are written for a bracket defined
through right-invariant vector fields, for which the group adjoint generator
is ``-[x, .]``. In code that sign is absorbed once: the spray exponential is
``xi -> xi o exp(ad_x)`` and the left-trivialized differential of the group
exponential is ``(exp(ad_x) - 1)/ad_x``. With these choices the closed
two-form on ``g x g*`` and the dual-pair signs come out consistently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import linalg
from .errors import AntisymmetryViolation, DimensionMismatch, InputError

ANTISYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    c: np.ndarray
    labels: tuple = ()
    name: str = ""

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1 or c.shape[0] < 1:
            raise InputError(f"structure constants must have shape (n, n, n), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        if self.labels and len(self.labels) != c.shape[0]:
            raise InputError("labels length does not match dimension")
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_brackets(cls, n, brackets, labels=(), name=""):
        """Build from ``{(i, j): {k: value}}`` or ``[(i, j, k, value), ...]`` with i < j."""
        c = np.zeros((n, n, n))
        items = brackets.items() if isinstance(brackets, dict) else None
        if items is not None:
            entries = [(i, j, k, v) for (i, j), row in items for k, v in row.items()]
        else:
            entries = list(brackets)
        seen = set()
        for i, j, k, v in entries:
            if not (0 <= i < j < n and 0 <= k < n):
                raise InputError(f"bracket entry ({i}, {j}, {k}) needs 0 <= i < j < n and 0 <= k < n")
            if (i, j, k) in seen:
                raise InputError(f"duplicate bracket entry ({i}, {j}, {k})")
            seen.add((i, j, k))
            c[k, i, j] = v
            c[k, j, i] = -v
        return cls(c, tuple(labels), name)

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("kij,i,j->k", self.c, x, y)

    def poisson_matrix(self, xi) -> np.ndarray:
        """Matrix of the linear Poisson structure at ``xi``: ``xi([e_i, e_j])``."""
        return np.einsum("kij,k->ij", self.c, np.asarray(xi, dtype=float))

    def is_integral(self) -> bool:
        return bool(np.all(self.c == np.round(self.c)))

    def subalgebra(self, basis):
        """Structure constants of ``span(basis)`` in that basis, plus the
        closure residual (distance of brackets from the span)."""
        h = np.asarray(basis, dtype=float)
        m = h.shape[1]
        ch = np.zeros((m, m, m))
        resid = 0.0
        pinv = np.linalg.pinv(h)
        for i in range(m):
            for j in range(m):
                z = self.bracket(h[:, i], h[:, j])
                coef = pinv @ z
                ch[:, i, j] = coef
                resid = max(resid, float(np.max(np.abs(h @ coef - z))) if z.size else 0.0)
        return LieAlgebra(ch, name=f"sub({self.name})" if self.name else ""), resid


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    ambient_dim: int
    basis: np.ndarray = field(default=None)

    def __post_init__(self):
        b = np.zeros((self.ambient_dim, 0)) if self.basis is None else np.array(self.basis, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.shape[0] != self.ambient_dim:
            raise DimensionMismatch(f"basis vectors have length {b.shape[0]}, ambient is {self.ambient_dim}")
        if linalg.rank(b) != b.shape[1]:
            raise InputError("subspace basis is not linearly independent")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def check_antisymmetry(L: LieAlgebra, tol=ANTISYM_TOL) -> float:
    err = float(np.max(np.abs(L.c + L.c.transpose(0, 2, 1))))
    if err > tol:
        raise AntisymmetryViolation(f"structure constants fail antisymmetry by {err:.3e}")
    return err


def jacobiator(L: LieAlgebra):
    """Jacobi residual tensor ``J[l, i, j, k]`` and its max absolute entry.

    Integer tables are evaluated in integer arithmetic, so a Lie algebra gives
    exactly zero.
    """
    check_antisymmetry(L)
    c = L.c.astype(np.int64) if L.is_integral() else L.c
    # sum_m c[m,i,j] c[l,m,k]  -> T[l,i,j,k]
    t = np.einsum("mij,lmk->lijk", c, c)
    J = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
    return (float(np.max(np.abs(J))) if J.size else 0.0), J


def ad_matrix(L: LieAlgebra, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (L.n,):
        raise DimensionMismatch(f"vector of length {x.shape} for a {L.n}-dimensional algebra")
    return np.einsum("kij,i->kj", L.c, x)


def coad_exp(L: LieAlgebra, x, xi) -> np.ndarray:
    """``xi o exp(ad_x)``: the spray exponential at ``(x, xi)``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (L.n,):
        raise DimensionMismatch("covector length does not match algebra dimension")
    return linalg.expm(ad_matrix(L, x)).T @ xi


def xi_operator(L: LieAlgebra, x0) -> np.ndarray:
    """``(exp(ad_x0) - 1)/ad_x0``, the left-trivialized differential of exp."""
    return linalg.phi1(ad_matrix(L, x0))


def is_morphism(Lg: LieAlgebra, Lh: LieAlgebra, f) -> float:
    """Max over basis pairs of ``|f[e_i, e_j] - [f e_i, f e_j]|``; ``f`` is dim h x dim g."""
    f = np.asarray(f, dtype=float)
    if f.shape != (Lh.n, Lg.n):
        raise DimensionMismatch(f"map has shape {f.shape}, expected {(Lh.n, Lg.n)}")
    lhs = np.einsum("ak,kij->aij", f, Lg.c)
    rhs = np.einsum("apq,pi,qj->aij", Lh.c, f, f)
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


def annihilator(S: LinearSubspace) -> LinearSubspace:
    n = S.ambient_dim
    if S.dim == 0:
        return LinearSubspace(n, np.eye(n))
    return LinearSubspace(n, linalg.null_space(S.basis.T))


# catalog ---------------------------------------------------------------


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(np.zeros((n, n, n)), tuple(f"e{i + 1}" for i in range(n)), f"abelian{n}")


def so3() -> LieAlgebra:
    return LieAlgebra.from_brackets(
        3, [(0, 1, 2, 1), (1, 2, 0, 1), (0, 2, 1, -1)], ("e1", "e2", "e3"), "so3"
    )


def sl2() -> LieAlgebra:
    """Basis (h, e, f) with [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    return LieAlgebra.from_brackets(
        3, [(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)], ("h", "e", "f"), "sl2"
    )


def aff1() -> LieAlgebra:
    """Basis (a, b) with [a, b] = b."""
    return LieAlgebra.from_brackets(2, [(0, 1, 1, 1)], ("a", "b"), "aff1")


def aff1_x_aff1() -> LieAlgebra:
    return LieAlgebra.from_brackets(
        4, [(0, 1, 1, 1), (2, 3, 3, 1)], ("a1", "b1", "a2", "b2"), "aff1_x_aff1"
    )


def heisenberg3() -> LieAlgebra:
    return LieAlgebra.from_brackets(3, [(0, 1, 2, 1)], ("p", "q", "z"), "heisenberg3")


def borel_sl2() -> LieAlgebra:
    """Upper-triangular traceless matrices, basis (h, e) with [h, e] = 2e."""
    return LieAlgebra.from_brackets(2, [(0, 1, 1, 2)], ("h", "e"), "borel_sl2")


CATALOG = {
    "so3": so3,
    "sl2": sl2,
    "aff1": aff1,
    "aff1_x_aff1": aff1_x_aff1,
    "heisenberg3": heisenberg3,
    "borel_sl2": borel_sl2,
}


# JSON ------------------------------------------------------------------


def algebra_from_json(data) -> LieAlgebra:
    if not isinstance(data, dict) or "dim" not in data:
        raise InputError("algebra JSON needs a 'dim' field")
    n = data["dim"]
    if not isinstance(n, int) or n < 1:
        raise InputError("'dim' must be a positive integer")
    entries = []
    for b in data.get("brackets", []):
        try:
            entries.append((int(b["i"]), int(b["j"]), int(b["k"]), _number(b["value"])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed bracket entry {b!r}") from exc
    return LieAlgebra.from_brackets(n, entries, tuple(data.get("labels", ())), data.get("name", ""))


def algebra_to_json(L: LieAlgebra) -> dict:
    out = []
    for i in range(L.n):
        for j in range(i + 1, L.n):
            for k in range(L.n):
                v = L.c[k, i, j]
                if v != 0:
                    out.append({"i": i, "j": j, "k": k, "value": int(v) if v == round(v) else float(v)})
    d = {"dim": L.n, "brackets": out}
    if L.labels:
        d["labels"] = list(L.labels)
    if L.name:
        d["name"] = L.name
    return d


def load_algebra(path) -> LieAlgebra:
    return algebra_from_json(json.loads(Path(path).read_text()))


def _number(v):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise InputError(f"bracket value {v!r} is not a number")
    if isinstance(v, str):
        return float(Fraction(v))
    return v
