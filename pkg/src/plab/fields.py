"""Bivector fields and two-forms on coordinate spaces.

Two representations:

* :class:`PolyBivectorField` stores polynomial coefficients sparsely and
  differentiates exactly. Integer/``Fraction`` coefficients stay exact.
* :class:`PointField` wraps an evaluator and differentiates by central
  differences.

The Schouten bracket uses the cyclic formula

    [pi, rho]^{ijk} = sum_l (pi^{li} d_l rho^{jk} + rho^{li} d_l pi^{jk}) + cyclic(i, j, k)

Only vanishing of the bracket is ever asserted, so the overall sign and
normalization do not matter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import LieAlgebra
from .errors import InputError, JacobianIllConditioned, MixedDimensions, NoFit

# polynomials ------------------------------------------------------------
# A polynomial in n variables is a dict {exponent tuple: coefficient}.


def _padd(p, q, scale=1):
    out = dict(p)
    for m, v in q.items():
        out[m] = out.get(m, 0) + scale * v
        if out[m] == 0:
            del out[m]
    return out


def _pmul(p, q):
    out = {}
    for m1, v1 in p.items():
        for m2, v2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + v1 * v2
    return {m: v for m, v in out.items() if v != 0}


def _pdiff(p, l):
    out = {}
    for m, v in p.items():
        if m[l] > 0:
            mm = list(m)
            mm[l] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + m[l] * v
    return {m: v for m, v in out.items() if v != 0}


def _peval(p, x):
    total = 0.0
    for m, v in p.items():
        total += float(v) * float(np.prod([xi**e for xi, e in zip(x, m)]))
    return total


def _pdegree(p):
    return max((sum(m) for m in p), default=0)


@dataclass(frozen=True, eq=False)
class PolyBivectorField:
    n: int
    comps: dict  # {(i, j): polynomial} with i < j

    def __post_init__(self):
        for (i, j), p in self.comps.items():
            if not 0 <= i < j < self.n:
                raise InputError(f"bivector component ({i}, {j}) must have i < j < n")
            if any(len(m) != self.n for m in p):
                raise InputError("monomial exponent length does not match dimension")

    @property
    def degree(self) -> int:
        return max((_pdegree(p) for p in self.comps.values()), default=0)

    def comp(self, i, j):
        if i == j:
            return {}
        if i < j:
            return self.comps.get((i, j), {})
        return {m: -v for m, v in self.comps.get((j, i), {}).items()}

    def __call__(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        out = np.zeros((self.n, self.n))
        for (i, j), p in self.comps.items():
            v = _peval(p, point)
            out[i, j] = v
            out[j, i] = -v
        return out

    def to_point_field(self, fd_step=None) -> "PointField":
        return PointField("bivector", self, self.n, fd_step)


@dataclass(frozen=True, eq=False)
class PolyTrivectorField:
    n: int
    comps: dict  # {(i, j, k): polynomial} with i < j < k

    def is_zero(self) -> bool:
        return all(not p for p in self.comps.values())

    def __call__(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        vals = {key: _peval(p, point) for key, p in self.comps.items()}
        return _trivector_from_sorted(self.n, vals)


def lie_poisson_field(L: LieAlgebra) -> PolyBivectorField:
    """``pi^{ij}(xi) = sum_k c[k, i, j] xi_k`` with exact coefficients."""
    n = L.n
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            p = {}
            for k in range(n):
                v = L.c[k, i, j]
                if v != 0:
                    m = tuple(1 if t == k else 0 for t in range(n))
                    p[m] = int(v) if v == round(v) else float(v)
            if p:
                comps[(i, j)] = p
    return PolyBivectorField(n, comps)


def schouten_poly(pi: PolyBivectorField, rho: PolyBivectorField) -> PolyTrivectorField:
    if pi.n != rho.n:
        raise MixedDimensions(f"bivectors on spaces of dimension {pi.n} and {rho.n}")
    n = pi.n
    comps = {}
    for i, j, k in itertools.combinations(range(n), 3):
        total = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(n):
                total = _padd(total, _pmul(pi.comp(l, a), _pdiff(rho.comp(b, c), l)))
                total = _padd(total, _pmul(rho.comp(l, a), _pdiff(pi.comp(b, c), l)))
        comps[(i, j, k)] = total
    return PolyTrivectorField(n, comps)


# point fields ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointField:
    """A tensor or map given pointwise.

    ``kind`` is ``"bivector"``, ``"two-form"`` or ``"map"``. ``fd_step`` of
    ``None`` means ``1e-5 * (1 + |p|)``.
    """

    kind: str
    evaluator: Callable
    dim: int
    fd_step: float | None = None

    def __post_init__(self):
        if self.kind not in ("bivector", "two-form", "map"):
            raise InputError(f"unknown field kind {self.kind!r}")

    def __call__(self, point):
        return np.asarray(self.evaluator(np.asarray(point, dtype=float)), dtype=float)

    def step(self, point) -> float:
        if self.fd_step is not None:
            return float(self.fd_step)
        return 1e-5 * (1.0 + float(np.linalg.norm(point)))

    def partials(self, point) -> np.ndarray:
        """Central-difference partials; axis 0 indexes the coordinate."""
        point = np.asarray(point, dtype=float)
        h = self.step(point)
        out = []
        for l in range(self.dim):
            e = np.zeros(self.dim)
            e[l] = h
            out.append((self(point + e) - self(point - e)) / (2 * h))
        return np.array(out)


def fd_jacobian(fn, point, h=None) -> np.ndarray:
    """Central-difference Jacobian of ``fn`` at ``point`` (rows: outputs)."""
    point = np.asarray(point, dtype=float)
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(point)))
    cols = []
    for l in range(point.size):
        e = np.zeros(point.size)
        e[l] = h
        cols.append((np.asarray(fn(point + e)) - np.asarray(fn(point - e))) / (2 * h))
    if not cols:
        return np.zeros((np.asarray(fn(point)).size, 0))
    return np.array(cols).T


def _as_point_field(f, fd_step=None):
    if isinstance(f, PolyBivectorField):
        return f.to_point_field(fd_step)
    return f


def _trivector_from_sorted(n, vals):
    T = np.zeros((n, n, n))
    for (i, j, k), v in vals.items():
        for (a, b, c), s in (
            ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
            ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1),
        ):
            T[a, b, c] = s * v
    return T


def schouten(pi, rho, point) -> np.ndarray:
    """Schouten bracket ``[pi, rho]`` at ``point`` as a full antisymmetric array.

    Two polynomial inputs are bracketed exactly; anything else goes through
    central differences.
    """
    if isinstance(pi, PolyBivectorField) and isinstance(rho, PolyBivectorField):
        return schouten_poly(pi, rho)(point)
    pf, rf = _as_point_field(pi), _as_point_field(rho)
    n = pf.dim
    if rf.dim != n:
        raise MixedDimensions(f"bivectors on spaces of dimension {pf.dim} and {rf.dim}")
    point = np.asarray(point, dtype=float)
    P, R = pf(point), rf(point)
    dP, dR = pf.partials(point), rf.partials(point)
    # S[a, b, c] = sum_l P[l, a] dR[l, b, c] + R[l, a] dP[l, b, c]
    S = np.einsum("la,lbc->abc", P, dR) + np.einsum("la,lbc->abc", R, dP)
    return S + S.transpose(2, 0, 1) + S.transpose(1, 2, 0)


def exterior_derivative(omega: PointField, point) -> np.ndarray:
    """``(d omega)_{ijk} = d_i omega_{jk} - d_j omega_{ik} + d_k omega_{ij}``."""
    if omega.kind != "two-form":
        raise InputError("exterior_derivative needs a two-form field")
    D = omega.partials(point)
    return D - D.transpose(1, 0, 2) + D.transpose(1, 2, 0)


def pushforward_bivector(phi, pi, point, cond_bound=1e10, h=None) -> np.ndarray:
    """``J pi(p) J^T`` with ``J`` the central-difference Jacobian of ``phi`` at ``p``."""
    point = np.asarray(point, dtype=float)
    fn = phi if not isinstance(phi, PointField) else phi.__call__
    if h is None and isinstance(phi, PointField):
        h = phi.step(point)
    J = fd_jacobian(fn, point, h)
    s = np.linalg.svd(J, compute_uv=False)
    if s.size and (s[-1] == 0 or s[0] / s[-1] > cond_bound):
        raise JacobianIllConditioned(f"Jacobian condition number {s[0] / max(s[-1], 1e-300):.3e}")
    Pi = pi(point) if callable(pi) else np.asarray(pi, dtype=float)
    return J @ Pi @ J.T


# polynomial degree fitting ----------------------------------------------


def _monomials(n, degree):
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            m = [0] * n
            for v in combo:
                m[v] += 1
            out.append(tuple(m))
    return out


@dataclass(frozen=True)
class PolynomialFit:
    degree: int
    residuals: tuple  # relative max residual for each tried degree 0..max_degree
    scale: float


def fit_polynomial_degree(f, center, radius, max_degree, tol=1e-8, n_random=200, seed=0) -> PolynomialFit:
    """Smallest total degree ``d <= max_degree`` for which a least-squares
    polynomial fit reproduces every sampled component of ``f`` within
    ``tol`` relative to the largest sampled magnitude.

    Residuals for every degree up to ``max_degree`` are recorded so callers
    can report, e.g., the cubic residual. Raises NoFit if none fits.
    """
    if max_degree < 0:
        raise InputError("max_degree must be non-negative")
    center = np.asarray(center, dtype=float)
    n = center.size
    if n <= 4:
        axis = np.linspace(-radius, radius, 4)
        pts = np.array(list(itertools.product(axis, repeat=n))) + center if n else np.zeros((1, 0))
    else:
        rng = np.random.default_rng(seed)
        pts = center + rng.uniform(-radius, radius, size=(n_random, n))
    vals = np.array([np.asarray(f(p), dtype=float).ravel() for p in pts])
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    residuals = []
    degree = None
    for d in range(max_degree + 1):
        if scale == 0.0:
            residuals.append(0.0)
        else:
            mons = _monomials(n, d)
            rel = pts - center
            A = np.array([[np.prod(r**np.array(m)) for m in mons] for r in rel])
            coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
            residuals.append(float(np.max(np.abs(A @ coef - vals))) / scale)
        if degree is None and residuals[-1] <= tol:
            degree = d
    if degree is None:
        raise NoFit(f"no polynomial of degree <= {max_degree} fits (residuals {residuals})")
    return PolynomialFit(degree, tuple(residuals), scale)
